"""Tests for experiment-file parsing and run directories."""
import json
import os

import pytest

from errors import ConfigError
from models import ExperimentName, KernelMethod, PotentialFamily, SeedKind
from services.run_service import PLOT_FILE, SUMMARY_FILE


def _write(tmp_path, text):
    path = tmp_path / 'experiment.ini'
    path.write_text(text)
    return str(path)


class TestLoadConfig:
    """`[section] key = value` experiment files."""

    def test_defaults(self, runs):
        config = runs.load_config(None)
        assert config.model.dim == 2
        assert config.model.s == 0.6
        assert config.grid.half_width == 16.0
        assert config.grid.points_per_axis == 256
        assert config.solver.seed.kind == SeedKind.PLATEAU
        assert config.name == ExperimentName.EXISTENCE

    def test_sections(self, runs, tmp_path):
        path = _write(tmp_path, """
[model]
dim = 1
s = 0.75
potential = gaussian   # well
v0 = 0.3

[grid]
half_width = 20
points = 128

[solver]
seed = gaussian
seed_width = 2.0
stabilization = off

[experiment]
name = kernel
kernel_method = quadrature_1d
fit_window = 2, 6
""")
        config = runs.load_config(path)
        assert config.model.dim == 1
        assert config.model.potential.family == PotentialFamily.GAUSSIAN
        assert config.model.potential.amplitude == 0.3
        assert config.grid.spacing == pytest.approx(40.0 / 128)
        assert config.solver.seed.width == 2.0
        assert not config.solver.stabilization
        assert config.name == ExperimentName.KERNEL
        assert config.kernel_method == KernelMethod.QUADRATURE_1D
        assert config.fit_window == (2.0, 6.0)

    def test_unknown_names(self, runs, tmp_path):
        path = _write(tmp_path, "[model]\ncolour = red\n[plot]\nx = 1\n")
        with pytest.raises(ConfigError) as excinfo:
            runs.load_config(path)
        assert "unknown key 'colour' in [model]" in excinfo.value.failures
        assert "unknown section [plot]" in excinfo.value.failures

    def test_invalid_value(self, runs, tmp_path):
        with pytest.raises(ConfigError, match="invalid experiment value"):
            runs.load_config(_write(tmp_path, "[model]\ns = 1.2\n"))

    def test_missing_file(self, runs, tmp_path):
        with pytest.raises(ConfigError, match="cannot read experiment file"):
            runs.load_config(str(tmp_path / 'missing.ini'))

    def test_hash_ignores_layout(self, runs, tmp_path):
        a = runs.load_config(_write(tmp_path, "[model]\ns = 0.7\n"))
        b = runs.load_config(_write(tmp_path, "[model]\n\ns=0.70   # same\n"))
        assert runs.config_hash(a) == runs.config_hash(b)
        assert runs.config_hash(a) != runs.config_hash(runs.load_config(None))


class TestRunDirectory:
    """CSV, gnuplot and summary outputs."""

    def test_run_dir_name(self, runs):
        config = runs.load_config(None)
        record = runs.start_run('solve', config)
        assert os.path.basename(record.run_dir) == f"solve-{runs.config_hash(config)[:12]}"
        assert os.path.isdir(record.run_dir)

    def test_csv_round_trip(self, runs):
        record = runs.start_run('kernel', runs.load_config(None))
        rows = [{'r': 0.1, 'K': 1.0 / 3.0, 'method': 'grid_fft'},
                {'r': 0.2, 'K': None, 'method': 'grid_fft'}]
        path = runs.write_csv(record, 'kernel.csv', rows)
        back = runs.read_csv(path)
        assert back[0]['K'] == 1.0 / 3.0
        assert back[1]['K'] is None
        assert back[1]['method'] == 'grid_fft'
        assert record.outputs['kernel.csv'] == 'csv'

    def test_finish_run(self, runs):
        record = runs.start_run('verify', runs.load_config(None))
        runs.write_csv(record, 'rows.csv', [{'x': 1.0, 'y': 2.0, 'error': None}])
        runs.finish_run(record, {'total': 3, 'failed': []}, True)

        with open(os.path.join(record.run_dir, SUMMARY_FILE)) as handle:
            data = json.load(handle)
        assert data['passed'] is True
        assert data['summary'] == {'total': 3, 'failed': []}
        assert set(data['outputs']) == {'rows.csv', PLOT_FILE, SUMMARY_FILE}

        with open(os.path.join(record.run_dir, PLOT_FILE)) as handle:
            plot = handle.read()
        assert "'rows.csv' using 1:2 with linespoints" in plot
        assert "using 1:3" not in plot

    def test_summary_hash_is_reproducible(self, runs):
        config = runs.load_config(None)
        first = runs.finish_run(runs.start_run('verify', config), {'value': 0.5}, True)
        second = runs.finish_run(runs.start_run('verify', config), {'value': 0.5}, True)
        assert first.summary_hash == second.summary_hash
        loaded = runs.load_record(first.run_dir)
        assert loaded.summary_hash == first.summary_hash
        assert loaded.started_at == second.started_at
