"""Tests for the command-line surface."""
import json
import logging
import os

import pytest

from main import main
from middleware.error_middleware import EXIT_CONFIG, EXIT_OK


def _config(tmp_path, text):
    path = tmp_path / 'experiment.ini'
    path.write_text(text)
    return str(path)


class TestVerifyCommand:

    def test_list(self, tmp_path, capsys):
        assert main(['verify', '--list', '--out', str(tmp_path)]) == EXIT_OK
        names = capsys.readouterr().out.split()
        assert len(names) >= 20
        assert len(names) == len(set(names))

    @pytest.mark.slow
    def test_default_config_passes(self, tmp_path):
        assert main(['verify', '--out', str(tmp_path)]) == EXIT_OK
        (run_dir,) = list(tmp_path.iterdir())
        with open(os.path.join(run_dir, 'verify_report.json')) as handle:
            report = json.load(handle)
        assert report['failed'] == []
        assert report['passed'] >= 20


class TestConfigErrors:
    """Invalid experiment files exit with code 2 before any numerics."""

    def test_order_out_of_range(self, tmp_path):
        path = _config(tmp_path, "[model]\ns = 1.2\n")
        assert main(['solve', '--config', path, '--out', str(tmp_path)]) == EXIT_CONFIG

    def test_supercritical_power(self, tmp_path, caplog):
        path = _config(tmp_path, "[model]\ndim = 2\ns = 0.6\np = 4\n")
        with caplog.at_level(logging.ERROR):
            code = main(['solve', '--config', path, '--out', str(tmp_path)])
        assert code == EXIT_CONFIG
        assert "subcriticality" in caplog.text

    def test_unknown_key(self, tmp_path, caplog):
        path = _config(tmp_path, "[grid]\nspacing = 0.1\n")
        with caplog.at_level(logging.ERROR):
            code = main(['kernel', '--config', path, '--out', str(tmp_path)])
        assert code == EXIT_CONFIG
        assert "unknown key 'spacing' in [grid]" in caplog.text

    def test_sweep_needs_order_above_half(self, tmp_path, caplog):
        path = _config(tmp_path, "[model]\ns = 0.4\n[experiment]\nname = existence\n")
        with caplog.at_level(logging.ERROR):
            code = main(['sweep', '--config', path, '--out', str(tmp_path)])
        assert code == EXIT_CONFIG
        assert "existence2" in caplog.text

    def test_threads(self, tmp_path):
        assert main(['verify', '--threads', '0', '--out', str(tmp_path)]) == EXIT_CONFIG

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            main(['plot'])


class TestKernelCommand:

    def test_half_order_line_kernel(self, tmp_path):
        """N = 1, s = 1/2 by quadrature writes the profile and a passing summary."""
        path = _config(tmp_path, "[model]\ndim = 1\ns = 0.5\n[experiment]\nkernel_r_max = 40\n")
        out = tmp_path / 'runs'
        assert main(['kernel', '--config', path, '--out', str(out)]) == EXIT_OK

        (run_dir,) = list(out.iterdir())
        assert run_dir.name.startswith('kernel-')
        with open(os.path.join(run_dir, 'summary.json')) as handle:
            data = json.load(handle)
        assert data['passed'] is True
        assert data['summary']['method'] == 'quadrature_1d'
        assert data['summary']['shape_ok'] is True
        assert data['summary']['decay']['tail_relative_error'] < 0.1
        assert abs(data['summary']['mass'] - 1.0) < 0.02
        assert {'kernel.csv', 'plot.gp', 'summary.json'} <= set(data['outputs'])
