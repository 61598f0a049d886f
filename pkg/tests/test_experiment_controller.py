"""Tests for the experiment controller's pass/fail checks."""
import logging

import pytest

import controllers.experiment_controller as experiment_module
from controllers import ExperimentController
from models import ExperimentConfig


@pytest.fixture
def controller(spectral, energy, kernel, solver, runs):
    return ExperimentController(spectral, energy, kernel, solver, runs)


def _config(**sections):
    return ExperimentConfig.from_sections(sections)


class TestSolveChecks:

    def test_unconverged_fixed_point_fails(self, controller, caplog):
        """Without a converged fixed point the mountain pass is skipped and the run fails."""
        config = _config(grid={'half_width': '8', 'points': '32'},
                         solver={'max_iters': '3', 'seed': 'gaussian'})
        with caplog.at_level(logging.WARNING):
            record = controller.solve(config)
        assert record.passed is False
        assert record.summary['checks'] == {'fixed_point_converged': False}
        assert 'mountain_pass' not in record.summary
        assert "Solve checks failed: fixed_point_converged" in caplog.text


class TestKernelChecks:
    """The run passes on shape and on the mass of the truncated integral."""

    LINE = {'model': {'dim': '1', 's': '0.5'}, 'experiment': {'kernel_r_max': '40'}}

    def test_mass_within_tolerance(self, controller):
        record = controller.kernel_run(_config(**self.LINE))
        assert record.passed is True
        assert abs(record.summary['mass'] - 1.0) < experiment_module.MASS_TOL
        assert record.summary['sampled_mass'] > 0

    def test_mass_outside_tolerance_fails(self, controller, monkeypatch, caplog):
        monkeypatch.setattr(experiment_module, 'MASS_TOL', 1e-6)
        with caplog.at_level(logging.WARNING):
            record = controller.kernel_run(_config(**self.LINE))
        assert record.summary['shape_ok'] is True
        assert record.passed is False
        assert "Kernel mass" in caplog.text
