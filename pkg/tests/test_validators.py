"""Tests for the per-command experiment validators."""
import numpy as np
import pytest

from models import ExperimentConfig, FracOrder, KernelMethod, KernelProfile
from utils.validators import (COMMAND_VALIDATORS, validate_experiment, validate_kernel_profile,
                              validate_radii)


def _config(**sections):
    return ExperimentConfig.from_sections(sections)


class TestDefaults:
    """A bare experiment file runs every command."""

    @pytest.mark.parametrize('command', sorted(COMMAND_VALIDATORS))
    def test_defaults_validate(self, runs, command):
        assert validate_experiment(runs.load_config(None), command) == []

    def test_default_radii_inside_central_half(self, runs):
        config = runs.load_config(None)
        assert config.radii == [2.0, 4.0, 6.0]
        assert max(config.radii) < config.grid.half_width / 2.0


class TestOrderRange:
    """The existence path needs s > 1/2 for solve and sweep; p = 2 keeps s = 0.4 subcritical."""

    @pytest.mark.parametrize('command', ['solve', 'sweep'])
    def test_existence_rejects_low_order(self, command):
        failures = validate_experiment(_config(model={'s': '0.4', 'p': '2'}), command)
        assert len(failures) == 1
        assert "use 'existence2'" in failures[0]

    @pytest.mark.parametrize('command', ['solve', 'sweep'])
    def test_existence2_accepts_low_order(self, command):
        config = _config(model={'s': '0.4', 'p': '2'}, experiment={'name': 'existence2'})
        assert validate_experiment(config, command) == []


class TestRadii:

    def test_radius_on_boundary(self):
        ok, message = validate_radii(_config(experiment={'radii': '2, 8'}))
        assert not ok
        assert "[8.0] leave" in message

    def test_empty(self):
        ok, message = validate_radii(_config(experiment={'radii': ''}))
        assert not ok
        assert "at least one radius" in message


class TestKernelProfileShape:

    def test_decreasing_profile(self):
        radii = np.linspace(0.5, 5.0, 10)
        profile = KernelProfile(FracOrder(0.5), 1, radii, np.exp(-radii), KernelMethod.QUADRATURE_1D)
        assert validate_kernel_profile(profile) == (True, None)

    def test_flat_within_tolerance(self):
        profile = KernelProfile(FracOrder(0.5), 1, [1.0, 2.0], [1.0, 1.0 + 1e-8],
                                KernelMethod.GRID_FFT)
        assert validate_kernel_profile(profile)[0]
