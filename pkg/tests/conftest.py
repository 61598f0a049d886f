"""Shared fixtures for the fracground test suite."""
import os
import sys

import numpy as np
import pytest

# Add the src directory to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'src'))

from models import BoxGrid, FracOrder, ModelSpec, Nonlinearity, Potential, RealField
from services import (EnergyService, KernelService, ModelService, RunService, SolverService,
                      SpectralService)


@pytest.fixture
def spectral():
    return SpectralService()


@pytest.fixture
def models():
    return ModelService()


@pytest.fixture
def energy(spectral):
    return EnergyService(spectral)


@pytest.fixture
def kernel(spectral):
    return KernelService(spectral)


@pytest.fixture
def solver(spectral, energy, kernel, models):
    return SolverService(spectral, energy, kernel, models)


@pytest.fixture
def runs(tmp_path):
    return RunService(str(tmp_path / 'runs'))


@pytest.fixture
def canonical_model():
    """N=2, s=0.6, g = -t + t^3, V = 0.5 / (1 + |x|^2)."""
    return ModelSpec(2, FracOrder(0.6), Nonlinearity(), Potential())


@pytest.fixture
def free_model(canonical_model):
    return canonical_model.without_potential()


@pytest.fixture
def line_model():
    """One-dimensional free model with s = 0.75."""
    return ModelSpec(1, FracOrder(0.75), Nonlinearity(), Potential.zero())


@pytest.fixture
def grid_1d():
    return BoxGrid(1, 10.0, 256)


@pytest.fixture
def grid_2d():
    return BoxGrid(2, 8.0, 64)


@pytest.fixture
def solver_grid():
    """Reduced canonical box: L = 16 at h = 0.25."""
    return BoxGrid(2, 16.0, 128)


@pytest.fixture
def line_grid():
    return BoxGrid(1, 32.0, 512)


@pytest.fixture
def gaussian():
    """Factory for A exp(-|x|^2 / w^2) on a grid."""
    def make(grid, amplitude=1.0, width=1.0):
        return RealField(grid, amplitude * np.exp(-grid.radius() ** 2 / width ** 2))
    return make
