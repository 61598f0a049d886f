"""Services layer for fracground."""
from .energy_service import EnergyService
from .kernel_service import KernelService
from .model_service import ModelService
from .run_service import RunService
from .solver_service import SolverService
from .spectral_service import SpectralService, normalization_constant, sharp_sobolev_constant

__all__ = ['SpectralService', 'ModelService', 'EnergyService', 'KernelService', 'SolverService',
           'RunService', 'normalization_constant', 'sharp_sobolev_constant']
