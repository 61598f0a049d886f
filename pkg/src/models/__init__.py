"""Data models for fracground."""
from .energy import (CriticalDiagnostics, EnergyBreakdown, NonAttainmentChain, PathSpec,
                     PohozaevReport, ThetaProfile)
from .experiment import ExperimentConfig, ExperimentName, RunRecord, SECTION_KEYS
from .grid import BoxGrid, FracOrder, RealField, SpectralCoeffs
from .kernel import KernelDecayReport, KernelMethod, KernelProfile
from .model_spec import (AssumptionCheck, AssumptionReport, ModelSpec, Nonlinearity, Potential,
                         PotentialFamily, SplitPair, critical_exponent)
from .solve import (ContinuationRecord, ContinuationTrace, DecayFit, MinimizationStep,
                    MinimizationTrace, RadialDecayProfile, SeedKind, SeedSpec, SolveConfig,
                    SolveResult, SolveStatus, ThetaRecord)

__all__ = [
    'BoxGrid', 'FracOrder', 'RealField', 'SpectralCoeffs',
    'Nonlinearity', 'SplitPair', 'Potential', 'PotentialFamily', 'ModelSpec',
    'AssumptionCheck', 'AssumptionReport', 'critical_exponent',
    'EnergyBreakdown', 'PohozaevReport', 'CriticalDiagnostics', 'PathSpec',
    'NonAttainmentChain', 'ThetaProfile',
    'SeedKind', 'SeedSpec', 'SolveConfig', 'SolveResult', 'SolveStatus',
    'ContinuationRecord', 'ContinuationTrace', 'MinimizationStep', 'MinimizationTrace',
    'ThetaRecord', 'DecayFit', 'RadialDecayProfile',
    'KernelMethod', 'KernelProfile', 'KernelDecayReport',
    'ExperimentConfig', 'ExperimentName', 'RunRecord', 'SECTION_KEYS',
]
