"""Solver configuration and result models."""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from .energy import CriticalDiagnostics, EnergyBreakdown, PohozaevReport
from .grid import RealField


class SeedKind(Enum):
    """Initial profile families."""
    PLATEAU = "plateau"
    GAUSSIAN = "gaussian"
    FILE = "file"


class SolveStatus(Enum):
    """How an iterative solve ended."""
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    TRIVIAL = "trivial"


@dataclass(frozen=True)
class SeedSpec:
    """Seed profile: plateau (level, radius), gaussian (amplitude, width) or file."""
    kind: SeedKind = SeedKind.PLATEAU
    level: Optional[float] = None
    radius: Optional[float] = None
    amplitude: float = 2.0
    width: float = 1.0
    path: Optional[str] = None

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'kind': self.kind.value,
            'level': self.level,
            'radius': self.radius,
            'amplitude': self.amplitude,
            'width': self.width,
            'path': self.path,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'SeedSpec':
        """Create SeedSpec from dictionary."""
        level = data.get('level')
        radius = data.get('radius')
        return cls(
            kind=SeedKind(data.get('kind', 'plateau')),
            level=None if level is None else float(level),
            radius=None if radius is None else float(radius),
            amplitude=float(data.get('amplitude', 2.0)),
            width=float(data.get('width', 1.0)),
            path=data.get('path')
        )


@dataclass(frozen=True)
class SolveConfig:
    """Iteration controls shared by every solver."""
    max_iters: int = 4000
    tol: float = 1e-8
    damping: float = 0.8
    stabilization: bool = True
    seed: SeedSpec = field(default_factory=SeedSpec)
    lambda_count: int = 8
    path_vertices: int = 16
    support_tol: float = 1e-4

    def __post_init__(self):
        if not 0.0 < self.damping <= 1.0:
            raise ValueError(f"damping must lie in (0, 1], got {self.damping}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be positive, got {self.max_iters}")
        if self.path_vertices < 7:
            raise ValueError(f"path_vertices must be at least 7, got {self.path_vertices}")

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'max_iters': self.max_iters,
            'tol': self.tol,
            'damping': self.damping,
            'stabilization': self.stabilization,
            'seed': self.seed.to_dict(),
            'lambda_count': self.lambda_count,
            'path_vertices': self.path_vertices,
            'support_tol': self.support_tol,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'SolveConfig':
        """Create SolveConfig from dictionary."""
        return cls(
            max_iters=int(data.get('max_iters', 4000)),
            tol=float(data.get('tol', 1e-8)),
            damping=float(data.get('damping', 0.8)),
            stabilization=bool(data.get('stabilization', True)),
            seed=SeedSpec.from_dict(data.get('seed', {})),
            lambda_count=int(data.get('lambda_count', 8)),
            path_vertices=int(data.get('path_vertices', 16)),
            support_tol=float(data.get('support_tol', 1e-4))
        )


@dataclass
class SolveResult:
    """Approximate critical point with its diagnostics."""
    u: RealField
    lam: float
    residual_norm: float
    energy: EnergyBreakdown
    pohozaev: PohozaevReport
    diagnostics: CriticalDiagnostics
    iterations: int
    status: SolveStatus
    untruncated_residual_norm: float = 0.0
    level: Optional[float] = None

    @property
    def converged(self) -> bool:
        return self.status in (SolveStatus.CONVERGED, SolveStatus.TRIVIAL)

    @property
    def c_lambda(self) -> float:
        """Level of the solve: path maximum for mountain pass, I_lambda otherwise."""
        return self.energy.I_lambda if self.level is None else self.level

    def summary(self) -> dict:
        """Scalar summary without the field."""
        return {
            'lam': self.lam,
            'residual_norm': self.residual_norm,
            'untruncated_residual_norm': self.untruncated_residual_norm,
            'iterations': self.iterations,
            'status': self.status.value,
            'converged': self.converged,
            'c_lambda': self.c_lambda,
            'u0': float(np.max(np.abs(self.u.values))),
            'energy': self.energy.to_dict(),
            'pohozaev': self.pohozaev.to_dict(),
            'diagnostics': self.diagnostics.to_dict(),
        }


@dataclass
class ContinuationRecord:
    """One lambda step of the continuation."""
    lam: float
    c_lambda: float
    result: SolveResult

    @property
    def alpha(self) -> float:
        return self.result.energy.kinetic


@dataclass
class ContinuationTrace:
    """Lambda continuation over [lambda_start, 1] inside J = [delta_bar, 1]."""
    delta_bar: float
    lambda_start: Optional[float] = None
    records: List[ContinuationRecord] = field(default_factory=list)

    @property
    def lambdas(self) -> List[float]:
        return [r.lam for r in self.records]

    @property
    def levels(self) -> List[float]:
        return [r.c_lambda for r in self.records]

    def is_monotone(self, slack: float = 1e-6) -> bool:
        """c_lambda non-increasing in lambda within slack."""
        levels = self.levels
        return all(b <= a + slack * max(1.0, abs(a)) for a, b in zip(levels, levels[1:]))

    def is_positive(self) -> bool:
        return all(c > 0 for c in self.levels)

    def lambdas_increasing(self) -> bool:
        lams = self.lambdas
        return all(b > a for a, b in zip(lams, lams[1:]))

    @property
    def alpha_max(self) -> float:
        return max((r.alpha for r in self.records), default=0.0)

    @property
    def alpha_ratio(self) -> float:
        alphas = [r.alpha for r in self.records]
        if not alphas or min(alphas) <= 0:
            return float('inf')
        return max(alphas) / min(alphas)

    def rows(self) -> List[dict]:
        """Tabular view for CSV output."""
        return [{
            'lam': r.lam,
            'c_lambda': r.c_lambda,
            'alpha': r.alpha,
            'eta': r.result.energy.virial,
            'residual_norm': r.result.residual_norm,
            'level_relation_residual': r.result.diagnostics.level_relation_residual,
            'pohozaev_residual_rel': r.result.pohozaev.residual_rel,
        } for r in self.records]


@dataclass
class MinimizationStep:
    """One projected-descent iterate."""
    step: int
    energy: float
    residual_norm: float
    centroid_radius: float
    kinetic: float
    pohozaev_residual_rel: float
    theta: float

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'step': self.step,
            'energy': self.energy,
            'residual_norm': self.residual_norm,
            'centroid_radius': self.centroid_radius,
            'kinetic': self.kinetic,
            'pohozaev_residual_rel': self.pohozaev_residual_rel,
            'theta': self.theta,
        }


@dataclass
class MinimizationTrace:
    """Trace of Pohozaev-constrained descent."""
    steps: List[MinimizationStep] = field(default_factory=list)
    final: Optional[RealField] = None

    @property
    def b_est(self) -> float:
        return min(step.energy for step in self.steps)

    @property
    def min_residual(self) -> float:
        return min(step.residual_norm for step in self.steps)

    @property
    def kinetic_floor(self) -> float:
        """Smallest kinetic energy seen on the Pohozaev set."""
        return min(step.kinetic for step in self.steps)

    @property
    def drift_slope(self) -> float:
        """Least-squares slope of centroid radius against step index."""
        if len(self.steps) < 2:
            return 0.0
        k = np.array([step.step for step in self.steps], dtype=float)
        r = np.array([step.centroid_radius for step in self.steps])
        return float(np.polyfit(k, r, 1)[0])

    def rows(self) -> List[dict]:
        return [step.to_dict() for step in self.steps]


@dataclass
class ThetaRecord:
    """Projection parameter of a translated ground state."""
    radius: float
    theta: Optional[float]
    energy: Optional[float] = None
    error: Optional[str] = None

    @property
    def deviation(self) -> Optional[float]:
        return None if self.theta is None else abs(self.theta - 1.0)

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'radius': self.radius,
            'theta': self.theta,
            'deviation': self.deviation,
            'energy': self.energy,
            'error': self.error,
        }


@dataclass
class DecayFit:
    """Log-log fit of shell-averaged |u| on a radius window."""
    exponent: float
    prefactor: float
    rms: float
    target: float
    window: tuple

    @property
    def relative_error(self) -> float:
        return abs(self.exponent - self.target) / abs(self.target)

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'exponent': self.exponent,
            'prefactor': self.prefactor,
            'rms': self.rms,
            'target': self.target,
            'window': list(self.window),
            'relative_error': self.relative_error,
        }


@dataclass
class RadialDecayProfile:
    """|x|^((N-1)/2) |u| / ||u||_{H^s} on a window."""
    radii: np.ndarray
    values: np.ndarray

    @property
    def maximum(self) -> float:
        return float(np.max(self.values)) if self.values.size else 0.0
