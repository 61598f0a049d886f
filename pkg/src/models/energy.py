"""Energy, identity and path models."""
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .grid import RealField


@dataclass
class EnergyBreakdown:
    """Itemized functional values of a field."""
    kinetic: float
    potential: float
    G_total: float
    G1: float
    G2: float
    virial: float
    lam: float = 1.0

    @property
    def I(self) -> float:
        """Full functional with potential."""
        return 0.5 * self.kinetic + 0.5 * self.potential - self.G_total

    @property
    def I_lambda(self) -> float:
        """A - lambda B at the configured lambda."""
        return 0.5 * self.kinetic + 0.5 * self.potential + self.G2 - self.lam * self.G1

    @property
    def I_free(self) -> float:
        """Functional without potential."""
        return 0.5 * self.kinetic - self.G_total

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'kinetic': self.kinetic,
            'potential': self.potential,
            'G_total': self.G_total,
            'G1': self.G1,
            'G2': self.G2,
            'virial': self.virial,
            'lam': self.lam,
            'I': self.I,
            'I_lambda': self.I_lambda,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'EnergyBreakdown':
        """Create EnergyBreakdown from dictionary."""
        return cls(
            kinetic=float(data['kinetic']),
            potential=float(data['potential']),
            G_total=float(data['G_total']),
            G1=float(data['G1']),
            G2=float(data['G2']),
            virial=float(data['virial']),
            lam=float(data.get('lam', 1.0))
        )


def _relative(residual: float, *terms: float) -> float:
    scale = sum(abs(t) for t in terms)
    return abs(residual) / scale if scale > 0 else 0.0


@dataclass
class PohozaevReport:
    """Terms and residuals of the Pohozaev identity with and without potential."""
    kinetic_term: float
    potential_term: float
    virial_term: float
    rhs: float

    @property
    def residual(self) -> float:
        return self.kinetic_term + self.potential_term + self.virial_term - self.rhs

    @property
    def residual_rel(self) -> float:
        return _relative(self.residual, self.kinetic_term, self.potential_term,
                         self.virial_term, self.rhs)

    @property
    def free_residual(self) -> float:
        return self.kinetic_term - self.rhs

    @property
    def free_residual_rel(self) -> float:
        return _relative(self.free_residual, self.kinetic_term, self.rhs)

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'kinetic_term': self.kinetic_term,
            'potential_term': self.potential_term,
            'virial_term': self.virial_term,
            'rhs': self.rhs,
            'residual': self.residual,
            'residual_rel': self.residual_rel,
            'free_residual': self.free_residual,
            'free_residual_rel': self.free_residual_rel,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'PohozaevReport':
        """Create PohozaevReport from dictionary."""
        return cls(
            kinetic_term=float(data['kinetic_term']),
            potential_term=float(data['potential_term']),
            virial_term=float(data['virial_term']),
            rhs=float(data['rhs'])
        )


@dataclass
class CriticalDiagnostics:
    """Critical-point system entries and the level relation."""
    alpha: float
    beta: float
    eta: float
    gamma1: float
    gamma2: float
    delta1: float
    delta2: float
    lam: float
    level: float
    dim: int
    s: float

    @property
    def nehari_like(self) -> float:
        return self.alpha + self.beta + self.delta2 - self.lam * self.delta1

    @property
    def level_from_identity(self) -> float:
        """(s/N) alpha - eta / (2N)."""
        return self.s * self.alpha / self.dim - self.eta / (2.0 * self.dim)

    @property
    def level_relation_residual(self) -> float:
        return abs(self.level_from_identity - self.level)

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'alpha': self.alpha,
            'beta': self.beta,
            'eta': self.eta,
            'gamma1': self.gamma1,
            'gamma2': self.gamma2,
            'delta1': self.delta1,
            'delta2': self.delta2,
            'lam': self.lam,
            'level': self.level,
            'nehari_like': self.nehari_like,
            'level_relation_residual': self.level_relation_residual,
        }


@dataclass
class PathSpec:
    """Discrete path gamma(t_j) from 0 to a negative-energy endpoint."""
    vertices: List[RealField]
    times: np.ndarray
    energies: np.ndarray
    theta_end: float
    lam: float

    def __post_init__(self):
        if len(self.vertices) < 8:
            raise ValueError(f"a path needs at least 8 vertices, got {len(self.vertices)}")

    @property
    def endpoint_energy(self) -> float:
        return float(self.energies[-1])

    @property
    def max_index(self) -> int:
        return int(np.argmax(self.energies))

    @property
    def max_energy(self) -> float:
        return float(np.max(self.energies))

    def is_admissible(self) -> bool:
        """Starts at 0 and ends below zero energy."""
        return self.vertices[0].is_zero() and self.endpoint_energy < 0


@dataclass
class NonAttainmentChain:
    """I(z) >= (s/N)T(z) >= I0(z^theta) for z on the Pohozaev set."""
    theta: float
    energy: float
    kinetic_share: float
    free_level: float

    rtol: float = 1e-6

    @property
    def holds(self) -> bool:
        slack = self.rtol * max(1.0, abs(self.energy))
        return (self.theta <= 1.0 + self.rtol
                and self.energy >= self.kinetic_share - slack
                and self.kinetic_share >= self.free_level - slack)

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'theta': self.theta,
            'energy': self.energy,
            'kinetic_share': self.kinetic_share,
            'free_level': self.free_level,
            'holds': self.holds,
        }


@dataclass
class ThetaProfile:
    """Samples of theta -> I(u^theta)."""
    thetas: List[float] = field(default_factory=list)
    energies: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {'theta': list(self.thetas), 'energy': list(self.energies)}
