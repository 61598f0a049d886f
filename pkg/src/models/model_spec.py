"""Nonlinearity, potential and model specification models."""
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional

import numpy as np

from .grid import BoxGrid, FracOrder


def critical_exponent(dim: int, s: float) -> float:
    """Fractional critical exponent 2N/(N-2s); infinite when N <= 2s."""
    if dim <= 2.0 * s:
        return float('inf')
    return 2.0 * dim / (dim - 2.0 * s)


class PotentialFamily(Enum):
    """Radial potential families."""
    INVERSE_POWER = "inverse_power"
    GAUSSIAN = "gaussian"
    ZERO = "zero"


@dataclass(frozen=True)
class Nonlinearity:
    """Power nonlinearity g(t) = -m t + a |t|^(p-1) t with an optional cap t0."""
    m: float = 1.0
    a: float = 1.0
    p: float = 3.0
    truncation_cap: Optional[float] = None
    truncated: bool = False

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"m must be positive, got {self.m}")
        if not self.a > 0:
            raise ValueError(f"a must be positive, got {self.a}")
        if not self.p > 1:
            raise ValueError(f"p must exceed 1, got {self.p}")
        if self.truncation_cap is not None and not self.truncation_cap > 0:
            raise ValueError(f"truncation cap must be positive, got {self.truncation_cap}")

    @property
    def zeta(self) -> float:
        """First positive zero of G."""
        return ((self.p + 1.0) * self.m / (2.0 * self.a)) ** (1.0 / (self.p - 1.0))

    @property
    def active_cap(self) -> Optional[float]:
        return self.truncation_cap if self.truncated else None

    def g(self, t):
        """g (or its truncation) evaluated elementwise."""
        t = np.asarray(t, dtype=float)
        at = np.abs(t)
        value = -self.m * t + self.a * at ** (self.p - 1.0) * t
        cap = self.active_cap
        if cap is not None:
            value = np.where(at <= cap, value, 0.0)
        return value

    def G(self, t):
        """Primitive of g vanishing at 0."""
        t = np.asarray(t, dtype=float)
        at = np.abs(t)
        cap = self.active_cap
        if cap is not None:
            at = np.minimum(at, cap)
        return -0.5 * self.m * at ** 2 + self.a * at ** (self.p + 1.0) / (self.p + 1.0)

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'm': self.m,
            'a': self.a,
            'p': self.p,
            'truncation_cap': self.truncation_cap,
            'truncated': self.truncated,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'Nonlinearity':
        """Create Nonlinearity from dictionary."""
        cap = data.get('truncation_cap')
        return cls(
            m=float(data.get('m', 1.0)),
            a=float(data.get('a', 1.0)),
            p=float(data.get('p', 3.0)),
            truncation_cap=None if cap is None else float(cap),
            truncated=bool(data.get('truncated', False))
        )


@dataclass(frozen=True)
class SplitPair:
    """Positive/negative parts g1 = max(g + m t, 0), g2 = g1 - g, oddly extended."""
    nonlinearity: Nonlinearity

    @property
    def m(self) -> float:
        return self.nonlinearity.m

    def g1(self, t):
        t = np.asarray(t, dtype=float)
        at = np.abs(t)
        return np.sign(t) * np.maximum(self.nonlinearity.g(at) + self.m * at, 0.0)

    def g2(self, t):
        return self.g1(t) - self.nonlinearity.g(t)

    def G1(self, t):
        """Closed-form primitive of g1 for the power family."""
        nl = self.nonlinearity
        at = np.abs(np.asarray(t, dtype=float))
        cap = nl.active_cap
        if cap is None:
            return nl.a * at ** (nl.p + 1.0) / (nl.p + 1.0)
        inner = np.minimum(at, cap)
        outer = np.maximum(at ** 2 - cap ** 2, 0.0)
        return nl.a * inner ** (nl.p + 1.0) / (nl.p + 1.0) + 0.5 * self.m * outer

    def G2(self, t):
        """Closed-form primitive of g2 for the power family."""
        t = np.asarray(t, dtype=float)
        return 0.5 * self.m * t ** 2


@dataclass(frozen=True)
class Potential:
    """Radial potential V(|x|) with closed-form virial <grad V(x), x>."""
    family: PotentialFamily = PotentialFamily.INVERSE_POWER
    amplitude: float = 0.5
    beta: float = 1.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError(f"potential amplitude must be nonnegative, got {self.amplitude}")
        if not self.beta > 0:
            raise ValueError(f"potential exponent must be positive, got {self.beta}")

    @classmethod
    def zero(cls) -> 'Potential':
        return cls(PotentialFamily.ZERO, 0.0, 1.0)

    @property
    def is_zero(self) -> bool:
        return self.family == PotentialFamily.ZERO or self.amplitude == 0.0

    def radial(self, r):
        """V as a function of the radius."""
        r = np.asarray(r, dtype=float)
        if self.family == PotentialFamily.INVERSE_POWER:
            return self.amplitude * (1.0 + r ** 2) ** (-self.beta)
        if self.family == PotentialFamily.GAUSSIAN:
            return self.amplitude * np.exp(-self.beta * r ** 2)
        return np.zeros_like(r)

    def virial_radial(self, r):
        """r V'(r), which equals <grad V(x), x> for radial V."""
        r = np.asarray(r, dtype=float)
        if self.family == PotentialFamily.INVERSE_POWER:
            return -2.0 * self.beta * self.radial(r) * r ** 2 / (1.0 + r ** 2)
        if self.family == PotentialFamily.GAUSSIAN:
            return -2.0 * self.beta * r ** 2 * self.radial(r)
        return np.zeros_like(r)

    def values(self, grid: BoxGrid, scale: float = 1.0) -> np.ndarray:
        """V(scale * x) on the grid."""
        return self.radial(scale * grid.radius())

    def virial(self, grid: BoxGrid, scale: float = 1.0) -> np.ndarray:
        """<grad V(y), y> at y = scale * x on the grid."""
        return self.virial_radial(scale * grid.radius())

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'family': self.family.value,
            'amplitude': self.amplitude,
            'beta': self.beta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'Potential':
        """Create Potential from dictionary."""
        return cls(
            family=PotentialFamily(data.get('family', 'inverse_power')),
            amplitude=float(data.get('amplitude', 0.5)),
            beta=float(data.get('beta', 1.0))
        )


@dataclass(frozen=True)
class ModelSpec:
    """Equation data: dimension, order, nonlinearity and potential."""
    dim: int
    order: FracOrder
    nonlinearity: Nonlinearity = field(default_factory=Nonlinearity)
    potential: Potential = field(default_factory=Potential)

    @property
    def s(self) -> float:
        return self.order.s

    @property
    def critical_exponent(self) -> float:
        return critical_exponent(self.dim, self.s)

    @property
    def split(self) -> SplitPair:
        return SplitPair(self.nonlinearity)

    def is_subcritical(self) -> bool:
        return self.nonlinearity.p + 1.0 < self.critical_exponent

    def with_potential(self, potential: Potential) -> 'ModelSpec':
        return replace(self, potential=potential)

    def without_potential(self) -> 'ModelSpec':
        return replace(self, potential=Potential.zero())

    def with_nonlinearity(self, nonlinearity: Nonlinearity) -> 'ModelSpec':
        return replace(self, nonlinearity=nonlinearity)

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'dim': self.dim,
            's': self.s,
            'nonlinearity': self.nonlinearity.to_dict(),
            'potential': self.potential.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'ModelSpec':
        """Create ModelSpec from dictionary."""
        return cls(
            dim=int(data['dim']),
            order=FracOrder(float(data['s'])),
            nonlinearity=Nonlinearity.from_dict(data.get('nonlinearity', {})),
            potential=Potential.from_dict(data.get('potential', {}))
        )


@dataclass
class AssumptionCheck:
    """Outcome of one sampled structural assumption."""
    name: str
    satisfied: bool
    worst_point: float
    margin: float
    detail: str = ""

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'name': self.name,
            'satisfied': self.satisfied,
            'worst_point': self.worst_point,
            'margin': self.margin,
            'detail': self.detail,
        }


@dataclass
class AssumptionReport:
    """Sampled checks of the nonlinearity and potential assumptions."""
    checks: Dict[str, AssumptionCheck]
    v2_quantity: float
    v2_bound: float

    def __getitem__(self, name: str) -> AssumptionCheck:
        return self.checks[name]

    def passed(self, *names: str) -> bool:
        """True when every named check (or all checks) is satisfied."""
        selected = names or tuple(self.checks)
        return all(self.checks[name].satisfied for name in selected)

    def failed(self) -> List[str]:
        return [name for name, check in self.checks.items() if not check.satisfied]

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'checks': {name: check.to_dict() for name, check in self.checks.items()},
            'v2_quantity': self.v2_quantity,
            'v2_bound': self.v2_bound,
        }
