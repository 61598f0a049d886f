"""Resolvent kernel models."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

import numpy as np

from .grid import FracOrder


class KernelMethod(Enum):
    """How a kernel profile was computed."""
    QUADRATURE_1D = "quadrature_1d"
    GRID_FFT = "grid_fft"


@dataclass
class KernelProfile:
    """Radial samples of the resolvent kernel K = F^-1(1/(1+|xi|^2s)).

    Only the sampling is enforced here. Positivity and monotonicity are checked
    by validate_kernel_profile, so grid profiles with numerical rises are reported
    rather than rejected.
    """
    order: FracOrder
    dim: int
    radii: np.ndarray
    values: np.ndarray
    method: KernelMethod
    shell_spread: Optional[np.ndarray] = None

    def __post_init__(self):
        self.radii = np.asarray(self.radii, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.radii.shape != self.values.shape:
            raise ValueError("radii and values must have the same length")
        if np.any(np.diff(self.radii) <= 0):
            raise ValueError("kernel radii must be strictly increasing")

    @property
    def s(self) -> float:
        return self.order.s

    @property
    def r_max(self) -> float:
        return float(self.radii[-1])

    def rows(self) -> List[dict]:
        """Tabular view for CSV output."""
        return [{'r': float(r), 'K': float(k), 'method': self.method.value}
                for r, k in zip(self.radii, self.values)]


@dataclass
class KernelDecayReport:
    """Weighted sup norms, tail fit and integrability windows of a profile."""
    far_weighted_sup: float
    near_weighted_sup: float
    gradient_weighted_sup: float
    tail_exponent: float
    tail_target: float
    tail_window: tuple
    lq: Dict[str, Dict[str, float]] = field(default_factory=dict)

    @property
    def tail_relative_error(self) -> float:
        return abs(self.tail_exponent - self.tail_target) / abs(self.tail_target)

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'far_weighted_sup': self.far_weighted_sup,
            'near_weighted_sup': self.near_weighted_sup,
            'gradient_weighted_sup': self.gradient_weighted_sup,
            'tail_exponent': self.tail_exponent,
            'tail_target': self.tail_target,
            'tail_window': list(self.tail_window),
            'tail_relative_error': self.tail_relative_error,
            'lq': self.lq,
        }
