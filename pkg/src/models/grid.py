"""Grid, order and field models."""
from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np

MAX_GRID_POINTS = 2 ** 26


@dataclass(frozen=True)
class BoxGrid:
    """Periodic box [-L, L)^N sampled with M points per axis."""
    dim: int
    half_width: float
    points_per_axis: int

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        if self.points_per_axis < 8 or self.points_per_axis % 2:
            raise ValueError(f"points_per_axis must be even and >= 8, got {self.points_per_axis}")
        if self.points_per_axis ** self.dim > MAX_GRID_POINTS:
            raise ValueError(f"grid with {self.points_per_axis}^{self.dim} points is too large")

    @property
    def spacing(self) -> float:
        """Grid spacing h = 2L/M."""
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.points_per_axis ** self.dim

    @property
    def cell_volume(self) -> float:
        """Quadrature weight h^N."""
        return self.spacing ** self.dim

    def axis(self) -> np.ndarray:
        """Centered coordinates -L + j h."""
        return -self.half_width + self.spacing * np.arange(self.points_per_axis)

    def wavenumbers(self) -> np.ndarray:
        """Frequencies pi k / L in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.points_per_axis, d=self.spacing)

    def mode_indices(self) -> np.ndarray:
        """Integer mode numbers k in FFT order."""
        return np.rint(np.fft.fftfreq(self.points_per_axis) * self.points_per_axis).astype(int)

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """Meshgrid of coordinates, one array per axis."""
        ax = self.axis()
        return tuple(np.meshgrid(*([ax] * self.dim), indexing='ij'))

    def radius(self) -> np.ndarray:
        """|x| at every grid point."""
        return np.sqrt(sum(c ** 2 for c in self.coordinates()))

    def frequencies(self) -> Tuple[np.ndarray, ...]:
        """Meshgrid of wavenumbers, one array per axis."""
        k = self.wavenumbers()
        return tuple(np.meshgrid(*([k] * self.dim), indexing='ij'))

    def frequency_modulus(self) -> np.ndarray:
        """|xi| on the frequency lattice."""
        return np.sqrt(sum(k ** 2 for k in self.frequencies()))

    def padded(self, factor: int) -> 'BoxGrid':
        """Box `factor` times wider at the same spacing."""
        return BoxGrid(self.dim, self.half_width * factor, self.points_per_axis * factor)

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'dim': self.dim,
            'half_width': self.half_width,
            'points_per_axis': self.points_per_axis,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'BoxGrid':
        """Create BoxGrid from dictionary."""
        return cls(
            dim=int(data['dim']),
            half_width=float(data['half_width']),
            points_per_axis=int(data['points_per_axis'])
        )


@dataclass(frozen=True)
class FracOrder:
    """Fractional order s in (0, 1)."""
    s: float

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"fractional order must lie in (0, 1), got {self.s}")

    @classmethod
    def coerce(cls, value: Union['FracOrder', float]) -> 'FracOrder':
        """Accept either a FracOrder or a bare float."""
        return value if isinstance(value, FracOrder) else cls(float(value))

    def __float__(self) -> float:
        return self.s


@dataclass(frozen=True, eq=False)
class RealField:
    """Real grid function; values are stored with shape (M,)*N."""
    grid: BoxGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.size != self.grid.size:
            raise ValueError(f"field has {values.size} values, grid has {self.grid.size} points")
        values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def zeros(cls, grid: BoxGrid) -> 'RealField':
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid: BoxGrid, func) -> 'RealField':
        """Sample func(*coordinates) on the grid."""
        return cls(grid, func(*grid.coordinates()))

    def with_values(self, values: np.ndarray) -> 'RealField':
        return RealField(self.grid, values)

    def integrate(self, density: np.ndarray) -> float:
        """Grid quadrature of a density with weight h^N."""
        return float(np.sum(density) * self.grid.cell_volume)

    def dot(self, other: 'RealField') -> float:
        """Discrete L2 pairing."""
        return self.integrate(self.values * other.values)

    def norm(self) -> float:
        """Discrete L2 norm."""
        return float(np.sqrt(self.dot(self)))

    def is_zero(self) -> bool:
        return not np.any(self.values)

    def __add__(self, other: 'RealField') -> 'RealField':
        return self.with_values(self.values + other.values)

    def __sub__(self, other: 'RealField') -> 'RealField':
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar: float) -> 'RealField':
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SpectralCoeffs:
    """Continuum-normalized Fourier coefficients on the frequency lattice."""
    grid: BoxGrid
    coeffs: np.ndarray = field(repr=False)

    def is_hermitian(self, rtol: float = 1e-12) -> bool:
        """Check c(-xi) = conj(c(xi)) on the lattice."""
        flipped = self.coeffs
        for axis in range(self.grid.dim):
            flipped = np.roll(np.flip(flipped, axis=axis), 1, axis=axis)
        scale = max(float(np.max(np.abs(self.coeffs))), 1e-300)
        return bool(np.max(np.abs(flipped - np.conj(self.coeffs))) <= rtol * scale)
