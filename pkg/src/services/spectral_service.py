"""Spectral operators, seminorms and geometric operations on the periodic box."""
import itertools
import logging
from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import fft as sfft
from scipy import integrate, special
from scipy.spatial.distance import pdist

from errors import GridTooLargeError, PreconditionError, QuadratureError, SupportOverflowError
from models import BoxGrid, FracOrder, RealField, SpectralCoeffs

logger = logging.getLogger(__name__)

GAGLIARDO_MAX_POINTS = 4096
DEFAULT_TAIL_TOL = 1e-8
PV_IMAGE_RINGS = 2

Order = Union[FracOrder, float]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere in R^dim."""
    return 2.0 * np.pi ** (dim / 2.0) / special.gamma(dim / 2.0)


def ball_volume(dim: int) -> float:
    return np.pi ** (dim / 2.0) / special.gamma(dim / 2.0 + 1.0)


def quad(func, a, b, **kwargs) -> float:
    """scipy quad that raises QuadratureError instead of warning."""
    result = integrate.quad(func, a, b, limit=kwargs.pop('limit', 200), full_output=1, **kwargs)
    if len(result) > 3:
        raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {result[3]}")
    return float(result[0])


@lru_cache(maxsize=64)
def symbol_power(grid: BoxGrid, exponent: float) -> np.ndarray:
    """|xi|^exponent on the frequency lattice."""
    return _frozen(grid.frequency_modulus() ** exponent)


@lru_cache(maxsize=16)
def _continuum_factor(grid: BoxGrid) -> np.ndarray:
    """Maps raw FFT output to samples of the unitary Fourier transform."""
    sign = (-1.0) ** grid.mode_indices()
    phase = np.ones(grid.shape)
    for axis_sign in np.meshgrid(*([sign] * grid.dim), indexing='ij'):
        phase = phase * axis_sign
    return _frozen(phase * grid.cell_volume * (2.0 * np.pi) ** (-grid.dim / 2.0))


@lru_cache(maxsize=16)
def _derivative_wavenumbers(grid: BoxGrid) -> Tuple[np.ndarray, ...]:
    k = grid.wavenumbers().copy()
    k[grid.points_per_axis // 2] = 0.0
    return tuple(_frozen(a) for a in np.meshgrid(*([k] * grid.dim), indexing='ij'))


@lru_cache(maxsize=16)
def lattice_offsets(grid: BoxGrid) -> Tuple[np.ndarray, ...]:
    """Lattice offsets j h with j in [-M/2, M/2), laid out in FFT order."""
    z = grid.spacing * grid.mode_indices()
    return tuple(_frozen(a) for a in np.meshgrid(*([z] * grid.dim), indexing='ij'))


@lru_cache(maxsize=32)
def normalization_constant(dim: int, s: float, method: str = 'polar') -> float:
    """C(N, s) from 1/C = int (1 - cos z1) / |z|^(N+2s) dz by adaptive quadrature."""
    if dim not in (1, 2, 3):
        raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
    FracOrder(s)

    # int_0^inf (1 - cos t) t^(-1-2s) dt, split at 1
    near = quad(lambda t: 2.0 * np.sinc(t / (2.0 * np.pi)) ** 2 / 4.0, 0.0, 1.0,
                weight='alg', wvar=(1.0 - 2.0 * s, 0.0))
    far = 1.0 / (2.0 * s) - quad(lambda t: t ** (-1.0 - 2.0 * s), 1.0, np.inf,
                                 weight='cos', wvar=1.0)
    radial = near + far

    if method == 'polar':
        # int over the sphere of |theta_1|^(2s)
        if dim == 1:
            angular = 2.0
        elif dim == 2:
            angular = 4.0 * quad(lambda phi: np.cos(phi) ** (2.0 * s), 0.0, np.pi / 2.0)
        else:
            angular = 4.0 * np.pi * quad(lambda th: np.cos(th) ** (2.0 * s) * np.sin(th),
                                         0.0, np.pi / 2.0)
        inverse = radial * angular
    elif method == 'cartesian':
        # integrate out the transverse coordinates first
        exponent = -(dim + 2.0 * s) / 2.0
        if dim == 1:
            transverse = 1.0
        elif dim == 2:
            transverse = 2.0 * quad(lambda y: (1.0 + y * y) ** exponent, 0.0, np.inf)
        else:
            transverse = 2.0 * np.pi * quad(lambda r: r * (1.0 + r * r) ** exponent, 0.0, np.inf)
        inverse = 2.0 * radial * transverse
    else:
        raise ValueError(f"unknown quadrature method '{method}'")

    if not inverse > 0:
        raise QuadratureError(f"non-positive normalization integral for N={dim}, s={s}")
    return 1.0 / inverse


@lru_cache(maxsize=16)
def cube_exterior_integral(dim: int, s: float) -> float:
    """int over R^N minus [-1,1]^N of |y|^(-N-2s) dy."""
    exponent = -s - dim / 2.0
    if dim == 1:
        face = 1.0
    elif dim == 2:
        face = quad(lambda a: (1.0 + a * a) ** exponent, -1.0, 1.0)
    else:
        face = quad(lambda a: quad(lambda b: (1.0 + a * a + b * b) ** exponent, -1.0, 1.0),
                    -1.0, 1.0)
    return 2.0 * dim * face / (2.0 * s)


@lru_cache(maxsize=16)
def _pv_weights(grid: BoxGrid, s: float, cutoff: float) -> Tuple[np.ndarray, float, float]:
    """Periodized singular weights h^N |z + 2Ln|^(-N-2s), excluded volume, far-field constant."""
    N = grid.dim
    L = grid.half_width
    a = N + 2.0 * s
    offsets = lattice_offsets(grid)
    radius = np.sqrt(sum(z ** 2 for z in offsets))
    excluded = radius < cutoff
    excluded[(0,) * N] = True

    with np.errstate(divide='ignore'):
        weights = np.where(excluded, 0.0, radius ** (-a))

    if N == 1:
        z = offsets[0]
        weights = weights + (2.0 * L) ** (-a) * (special.zeta(a, 1.0 + z / (2.0 * L))
                                                 + special.zeta(a, 1.0 - z / (2.0 * L)))
        far = 0.0
    else:
        for n in itertools.product(range(-PV_IMAGE_RINGS, PV_IMAGE_RINGS + 1), repeat=N):
            if not any(n):
                continue
            shifted = sum((z + 2.0 * L * k) ** 2 for z, k in zip(offsets, n))
            weights = weights + shifted ** (-a / 2.0)
        far = ((2 * PV_IMAGE_RINGS + 1) * L) ** (-2.0 * s) * cube_exterior_integral(N, s)

    weights = weights * grid.cell_volume
    excluded_volume = float(np.count_nonzero(excluded)) * grid.cell_volume
    return _frozen(weights), excluded_volume, far


def sharp_sobolev_constant(dim: int, s: float) -> float:
    """Best constant S in T(u) >= S ||u||_{2*}^2 on R^N (requires 2s < N)."""
    if not 2.0 * s < dim:
        raise ValueError(f"Sobolev constant needs 2s < N, got N={dim}, s={s}")
    return (2.0 ** (2.0 * s) * np.pi ** s
            * special.gamma((dim + 2.0 * s) / 2.0) / special.gamma((dim - 2.0 * s) / 2.0)
            * (special.gamma(dim / 2.0) / special.gamma(dim)) ** (2.0 * s / dim))


class SpectralService:
    """Fourier-side operators on periodic box fields."""

    def __init__(self, workers: int = 1, tail_tol: float = DEFAULT_TAIL_TOL):
        self.workers = workers
        self.tail_tol = tail_tol

    # transforms

    def _fft(self, values: np.ndarray) -> np.ndarray:
        return sfft.fftn(values, workers=self.workers)

    def _ifft(self, coeffs: np.ndarray) -> np.ndarray:
        return sfft.ifftn(coeffs, workers=self.workers).real

    def forward_transform(self, u: RealField) -> SpectralCoeffs:
        """Samples of the unitary Fourier transform on the lattice pi k / L."""
        return SpectralCoeffs(u.grid, self._fft(u.values) * _continuum_factor(u.grid))

    def inverse_transform(self, c: SpectralCoeffs) -> RealField:
        return RealField(c.grid, self._ifft(c.coeffs / _continuum_factor(c.grid)))

    def apply_symbol(self, u: RealField, symbol: np.ndarray) -> RealField:
        """F^-1(symbol * F u)."""
        if u.is_zero():
            return u
        return u.with_values(self._ifft(symbol * self._fft(u.values)))

    # operators

    def frac_laplacian(self, u: RealField, s: Order) -> RealField:
        s = FracOrder.coerce(s)
        return self.apply_symbol(u, symbol_power(u.grid, 2.0 * s.s))

    def gradient(self, u: RealField) -> Tuple[RealField, ...]:
        F = self._fft(u.values)
        return tuple(u.with_values(self._ifft(1j * k * F)) for k in _derivative_wavenumbers(u.grid))

    def radial_derivative(self, u: RealField) -> RealField:
        """<x, grad u> with the centered coordinate."""
        coords = u.grid.coordinates()
        return u.with_values(sum(x * d.values for x, d in zip(coords, self.gradient(u))))

    def kinetic_energy(self, u: RealField, s: Order) -> float:
        """T(u) = int |xi|^2s |u_hat|^2 by discrete Parseval."""
        s = FracOrder.coerce(s)
        F = self._fft(u.values)
        sigma = symbol_power(u.grid, 2.0 * s.s)
        return float(np.sum(sigma * np.abs(F) ** 2) * u.grid.cell_volume / u.grid.size)

    def frac_laplacian_pv(self, u: RealField, s: Order, cutoff: Optional[float] = None) -> RealField:
        """Principal-value singular integral with periodized weights.

        Lattice offsets closer than `cutoff` are replaced by the second-order
        Taylor term over the equal-volume ball, which is O(h^(2-2s)). Periodic
        images beyond the nearest rings enter through the cube-exterior integral.
        """
        s = FracOrder.coerce(s)
        grid = u.grid
        if cutoff is None:
            cutoff = 0.5 * grid.spacing
        if not cutoff > 0:
            raise PreconditionError(f"principal-value cutoff must be positive, got {cutoff}")
        if u.is_zero():
            return u

        N = grid.dim
        weights, excluded_volume, far = _pv_weights(grid, s.s, float(cutoff))
        values = u.values
        F = self._fft(values)
        convolved = self._ifft(self._fft(weights) * F)
        lattice = np.sum(weights) * values - convolved

        rho = (excluded_volume / ball_volume(N)) ** (1.0 / N)
        laplace = -self._ifft(symbol_power(grid, 2.0) * F)
        local = -0.5 * (laplace / N) * sphere_area(N) * rho ** (2.0 - 2.0 * s.s) / (2.0 - 2.0 * s.s)

        tail = (values - np.mean(values)) * far
        return u.with_values(normalization_constant(N, s.s) * (lattice + local + tail))

    # seminorms and norms

    def gagliardo_seminorm_sq(self, u: RealField, s: Order) -> float:
        """Whole-space Gagliardo double integral by pair quadrature, u = 0 outside the box."""
        s = FracOrder.coerce(s)
        grid = u.grid
        if grid.size > GAGLIARDO_MAX_POINTS:
            raise GridTooLargeError(
                f"pair quadrature needs M^N <= {GAGLIARDO_MAX_POINTS}, got {grid.size}")
        if u.is_zero():
            return 0.0

        N = grid.dim
        a = N + 2.0 * s.s
        weight = grid.cell_volume
        points = np.stack([c.ravel() for c in grid.coordinates()], axis=1)
        values = u.values.ravel()

        distance = pdist(points)
        jumps = pdist(values[:, None], 'sqeuclidean')
        pairs = 2.0 * np.sum(jumps * distance ** (-a)) * weight ** 2

        # diagonal cells by the first-order Taylor term
        rho = (weight / ball_volume(N)) ** (1.0 / N)
        grad_sq = sum(d.values ** 2 for d in self.gradient(u))
        diagonal = (np.sum(grad_sq) * weight / N
                    * sphere_area(N) * rho ** (2.0 - 2.0 * s.s) / (2.0 - 2.0 * s.s))

        exterior = self._box_exterior(grid, points, s.s)
        outside = 2.0 * np.sum(values ** 2 * exterior) * weight
        return float(pairs + diagonal + outside)

    def _box_exterior(self, grid: BoxGrid, points: np.ndarray, s: float) -> np.ndarray:
        """int over y outside the cell-covered box of |x - y|^(-N-2s), per point."""
        h = grid.spacing
        lo = -grid.half_width - 0.5 * h
        hi = grid.half_width - 0.5 * h
        if grid.dim == 1:
            x = points[:, 0]
            return ((x - lo) ** (-2.0 * s) + (hi - x) ** (-2.0 * s)) / (2.0 * s)

        if grid.dim == 2:
            phi = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
            directions = np.stack([np.cos(phi), np.sin(phi)], axis=1)
            weights = np.full(phi.size, 2.0 * np.pi / phi.size)
        else:
            nodes, gl = np.polynomial.legendre.leggauss(48)
            phi = np.linspace(0.0, 2.0 * np.pi, 96, endpoint=False)
            ct, ph = np.meshgrid(nodes, phi, indexing='ij')
            st = np.sqrt(1.0 - ct ** 2)
            directions = np.stack([(st * np.cos(ph)).ravel(), (st * np.sin(ph)).ravel(),
                                   ct.ravel()], axis=1)
            weights = np.repeat(gl, phi.size) * (2.0 * np.pi / phi.size)

        result = np.empty(points.shape[0])
        with np.errstate(divide='ignore', invalid='ignore'):
            for start in range(0, points.shape[0], 256):
                chunk = points[start:start + 256]
                hit = np.full((chunk.shape[0], directions.shape[0]), np.inf)
                for axis in range(grid.dim):
                    d = directions[:, axis][None, :]
                    x = chunk[:, axis][:, None]
                    step = np.where(d > 0, (hi - x) / d, np.where(d < 0, (lo - x) / d, np.inf))
                    hit = np.minimum(hit, step)
                result[start:start + 256] = (hit ** (-2.0 * s)) @ weights / (2.0 * s)
        return result

    def l2_norm(self, u: RealField) -> float:
        return u.norm()

    def lq_norm(self, u: RealField, q: float) -> float:
        return float((np.sum(np.abs(u.values) ** q) * u.grid.cell_volume) ** (1.0 / q))

    def hs_norm(self, u: RealField, s: Order) -> float:
        return float(np.sqrt(u.dot(u) + self.kinetic_energy(u, s)))

    def tail_mass(self, u: RealField, radius: float) -> float:
        """||u||^2 outside |x| > radius relative to ||u||^2."""
        total = float(np.sum(u.values ** 2))
        if total == 0.0:
            return 0.0
        return float(np.sum(u.values[u.grid.radius() > radius] ** 2) / total)

    def _cube_tail(self, u: RealField, half_side: float) -> float:
        total = float(np.sum(u.values ** 2))
        if total == 0.0:
            return 0.0
        inf_norm = np.max(np.abs(np.stack(u.grid.coordinates())), axis=0)
        return float(np.sum(u.values[inf_norm > half_side] ** 2) / total)

    # geometry

    def max_dilation(self, u: RealField, tail_tol: Optional[float] = None) -> float:
        """Largest factor the dilation support guard accepts for u."""
        tol = self.tail_tol if tail_tol is None else tail_tol
        total = float(np.sum(u.values ** 2))
        if total == 0.0:
            return float('inf')
        inf_norm = np.max(np.abs(np.stack(u.grid.coordinates())), axis=0).ravel()
        order = np.argsort(inf_norm, kind='stable')[::-1]
        tail = np.cumsum(u.values.ravel()[order] ** 2) / total
        exceeding = np.nonzero(tail > tol)[0]
        if exceeding.size == 0:
            return float('inf')
        rho = float(inf_norm[order[exceeding[0]]])
        if rho == 0.0:
            return float('inf')
        return u.grid.half_width / rho * (1.0 - 1e-9)

    def dilate(self, u: RealField, theta: float, tail_tol: Optional[float] = None) -> RealField:
        """u(x / theta) by band-limited interpolation."""
        if not theta > 0:
            raise PreconditionError(f"dilation factor must be positive, got {theta}")
        if theta == 1.0 or u.is_zero():
            return u
        grid = u.grid
        L = grid.half_width
        tol = self.tail_tol if tail_tol is None else tail_tol
        if theta > 1.0:
            tail = self._cube_tail(u, L / theta)
            if tail > tol:
                raise SupportOverflowError(
                    f"dilation by {theta:.6g} pushes tail mass {tail:.3e} out of the box", tail)

        targets = grid.axis() / theta
        basis = np.exp(1j * np.outer(targets + L, grid.wavenumbers())) / grid.points_per_axis
        values = self._fft(u.values)
        for axis in range(grid.dim):
            values = np.moveaxis(np.tensordot(basis, values, axes=([1], [axis])), 0, axis)
        values = values.real

        if theta < 1.0:
            inf_norm = np.max(np.abs(np.stack(grid.coordinates())), axis=0)
            values = np.where(inf_norm >= theta * L, 0.0, values)
        return u.with_values(values)

    def translate(self, u: RealField, y: Sequence[float]) -> RealField:
        """u(x - y): index roll for lattice shifts, Fourier phase otherwise."""
        grid = u.grid
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if y.size != grid.dim:
            raise ValueError(f"shift has {y.size} components, grid has dimension {grid.dim}")
        steps = y / grid.spacing
        if np.allclose(steps, np.rint(steps), rtol=0.0, atol=1e-12):
            return u.with_values(np.roll(u.values, tuple(int(k) for k in np.rint(steps)),
                                         axis=tuple(range(grid.dim))))
        phase = np.exp(-1j * sum(k * shift for k, shift in zip(grid.frequencies(), y)))
        return self.apply_symbol(u, phase)

    def _shell_index(self, grid: BoxGrid, shell_width: Optional[float]) -> np.ndarray:
        if shell_width is None:
            index = np.arange(grid.points_per_axis) - grid.points_per_axis // 2
            mesh = np.meshgrid(*([index] * grid.dim), indexing='ij')
            return sum(m ** 2 for m in mesh)
        return np.rint(grid.radius() / shell_width).astype(int)

    def radial_symmetrize(self, u: RealField, shell_width: Optional[float] = None) -> RealField:
        """Average over radius shells.

        The default shells are exact lattice spheres (equal integer |index|^2): a
        centered radial field is then a fixed point to roundoff, which binning
        cannot give. Pass `shell_width=grid.spacing / 2` for radius bins of h/2;
        both variants are idempotent L2 projections.
        """
        shells = self._shell_index(u.grid, shell_width).ravel()
        _, inverse, counts = np.unique(shells, return_inverse=True, return_counts=True)
        means = np.bincount(inverse, weights=u.values.ravel()) / counts
        return u.with_values(means[inverse])

    def shell_average(self, u: RealField, width: Optional[float] = None
                      ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Shell centers, mean |u| and relative spread per occupied shell."""
        grid = u.grid
        width = grid.spacing if width is None else width
        bins = np.floor(grid.radius().ravel() / width).astype(int)
        magnitude = np.abs(u.values.ravel())
        counts = np.bincount(bins)
        occupied = counts > 0
        sums = np.bincount(bins, weights=magnitude)
        squares = np.bincount(bins, weights=magnitude ** 2)
        means = sums[occupied] / counts[occupied]
        variance = np.maximum(squares[occupied] / counts[occupied] - means ** 2, 0.0)
        with np.errstate(divide='ignore', invalid='ignore'):
            spread = np.where(means > 0, np.sqrt(variance) / means, 0.0)
        centers = (np.nonzero(occupied)[0] + 0.5) * width
        return centers, means, spread

    def pad_field(self, u: RealField, factor: int) -> RealField:
        """Embed u at the center of a box `factor` times wider, zero elsewhere."""
        if factor < 1:
            raise ValueError(f"padding factor must be at least 1, got {factor}")
        if factor == 1:
            return u
        grid = u.grid
        big = grid.padded(factor)
        M = grid.points_per_axis
        start = (big.points_per_axis - M) // 2
        values = np.zeros(big.shape)
        values[tuple(slice(start, start + M) for _ in range(grid.dim))] = u.values
        return RealField(big, values)

    def central_half_mask(self, grid: BoxGrid, half_side: float) -> np.ndarray:
        inf_norm = np.max(np.abs(np.stack(grid.coordinates())), axis=0)
        return inf_norm <= half_side

    def pohozaev_pointwise_residual(self, u: RealField, s: Order, pad: int = 1,
                                    relative: bool = False) -> float:
        """sup over the central half-box of (-D)^s<x,grad u> - 2s(-D)^s u - <x,grad (-D)^s u>.

        On a periodic box the residual is set by periodic images of the slowly
        decaying (-D)^s u; `pad` widens the box at fixed spacing to push them away.
        """
        s = FracOrder.coerce(s)
        if u.is_zero():
            return 0.0
        wide = self.pad_field(u, pad)
        lap = self.frac_laplacian(wide, s)
        left = self.frac_laplacian(self.radial_derivative(wide), s)
        right = self.radial_derivative(lap)
        residual = left.values - 2.0 * s.s * lap.values - right.values

        mask = self.central_half_mask(wide.grid, 0.5 * u.grid.half_width)
        sup = float(np.max(np.abs(residual[mask])))
        if relative:
            scale = float(np.max(np.abs(lap.values[mask])))
            return sup / scale if scale > 0 else 0.0
        return sup
