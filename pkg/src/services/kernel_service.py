"""Resolvent kernel K = F^-1(1/(1+|xi|^2s)): profiles, decay reports and convolution."""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Optional, Sequence

import numpy as np
from scipy import fft as sfft
from scipy import integrate

from errors import PreconditionError, RadiusCoverageError
from models import BoxGrid, FracOrder, KernelDecayReport, KernelMethod, KernelProfile, RealField

from .spectral_service import SpectralService, lattice_offsets, quad, sphere_area, symbol_power

logger = logging.getLogger(__name__)

Q_IN_WINDOW = 1.5
Q_OUTSIDE = 0.4
NEAR_RADIUS = 0.1
MIN_R_MAX = 8.0


class KernelService:
    """Computes and checks the resolvent kernel."""

    def __init__(self, spectral: SpectralService, workers: int = 1):
        self.spectral = spectral
        self.workers = workers

    def convolve_kernel(self, u: RealField, s) -> RealField:
        """F^-1(F u / (1 + |xi|^2s))."""
        s = FracOrder.coerce(s)
        return self.spectral.apply_symbol(u, 1.0 / (1.0 + symbol_power(u.grid, 2.0 * s.s)))

    def resolvent_apply(self, u: RealField, s) -> RealField:
        """((-D)^s + I) u."""
        return u + self.spectral.frac_laplacian(u, s)

    def kernel_value_1d(self, r: float, s: float) -> float:
        """K(r) = (1/pi) int_0^inf cos(r rho) / (1 + rho^2s) d rho for N = 1."""
        if not r > 0:
            raise PreconditionError(f"oscillatory quadrature needs r > 0, got {r}")
        value = quad(lambda rho: 1.0 / (1.0 + rho ** (2.0 * s)), 0.0, np.inf,
                     weight='cos', wvar=r, limlst=200, limit=500)
        return value / np.pi

    def kernel_profile(self, dim: int, s, grid: Optional[BoxGrid] = None,
                       radii: Optional[Sequence[float]] = None,
                       r_max: Optional[float] = None) -> KernelProfile:
        """Quadrature profile on `radii` (N = 1) or shell-averaged grid profile on `grid`."""
        s = FracOrder.coerce(s)
        if dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
        if grid is None:
            if dim != 1 or radii is None:
                raise ValueError("radii quadrature is only available for N = 1; pass a grid")
            radii = np.asarray(radii, dtype=float)
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                values = list(pool.map(lambda r: self.kernel_value_1d(float(r), s.s), radii))
            logger.debug(f"Kernel quadrature at {radii.size} radii, s={s.s}")
            return KernelProfile(s, dim, radii, np.array(values), KernelMethod.QUADRATURE_1D)

        if grid.dim != dim:
            raise ValueError(f"grid dimension {grid.dim} does not match N={dim}")
        lattice = self._lattice(grid, s)
        index = np.rint(np.stack(lattice_offsets(grid)) / grid.spacing).astype(int)
        shells = np.sum(index ** 2, axis=0).ravel()
        limit = grid.half_width / 2.0 if r_max is None else min(r_max, grid.half_width / 2.0)
        keep = (shells > 0) & (np.sqrt(shells) * grid.spacing <= limit)
        keys, inverse, counts = np.unique(shells[keep], return_inverse=True, return_counts=True)
        flat = lattice.ravel()[keep]
        means = np.bincount(inverse, weights=flat) / counts
        squares = np.bincount(inverse, weights=flat ** 2) / counts
        spread = np.sqrt(np.maximum(squares - means ** 2, 0.0)) / np.abs(means)
        return KernelProfile(s, dim, np.sqrt(keys) * grid.spacing, means,
                             KernelMethod.GRID_FFT, spread)

    def _lattice(self, grid: BoxGrid, s: FracOrder) -> np.ndarray:
        """Kernel samples on the grid in FFT order (offset 0 first)."""
        symbol = 1.0 / (1.0 + symbol_power(grid, 2.0 * s.s))
        return sfft.ifftn(symbol, workers=self.spectral.workers).real / grid.cell_volume

    def kernel_mass(self, dim: int, s, r_max: float, grid: Optional[BoxGrid] = None) -> float:
        """int K over |x| <= r_max: sine quadrature for N = 1, lattice sum on `grid` otherwise.

        For N = 1, 2 int_0^R K = (2/pi) int_0^inf sin(R rho) / (rho (1 + rho^2s)) d rho.
        """
        s = FracOrder.coerce(s)
        if grid is None:
            if dim != 1:
                raise ValueError("mass quadrature is only available for N = 1; pass a grid")
            near = quad(lambda rho: r_max * np.sinc(r_max * rho / np.pi) / (1.0 + rho ** (2.0 * s.s)),
                        0.0, 1.0, limit=500)
            far = quad(lambda rho: 1.0 / (rho * (1.0 + rho ** (2.0 * s.s))), 1.0, np.inf,
                       weight='sin', wvar=r_max, limlst=200, limit=500)
            return 2.0 * (near + far) / np.pi
        if grid.dim != dim:
            raise ValueError(f"grid dimension {grid.dim} does not match N={dim}")
        radius = np.sqrt(sum(a ** 2 for a in lattice_offsets(grid)))
        lattice = self._lattice(grid, s)
        return float(np.sum(lattice[radius <= r_max]) * grid.cell_volume)

    def kernel_grid(self, dim: int, r_max: float, spacing: float = NEAR_RADIUS) -> BoxGrid:
        """Box wide enough that periodic images stay small out to r_max."""
        half_width = 3.0 * r_max
        points = int(np.ceil(2.0 * half_width / spacing))
        points += points % 2
        return BoxGrid(dim, half_width, points)

    def profile_mass(self, profile: KernelProfile, r_max: Optional[float] = None) -> float:
        """int K over the ball |x| <= r_max from the radial samples."""
        return self._radial_integral(profile, profile.values, r_max)

    def _radial_integral(self, profile: KernelProfile, density: np.ndarray,
                         r_max: Optional[float]) -> float:
        r = profile.radii
        mask = r <= (profile.r_max if r_max is None else r_max)
        weight = 2.0 if profile.dim == 1 else sphere_area(profile.dim)
        return float(integrate.simpson(weight * density[mask] * r[mask] ** (profile.dim - 1),
                                       x=r[mask]))

    def _window(self, profile: KernelProfile, q: float, weight_exponent: float) -> Dict[str, float]:
        density = (profile.radii ** weight_exponent * np.abs(profile.values)) ** q
        full = self._radial_integral(profile, density, profile.r_max)
        half = self._radial_integral(profile, density, profile.r_max / 2.0)
        return {
            'q': q,
            'r_max': full,
            'half': half,
            'relative_change': abs(full - half) / abs(full) if full else float('inf'),
        }

    def kernel_decay_report(self, profile: KernelProfile) -> KernelDecayReport:
        """Weighted sup norms, gradient bound, tail exponent and L^q windows."""
        r, K = profile.radii, profile.values
        if r[0] > NEAR_RADIUS * (1.0 + 1e-9) or profile.r_max < MIN_R_MAX:
            raise RadiusCoverageError(
                f"profile covers [{r[0]:.3g}, {profile.r_max:.3g}], needs [{NEAR_RADIUS}, >= {MIN_R_MAX}]")
        N, s = profile.dim, profile.s

        far = r >= 1.0
        near = r <= 1.0
        slope = np.gradient(K, r)
        window = (max(2.0, profile.r_max / 4.0), profile.r_max)
        tail = (r >= window[0]) & (r <= window[1])
        exponent = float(np.polyfit(np.log(r[tail]), np.log(np.abs(K[tail])), 1)[0])

        report = KernelDecayReport(
            far_weighted_sup=float(np.max(r[far] ** (N + 2.0 * s) * np.abs(K[far]))),
            near_weighted_sup=float(np.max(r[near] ** (N - 2.0 * s) * np.abs(K[near]))),
            gradient_weighted_sup=float(np.max(np.abs(slope[far]) * r[far] ** (N + 1.0 + 2.0 * s))),
            tail_exponent=exponent,
            tail_target=-(N + 2.0 * s),
            tail_window=window,
            lq={
                'plain': self._window(profile, Q_IN_WINDOW, 0.0),
                'weighted': self._window(profile, Q_IN_WINDOW, s),
                'outside': self._window(profile, Q_OUTSIDE, 0.0),
            }
        )
        logger.info(f"Kernel tail exponent {exponent:.4f} (target {report.tail_target:.4f})")
        return report
