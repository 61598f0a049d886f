"""Functionals, identities, manifold projections and dilation paths."""
import logging
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy import optimize

from errors import (PathConstructionError, PreconditionError, ProfileTooLargeError,
                    ProjectionError, SupportOverflowError)
from models import (BoxGrid, CriticalDiagnostics, EnergyBreakdown, MinimizationTrace, ModelSpec,
                    NonAttainmentChain, PathSpec, PohozaevReport, RealField, ThetaProfile)

from .spectral_service import SpectralService

logger = logging.getLogger(__name__)

THETA_MIN = 1e-2
THETA_CAP = 1e3
THETA_SCAN = 240
THETA_STEP = 1e-4
PLATEAU_STEP = 0.25
MAX_PATH_DOUBLINGS = 12
PROJECTION_TOL = 1e-4
FREE_PROJECTION_TOL = 1e-6
POLISH_WIDTHS = (0.02, 0.05, 0.2)


class EnergyService:
    """Evaluates I, I_lambda and the Pohozaev identity on grid fields."""

    def __init__(self, spectral: SpectralService):
        self.spectral = spectral

    # functionals

    def energy(self, u: RealField, model: ModelSpec, lam: float = 1.0) -> EnergyBreakdown:
        grid = u.grid
        values = u.values
        split = model.split
        breakdown = EnergyBreakdown(
            kinetic=self.spectral.kinetic_energy(u, model.order),
            potential=u.integrate(model.potential.values(grid) * values ** 2),
            G_total=u.integrate(model.nonlinearity.G(values)),
            G1=u.integrate(split.G1(values)),
            G2=u.integrate(split.G2(values)),
            virial=u.integrate(model.potential.virial(grid) * values ** 2),
            lam=lam
        )
        terms = (breakdown.kinetic, breakdown.potential, breakdown.G_total, breakdown.virial)
        if not np.all(np.isfinite(terms)):
            raise ValueError(f"non-finite energy terms: {terms}")
        return breakdown

    def gradient_residual(self, u: RealField, model: ModelSpec,
                          lam: float = 1.0) -> Tuple[RealField, float]:
        """r = (-D)^s u + V u + g2(u) - lam g1(u) and its discrete L2 norm."""
        split = model.split
        values = u.values
        r = (self.spectral.frac_laplacian(u, model.order).values
             + model.potential.values(u.grid) * values
             + split.g2(values) - lam * split.g1(values))
        residual = u.with_values(r)
        return residual, residual.norm()

    def pohozaev_report(self, u: RealField, model: ModelSpec, lam: float = 1.0) -> PohozaevReport:
        """Terms of the Pohozaev identity for I_lambda (lam = 1 gives I)."""
        e = self.energy(u, model, lam)
        N, s = model.dim, model.s
        return PohozaevReport(
            kinetic_term=0.5 * (N - 2.0 * s) * e.kinetic,
            potential_term=0.5 * N * e.potential,
            virial_term=0.5 * e.virial,
            rhs=N * (lam * e.G1 - e.G2)
        )

    def critical_diagnostics(self, u: RealField, model: ModelSpec, lam: float,
                             level: float) -> CriticalDiagnostics:
        e = self.energy(u, model, lam)
        split = model.split
        values = u.values
        return CriticalDiagnostics(
            alpha=e.kinetic,
            beta=e.potential,
            eta=e.virial,
            gamma1=e.G1,
            gamma2=e.G2,
            delta1=u.integrate(split.g1(values) * values),
            delta2=u.integrate(split.g2(values) * values),
            lam=lam,
            level=level,
            dim=model.dim,
            s=model.s
        )

    def energy_on_P(self, u: RealField, model: ModelSpec) -> float:
        """(s/N) T(u) - eta(u) / (2N), the value of I on the Pohozaev set."""
        report = self.pohozaev_report(u, model)
        if not report.residual_rel < 1e-3:
            raise PreconditionError(
                f"field is off the Pohozaev set (residual_rel={report.residual_rel:.3e})")
        e = self.energy(u, model)
        return model.s * e.kinetic / model.dim - e.virial / (2.0 * model.dim)

    # projections

    def _require_positive_G(self, u: RealField, model: ModelSpec) -> float:
        G = u.integrate(model.nonlinearity.G(u.values))
        if not G > 0:
            raise PreconditionError(f"projection needs int G(u) > 0, got {G:.6g}")
        return G

    def _free_residual(self, u: RealField, model: ModelSpec, theta: float,
                       tail_tol: Optional[float]) -> float:
        return self.pohozaev_report(self.spectral.dilate(u, theta, tail_tol), model).free_residual

    def project_to_P0(self, u: RealField, model: ModelSpec,
                      tail_tol: Optional[float] = None) -> Tuple[float, RealField]:
        """Dilation onto the free Pohozaev set, closed form then polished on the grid."""
        G = self._require_positive_G(u, model)
        N, s = model.dim, model.s
        T = self.spectral.kinetic_energy(u, model.order)
        theta = ((N - 2.0 * s) * T / (2.0 * N * G)) ** (1.0 / (2.0 * s))

        def residual(t):
            return self._free_residual(u, model, t, tail_tol)

        theta = self._polish(residual, theta, self.spectral.max_dilation(u, tail_tol),
                             lambda: self._profile_around(u, model, theta))
        z = self.spectral.dilate(u, theta, tail_tol)
        report = self.pohozaev_report(z, model)
        if not report.free_residual_rel < FREE_PROJECTION_TOL:
            raise ProjectionError(
                f"P0 projection at theta={theta:.6g} leaves free_residual_rel="
                f"{report.free_residual_rel:.3e}", self._profile_around(u, model, theta))
        logger.debug(f"P0 projection: theta={theta:.10g}")
        return theta, z

    def _scaled_energy(self, u: RealField, model: ModelSpec):
        """theta -> I(u^theta) from T, int G and V(theta x) on the original samples."""
        N, s = model.dim, model.s
        T = self.spectral.kinetic_energy(u, model.order)
        G = u.integrate(model.nonlinearity.G(u.values))
        density = u.values ** 2

        def scaled(theta: float) -> float:
            potential = u.integrate(model.potential.values(u.grid, theta) * density)
            return float(theta ** (N - 2.0 * s) * T / 2.0
                         + theta ** N * potential / 2.0 - theta ** N * G)
        return scaled

    def theta_profile(self, u: RealField, model: ModelSpec,
                      thetas: Iterable[float]) -> ThetaProfile:
        """theta -> I(u^theta) by the exact scaling laws, without resampling."""
        scaled = self._scaled_energy(u, model)
        profile = ThetaProfile()
        for theta in thetas:
            profile.thetas.append(float(theta))
            profile.energies.append(scaled(theta))
        return profile

    @staticmethod
    def _slope(scaled, theta: float) -> float:
        step = THETA_STEP * theta
        return (scaled(theta + step) - scaled(theta - step)) / (2.0 * step)

    def project_to_P(self, u: RealField, model: ModelSpec,
                     tail_tol: Optional[float] = None) -> Tuple[float, RealField]:
        """Dilation onto the Pohozaev set: root of d/dtheta I(u^theta)."""
        self._require_positive_G(u, model)
        theta_max = min(self.spectral.max_dilation(u, tail_tol), THETA_CAP)
        thetas = np.geomspace(THETA_MIN, max(theta_max, THETA_MIN * 1.01), THETA_SCAN)
        scaled = self._scaled_energy(u, model)
        slopes = np.array([self._slope(scaled, t) for t in thetas])

        crossings = np.nonzero((slopes[:-1] > 0) & (slopes[1:] <= 0))[0]
        if crossings.size == 0:
            profile = self.theta_profile(u, model, thetas)
            raise ProjectionError(
                f"d/dtheta I(u^theta) has no sign change on [{THETA_MIN}, {theta_max:.4g}]",
                profile.to_dict())
        k = int(crossings[0])
        theta = optimize.brentq(lambda t: self._slope(scaled, t),
                                thetas[k], thetas[k + 1], xtol=1e-14, rtol=1e-12)

        def residual(t):
            return self.pohozaev_report(self.spectral.dilate(u, t, tail_tol), model).residual

        theta = self._polish(residual, theta, self.spectral.max_dilation(u, tail_tol),
                             lambda: self._profile_around(u, model, theta))
        z = self.spectral.dilate(u, theta, tail_tol)
        report = self.pohozaev_report(z, model)
        if not report.residual_rel < PROJECTION_TOL:
            raise ProjectionError(
                f"P projection at theta={theta:.6g} leaves residual_rel={report.residual_rel:.3e}",
                self._profile_around(u, model, theta))
        logger.debug(f"P projection: theta={theta:.10g}")
        return theta, z

    def _profile_around(self, u: RealField, model: ModelSpec, theta: float) -> dict:
        thetas = np.geomspace(max(THETA_MIN, 0.5 * theta), 2.0 * theta, 41)
        return self.theta_profile(u, model, thetas).to_dict()

    def _polish(self, residual, theta: float, theta_max: float, profile=None) -> float:
        """Refine theta against the resampled residual inside a widening bracket."""
        for width in POLISH_WIDTHS:
            lo = theta * (1.0 - width)
            hi = min(theta * (1.0 + width), theta_max)
            if not hi > theta:
                hi = theta
            try:
                f_lo, f_hi = residual(lo), residual(hi)
            except SupportOverflowError:
                continue
            if f_lo == 0.0:
                return lo
            if f_hi == 0.0:
                return hi
            if np.sign(f_lo) != np.sign(f_hi):
                return float(optimize.brentq(residual, lo, hi, xtol=1e-14 * theta, rtol=1e-13))
        raise ProjectionError(
            f"resampled residual has no sign change within {POLISH_WIDTHS[-1]:.0%} of "
            f"theta={theta:.6g}", profile() if profile is not None else None)

    def non_attainment_chain(self, z: RealField, model: ModelSpec) -> NonAttainmentChain:
        """I(z) >= (s/N) T(z) >= I0(z^theta) for z on the Pohozaev set."""
        report = self.pohozaev_report(z, model)
        if not report.residual_rel < 1e-3:
            raise PreconditionError(
                f"chain needs z on the Pohozaev set (residual_rel={report.residual_rel:.3e})")
        G = self._require_positive_G(z, model)
        e = self.energy(z, model)
        N, s = model.dim, model.s
        theta = ((N - 2.0 * s) * e.kinetic / (2.0 * N * G)) ** (1.0 / (2.0 * s))
        return NonAttainmentChain(
            theta=theta,
            energy=e.I,
            kinetic_share=s * e.kinetic / N,
            free_level=s * theta ** (N - 2.0 * s) * e.kinetic / N
        )

    def kinetic_floor(self, trace: MinimizationTrace) -> float:
        return trace.kinetic_floor

    # plateau profiles and paths

    def plateau_profile(self, level: float, radius: float, grid: BoxGrid) -> RealField:
        """level on |x| <= R, linear down to 0 on [R, R+1], 0 beyond."""
        if not radius + 1.0 < grid.half_width / 2.0:
            raise ProfileTooLargeError(
                f"plateau of radius {radius} needs R+1 < L/2 = {grid.half_width / 2.0}")
        return RealField(grid, level * np.clip(radius + 1.0 - grid.radius(), 0.0, 1.0))

    def plateau_radius_scan(self, model: ModelSpec, level: float, grid: BoxGrid) -> float:
        """Smallest R on a 0.25 grid with int G(w_R) > 0."""
        radius = 0.0
        while radius + 1.0 < grid.half_width / 2.0:
            w = self.plateau_profile(level, radius, grid)
            if w.integrate(model.nonlinearity.G(w.values)) > 0:
                logger.debug(f"Plateau radius R={radius} gives int G > 0")
                return radius
            radius += PLATEAU_STEP
        raise ProfileTooLargeError(
            f"no plateau radius below L/2 - 1 gives int G > 0 at level {level}")

    def interval_left_endpoint(self, z: RealField, model: ModelSpec) -> Tuple[float, float]:
        """delta* = int G2 / int G1 and the margin-widened endpoint of J."""
        split = model.split
        G1 = z.integrate(split.G1(z.values))
        G2 = z.integrate(split.G2(z.values))
        if not G1 > 0 or not G2 / G1 < 1.0:
            raise PreconditionError(f"no admissible interval: int G1={G1:.6g}, int G2={G2:.6g}")
        delta = G2 / G1
        return delta, min(1.0 - 1e-3, 1.1 * delta)

    def negative_endpoint_floor(self, z: RealField, model: ModelSpec,
                                tail_tol: Optional[float] = None) -> Tuple[float, float]:
        """Smallest lam with I_lam(z^theta) < 0 for some theta the box admits, and that theta.

        I_lam(z^theta) = A(theta) - lam B(theta) with B = theta^N int G1, so the
        threshold at each theta is A / B, read off the scaling laws.
        """
        split = model.split
        G1 = z.integrate(split.G1(z.values))
        if not G1 > 0:
            raise PreconditionError(f"negative endpoints need int G1 > 0, got {G1:.6g}")
        G2 = z.integrate(split.G2(z.values))
        N, s = model.dim, model.s
        T = self.spectral.kinetic_energy(z, model.order)
        density = z.values ** 2
        theta_max = 0.99 * min(self.spectral.max_dilation(z, tail_tol), THETA_CAP)
        thetas = np.geomspace(1.0, theta_max, THETA_SCAN) if theta_max > 1.0 else np.array([theta_max])

        floors = np.empty(thetas.size)
        for k, theta in enumerate(thetas):
            potential = z.integrate(model.potential.values(z.grid, theta) * density)
            A = theta ** (N - 2.0 * s) * T / 2.0 + theta ** N * (potential / 2.0 + G2)
            floors[k] = A / (theta ** N * G1)
        k = int(np.argmin(floors))
        logger.debug(f"Negative endpoints from lambda > {floors[k]:.6g} at theta={thetas[k]:.4g}")
        return float(floors[k]), float(thetas[k])

    def path_energies(self, vertices: List[RealField], model: ModelSpec, lam: float) -> np.ndarray:
        return np.array([self.energy(v, model, lam).I_lambda for v in vertices])

    def mountain_path(self, z: RealField, theta_end: float, count: int, model: ModelSpec,
                      lam: float, delta_bar: Optional[float] = None,
                      tail_tol: Optional[float] = None) -> PathSpec:
        """Dilation path t -> z(./(t theta_end)), extended until the endpoint is negative."""
        if delta_bar is not None:
            split = model.split
            margin = (delta_bar * z.integrate(split.G1(z.values))
                      - z.integrate(split.G2(z.values)))
            if not margin > 0:
                raise PreconditionError(f"delta_bar * int G1 - int G2 = {margin:.6g} is not positive")

        theta_max = self.spectral.max_dilation(z, tail_tol)
        times = np.linspace(0.0, 1.0, count + 1)
        for _ in range(MAX_PATH_DOUBLINGS):
            end = self.energy(self.spectral.dilate(z, theta_end, tail_tol), model, lam).I_lambda
            if end < 0:
                break
            if 2.0 * theta_end > theta_max:
                profile = self.theta_profile(z, model, np.geomspace(THETA_MIN, theta_end, 40))
                raise PathConstructionError(
                    f"I_lambda(z^theta) still {end:.6g} >= 0 at the box limit theta={theta_end:.4g}",
                    profile.to_dict())
            theta_end *= 2.0
        else:
            raise PathConstructionError(f"endpoint energy stayed nonnegative up to theta={theta_end:.4g}")

        vertices = [RealField.zeros(z.grid)]
        vertices += [self.spectral.dilate(z, t * theta_end, tail_tol) for t in times[1:]]
        energies = self.path_energies(vertices, model, lam)
        logger.info(f"Dilation path: theta_end={theta_end:.4g}, max I_lambda={np.max(energies):.6g}")
        return PathSpec(vertices, times, energies, theta_end, lam)

    def sphere_infimum(self, model: ModelSpec, lam: float, rho: float, grid: BoxGrid,
                       samples: int = 64, rng: Optional[np.random.Generator] = None) -> float:
        """Sampled inf of I_lambda over fields with ||u||_{H^s} = rho."""
        rng = rng or np.random.default_rng(0)
        coords = grid.coordinates()
        best = float('inf')
        for _ in range(samples):
            values = np.zeros(grid.shape)
            for _ in range(3):
                center = rng.uniform(-0.25, 0.25, grid.dim) * grid.half_width
                width = rng.uniform(0.5, 2.0)
                r2 = sum((x - c) ** 2 for x, c in zip(coords, center))
                values += rng.normal() * np.exp(-r2 / (2.0 * width ** 2))
            u = RealField(grid, values)
            norm = self.spectral.hs_norm(u, model.order)
            if norm == 0.0:
                continue
            best = min(best, self.energy(u * (rho / norm), model, lam).I_lambda)
        return best
