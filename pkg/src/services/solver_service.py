"""Critical-point solvers: fixed point, mountain pass, continuation and Pohozaev-set descent."""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from errors import (ContinuationAborted, FitWindowError, FracGroundError, PathConstructionError,
                    PreconditionError, ProjectionError, SolverCollapseError,
                    SolverDivergenceError, SolverStagnationError)
from models import (BoxGrid, ContinuationRecord, ContinuationTrace, DecayFit, MinimizationStep,
                    MinimizationTrace, ModelSpec, PathSpec, RadialDecayProfile, RealField,
                    SeedKind, SeedSpec, SolveConfig, SolveResult, SolveStatus, ThetaRecord,
                    critical_exponent)

from .energy_service import EnergyService
from .kernel_service import KernelService
from .model_service import ModelService
from .spectral_service import SpectralService

logger = logging.getLogger(__name__)

DIVERGENCE_NORM = 1e6
COLLAPSE_NORM = 1e-10
MIN_DAMPING = 1.0 / 64.0
LOG_EVERY = 50
STAGNATION_SWEEPS = 50
STAGNATION_GAIN = 0.99
HANDOFF_RESIDUAL = 1e-2
POWER_STEPS = 4
REPARAM_EVERY = 5
PATH_RESTARTS = 3
LAMBDA_MARGIN = 0.1
SOBOLEV_ITERS = 200
ARMIJO = 1e-4
UNDERFLOW = 1e-14


class SolverService:
    """Iterative solvers for (-D)^s u + V u = lam g1(u) - g2(u)."""

    def __init__(self, spectral: SpectralService, energy: EnergyService, kernel: KernelService,
                 models: ModelService, workers: int = 1):
        self.spectral = spectral
        self.energy = energy
        self.kernel = kernel
        self.models = models
        self.workers = workers

    # seeds

    def seed_field(self, model: ModelSpec, grid: BoxGrid, seed: SeedSpec) -> RealField:
        """Initial profile for a solve."""
        if seed.kind == SeedKind.GAUSSIAN:
            return RealField(grid, seed.amplitude * np.exp(-grid.radius() ** 2 / (2.0 * seed.width ** 2)))
        if seed.kind == SeedKind.FILE:
            if seed.path is None:
                raise PreconditionError("file seed needs a path")
            values = np.loadtxt(seed.path, delimiter=',', ndmin=1)
            return RealField(grid, values)
        level = model.nonlinearity.zeta + 1.0 if seed.level is None else seed.level
        radius = (self.energy.plateau_radius_scan(model, level, grid)
                  if seed.radius is None else seed.radius)
        return self.energy.plateau_profile(level, radius, grid)

    def _truncated(self, model: ModelSpec) -> ModelSpec:
        return model.with_nonlinearity(self.models.truncate(model.nonlinearity))

    def _result(self, u: RealField, model: ModelSpec, truncated: ModelSpec, lam: float,
                residual: float, iterations: int, status: SolveStatus,
                level: Optional[float] = None) -> SolveResult:
        breakdown = self.energy.energy(u, truncated, lam)
        untruncated = 0.0
        if not u.is_zero():
            _, raw = self.energy.gradient_residual(u, model, lam)
            untruncated = raw / u.norm()
        return SolveResult(
            u=u,
            lam=lam,
            residual_norm=residual,
            energy=breakdown,
            pohozaev=self.energy.pohozaev_report(u, truncated, lam),
            diagnostics=self.energy.critical_diagnostics(
                u, truncated, lam, breakdown.I_lambda if level is None else level),
            iterations=iterations,
            status=status,
            untruncated_residual_norm=untruncated,
            level=level
        )

    # fixed point

    def fixed_point_solve(self, model: ModelSpec, grid: BoxGrid, lam: float = 1.0,
                          cfg: Optional[SolveConfig] = None,
                          u0: Optional[RealField] = None) -> SolveResult:
        """Damped iteration u <- K[(1 - m - V) u + S^gamma N(u)], S the Petviashvili quotient."""
        cfg = cfg or SolveConfig()
        truncated = self._truncated(model)
        u = self.seed_field(model, grid, cfg.seed) if u0 is None else u0
        if u.is_zero():
            logger.info("Zero seed is a fixed point")
            return self._result(u, model, truncated, lam, 0.0, 0, SolveStatus.TRIVIAL)

        split = truncated.split
        m = truncated.nonlinearity.m
        V = truncated.potential.values(grid)
        gamma = truncated.nonlinearity.p / (truncated.nonlinearity.p - 1.0)
        omega = cfg.damping
        best = float('inf')
        rel = float('inf')

        for iteration in range(1, cfg.max_iters + 1):
            values = u.values
            nonlinear = lam * split.g1(values) - split.g2(values) + m * values
            factor = 1.0
            if cfg.stabilization:
                linear = self.spectral.frac_laplacian(u, model.order).values + (m + V) * values
                denom = float(np.sum(values * nonlinear))
                if denom > 0:
                    factor = (float(np.sum(values * linear)) / denom) ** gamma
            update = self.kernel.convolve_kernel(
                u.with_values((1.0 - m - V) * values + factor * nonlinear), model.order)
            new = (1.0 - omega) * values + omega * update.values

            norm = float(np.sqrt(np.sum(new ** 2) * grid.cell_volume))
            if not np.isfinite(norm) or norm > DIVERGENCE_NORM:
                raise SolverDivergenceError(f"iterate norm {norm:.3e} after {iteration} iterations")
            if norm < COLLAPSE_NORM:
                raise SolverCollapseError(f"iterate collapsed to zero after {iteration} iterations")
            u = u.with_values(new)

            _, res = self.energy.gradient_residual(u, truncated, lam)
            rel = res / norm
            if iteration % LOG_EVERY == 0:
                logger.debug(f"fixed point it={iteration} residual={rel:.3e} omega={omega:.4g}")
            if rel <= cfg.tol:
                logger.info(f"Fixed point converged in {iteration} iterations (residual {rel:.3e})")
                return self._result(u, model, truncated, lam, rel, iteration, SolveStatus.CONVERGED)
            if rel > 2.0 * best:
                omega = max(0.5 * omega, MIN_DAMPING)
            best = min(best, rel)

        logger.warning(f"Fixed point hit max_iters={cfg.max_iters} at residual {rel:.3e}")
        return self._result(u, model, truncated, lam, rel, cfg.max_iters, SolveStatus.MAX_ITERS)

    # mountain pass

    def initial_path(self, model: ModelSpec, grid: BoxGrid, lam: float, cfg: SolveConfig,
                     delta_bar: Optional[float] = None) -> PathSpec:
        """Dilation path of the plateau seed."""
        truncated = self._truncated(model)
        seed = cfg.seed if cfg.seed.kind == SeedKind.PLATEAU else SeedSpec()
        z = self.seed_field(truncated, grid, seed)
        return self.energy.mountain_path(z, 1.0, cfg.path_vertices, truncated, lam,
                                         delta_bar, cfg.support_tol)

    def _hessian_vector(self, u: RealField, e: RealField, model: ModelSpec, lam: float) -> RealField:
        eps = 1e-4 * max(u.norm(), 1e-12) / max(e.norm(), 1e-300)
        plus, _ = self.energy.gradient_residual(u + e * eps, model, lam)
        minus, _ = self.energy.gradient_residual(u - e * eps, model, lam)
        return (plus - minus) * (0.5 / eps)

    def _refine_direction(self, u: RealField, e: RealField, model: ModelSpec, lam: float,
                          shift: float) -> RealField:
        """Shifted power iteration for the most negative direction of K D^2 I_lambda."""
        e = e * (1.0 / self.spectral.hs_norm(e, model.order))
        for _ in range(POWER_STEPS):
            e = e * shift - self.kernel.convolve_kernel(self._hessian_vector(u, e, model, lam),
                                                        model.order)
            e = e * (1.0 / self.spectral.hs_norm(e, model.order))
        return e

    def _reparametrize(self, vertices: List[RealField], energies: np.ndarray,
                       pinned: int) -> List[RealField]:
        """Energy-weighted equal spacing on each side of the pinned vertex."""
        out = list(vertices)
        spread = float(np.max(energies) - np.min(energies)) or 1.0
        for lo, hi in ((0, pinned), (pinned, len(vertices) - 1)):
            if hi - lo < 2:
                continue
            segment = vertices[lo:hi + 1]
            heights = (energies[lo:hi + 1] - np.min(energies)) / spread
            lengths = np.array([(b - a).norm() for a, b in zip(segment, segment[1:])])
            weights = lengths * (1.0 + 0.5 * (heights[:-1] + heights[1:]))
            cumulative = np.concatenate([[0.0], np.cumsum(weights)])
            if cumulative[-1] == 0.0:
                continue
            targets = np.linspace(0.0, cumulative[-1], hi - lo + 1)
            for k in range(1, hi - lo):
                i = min(int(np.searchsorted(cumulative, targets[k], side='right')) - 1, len(weights) - 1)
                span = cumulative[i + 1] - cumulative[i]
                frac = (targets[k] - cumulative[i]) / span if span > 0 else 0.0
                out[lo + k] = segment[i] * (1.0 - frac) + segment[i + 1] * frac
        return out

    def mountain_pass_solve(self, model: ModelSpec, grid: BoxGrid, lam: float = 1.0,
                            cfg: Optional[SolveConfig] = None, path: Optional[PathSpec] = None,
                            direction: Optional[RealField] = None
                            ) -> Tuple[SolveResult, PathSpec, Optional[RealField]]:
        """Climbing-image relaxation of a dilation path to a mountain-pass critical point.

        The climb halves its step whenever the pinned vertex stalls. Once the residual
        drops below HANDOFF_RESIDUAL, or the step bottoms out, the vertex is finished by
        the fixed-point iteration and put back into the path.
        """
        cfg = cfg or SolveConfig()
        truncated = self._truncated(model)
        if path is None:
            path = self.initial_path(model, grid, lam, cfg)
        vertices = list(path.vertices)
        energies = self.energy.path_energies(vertices, truncated, lam)
        theta_end = path.theta_end
        restarts = 0

        V = truncated.potential.values(grid)
        shift = 1.5 + float(np.max(V)) + abs(truncated.nonlinearity.m - 1.0)
        step = cfg.damping
        e = direction
        best = float('inf')
        since_best = 0
        previous = float('inf')
        rel = float('inf')
        j = pinned = int(np.argmax(energies))

        for sweep in range(1, cfg.max_iters + 1):
            if energies[-1] >= 0:
                restarts += 1
                if restarts > PATH_RESTARTS:
                    raise PathConstructionError(
                        f"path endpoint lost negative energy {PATH_RESTARTS} times")
                fresh = self.energy.mountain_path(path.vertices[-1], 2.0, len(vertices) - 1,
                                                  truncated, lam, tail_tol=cfg.support_tol)
                theta_end *= fresh.theta_end
                logger.warning(f"Re-extended path to theta_end={theta_end:.4g}")
                path = fresh
                vertices = list(fresh.vertices)
                energies = fresh.energies
                e = None

            j = int(np.argmax(energies))
            if j == 0 or j == len(vertices) - 1:
                raise PathConstructionError(f"path maximum sits at endpoint {j}")
            if j != pinned:
                pinned = j
                best = float('inf')
                since_best = 0
                previous = float('inf')
            u = vertices[j]
            r, res = self.energy.gradient_residual(u, truncated, lam)
            rel = res / u.norm()
            if sweep % LOG_EVERY == 0:
                logger.debug(f"mountain pass sweep={sweep} vertex={j} residual={rel:.3e} "
                             f"level={energies[j]:.10g}")
            if rel <= cfg.tol:
                logger.info(f"Mountain pass converged in {sweep} sweeps at lam={lam:.6g}, "
                            f"c={energies[j]:.10g}")
                relaxed = PathSpec(vertices, path.times, energies, theta_end, lam)
                return (self._result(u, model, truncated, lam, rel, sweep, SolveStatus.CONVERGED,
                                     float(energies[j])), relaxed, e)
            if rel <= HANDOFF_RESIDUAL:
                return self._finish_saddle(model, grid, lam, cfg,
                                           PathSpec(vertices, path.times, energies, theta_end, lam),
                                           j, sweep, rel, e)

            if rel < STAGNATION_GAIN * best:
                best = rel
                since_best = 0
            else:
                since_best += 1
                if since_best >= STAGNATION_SWEEPS:
                    if step <= MIN_DAMPING:
                        logger.info(f"Climbing image stalled at residual {rel:.3e}; "
                                    f"finishing by fixed point")
                        return self._finish_saddle(
                            model, grid, lam, cfg,
                            PathSpec(vertices, path.times, energies, theta_end, lam), j, sweep, rel, e)
                    step = max(0.5 * step, MIN_DAMPING)
                    best = rel
                    since_best = 0
                    logger.debug(f"No 1% gain in {STAGNATION_SWEEPS} sweeps, step -> {step:.4g}")
            if rel > 2.0 * previous:
                step = max(0.5 * step, MIN_DAMPING)
            previous = rel

            if e is None:
                e = vertices[j + 1] - vertices[j - 1]
            e = self._refine_direction(u, e, truncated, lam, shift)
            preconditioned = self.kernel.convolve_kernel(r, model.order)
            climb = preconditioned - e * (2.0 * r.dot(e))
            vertices[j] = u - climb * step
            energies[j] = self.energy.energy(vertices[j], truncated, lam).I_lambda

            if sweep % REPARAM_EVERY == 0:
                vertices = self._reparametrize(vertices, energies, j)
                energies = self.energy.path_energies(vertices, truncated, lam)

        logger.warning(f"Mountain pass hit max_iters={cfg.max_iters} at residual {rel:.3e}")
        relaxed = PathSpec(vertices, path.times, energies, theta_end, lam)
        return (self._result(vertices[j], model, truncated, lam, rel, cfg.max_iters,
                             SolveStatus.MAX_ITERS, float(energies[j])), relaxed, e)

    def _finish_saddle(self, model: ModelSpec, grid: BoxGrid, lam: float, cfg: SolveConfig,
                       path: PathSpec, j: int, sweep: int, rel: float,
                       e: Optional[RealField]) -> Tuple[SolveResult, PathSpec, Optional[RealField]]:
        """Polish the climbing vertex by the fixed-point iteration and pin it into the path."""
        polished = self.fixed_point_solve(model, grid, lam, cfg, u0=path.vertices[j])
        if not polished.converged or polished.u.is_zero():
            raise SolverStagnationError(
                f"climbing image stopped at residual {rel:.3e} and the fixed-point finish ended "
                f"{polished.status.value} at residual {polished.residual_norm:.3e}")
        vertices = list(path.vertices)
        energies = np.array(path.energies, dtype=float)
        vertices[j] = polished.u
        energies[j] = polished.energy.I_lambda
        shift = abs(energies[j] - path.energies[j]) / max(abs(energies[j]), 1e-300)
        if shift > 0.1:
            logger.warning(f"Fixed-point finish moved the path level by {shift:.1%}")
        if int(np.argmax(energies)) != j:
            logger.warning(f"Finished vertex {j} is no longer the path maximum")
        logger.info(f"Mountain pass converged in {sweep} sweeps + {polished.iterations} "
                    f"fixed-point iterations at lam={lam:.6g}, c={energies[j]:.10g}")
        relaxed = PathSpec(vertices, path.times, energies, path.theta_end, lam)
        truncated = self._truncated(model)
        result = self._result(polished.u, model, truncated, lam, polished.residual_norm,
                              sweep + polished.iterations, SolveStatus.CONVERGED, float(energies[j]))
        return result, relaxed, e

    def lambda_continuation(self, model: ModelSpec, grid: BoxGrid,
                            cfg: Optional[SolveConfig] = None,
                            lambda_count: Optional[int] = None) -> ContinuationTrace:
        """Mountain-pass solutions on a uniform lambda grid inside J up to 1.

        The grid starts at delta_bar, or later when the seed only reaches negative
        I_lambda inside the box for larger lambda.
        """
        cfg = cfg or SolveConfig()
        count = cfg.lambda_count if lambda_count is None else lambda_count
        if count < 3:
            raise ValueError(f"continuation needs at least 3 lambda values, got {count}")
        truncated = self._truncated(model)
        seed = cfg.seed if cfg.seed.kind == SeedKind.PLATEAU else SeedSpec()
        z = self.seed_field(truncated, grid, seed)
        _, delta_bar = self.energy.interval_left_endpoint(z, truncated)
        floor, theta_end = self.energy.negative_endpoint_floor(z, truncated, cfg.support_tol)
        if not floor < 1.0:
            raise ContinuationAborted(
                f"no dilation of the seed inside the box reaches negative I_lambda for lambda <= 1 "
                f"(needs lambda > {floor:.6g})", ContinuationTrace(delta_bar))
        start = max(delta_bar, floor + LAMBDA_MARGIN * (1.0 - floor))
        trace = ContinuationTrace(delta_bar, start)
        logger.info(f"Continuation over [{start:.6g}, 1] inside J = [{delta_bar:.6g}, 1] "
                    f"with {count} values")

        path = None
        direction = None
        for lam in np.linspace(start, 1.0, count):
            lam = float(lam)
            try:
                if path is None:
                    path = self.energy.mountain_path(z, theta_end, cfg.path_vertices, truncated, lam,
                                                     delta_bar, cfg.support_tol)
                result, path, direction = self.mountain_pass_solve(model, grid, lam, cfg,
                                                                   path, direction)
            except FracGroundError as e:
                raise ContinuationAborted(f"continuation failed at lambda={lam:.6g}: {e}", trace) from e
            if not result.converged:
                raise ContinuationAborted(
                    f"mountain pass did not converge at lambda={lam:.6g} "
                    f"(residual {result.residual_norm:.3e})", trace)
            trace.records.append(ContinuationRecord(lam, result.c_lambda, result))
            logger.info(f"lambda={lam:.6g}: c={result.c_lambda:.10g}, "
                        f"alpha={result.energy.kinetic:.6g}")
        return trace

    # free problem and the Pohozaev set

    def ground_state_free(self, model: ModelSpec, grid: BoxGrid,
                          cfg: Optional[SolveConfig] = None) -> SolveResult:
        """Ground state of the problem without potential."""
        if not model.potential.is_zero:
            raise PreconditionError("free ground state needs V = 0")
        return self.fixed_point_solve(model, grid, 1.0, cfg)

    def b0_level(self, result: SolveResult) -> float:
        """Free ground-state level b0 = I0(w)."""
        return result.energy.I_free

    def centroid_radius(self, u: RealField) -> float:
        weight = u.values ** 2
        return float(np.sum(u.grid.radius() * weight) / np.sum(weight))

    def _centroid(self, u: RealField) -> np.ndarray:
        weight = u.values ** 2
        return np.array([np.sum(x * weight) for x in u.grid.coordinates()]) / np.sum(weight)

    def align_translation(self, u: RealField, reference: RealField) -> RealField:
        """Translate u so that its |u|^2 centroid matches the reference."""
        return self.spectral.translate(u, self._centroid(reference) - self._centroid(u))

    def pohozaev_minimize(self, model: ModelSpec, grid: BoxGrid, steps: int,
                          cfg: Optional[SolveConfig] = None, w: Optional[RealField] = None,
                          offset: Optional[float] = None) -> MinimizationTrace:
        """Projected descent of I on the Pohozaev set from a translated free ground state."""
        cfg = cfg or SolveConfig()
        failed = [name for name, check in self.models.check_virial(model, grid).items()
                  if not check.satisfied]
        if failed:
            raise PreconditionError(f"Pohozaev minimization needs {', '.join(failed)}")
        truncated = self._truncated(model)
        if w is None:
            w = self.ground_state_free(model.without_potential(), grid, cfg).u

        shift = grid.half_width / 4.0 if offset is None else offset
        shift = round(shift / grid.spacing) * grid.spacing
        y = [shift] + [0.0] * (grid.dim - 1)
        theta, u = self.energy.project_to_P(self.spectral.translate(w, y), truncated, cfg.support_tol)

        trace = MinimizationTrace()
        for k in range(steps + 1):
            r, res = self.energy.gradient_residual(u, truncated)
            breakdown = self.energy.energy(u, truncated)
            trace.steps.append(MinimizationStep(
                step=k,
                energy=breakdown.I,
                residual_norm=res / u.norm(),
                centroid_radius=self.centroid_radius(u),
                kinetic=breakdown.kinetic,
                pohozaev_residual_rel=self.energy.pohozaev_report(u, truncated).residual_rel,
                theta=theta
            ))
            if k == steps:
                break
            candidate = u - self.kernel.convolve_kernel(r, model.order) * cfg.damping
            theta, u = self.energy.project_to_P(candidate, truncated, cfg.support_tol)

        trace.final = u
        logger.info(f"Pohozaev descent: b_est={trace.b_est:.10g}, "
                    f"min residual={trace.min_residual:.3e}")
        return trace

    def theta_translation_experiment(self, w: RealField, model: ModelSpec,
                                     radii: Sequence[float],
                                     cfg: Optional[SolveConfig] = None) -> List[ThetaRecord]:
        """Projection parameter and level of w(. - y) for |y| in radii."""
        cfg = cfg or SolveConfig()
        grid = w.grid
        outside = [r for r in radii if not 0.0 <= r < grid.half_width / 2.0]
        if outside:
            raise PreconditionError(f"radii {outside} leave the central half of the box")
        truncated = self._truncated(model)

        def one(radius: float) -> ThetaRecord:
            y = [radius] + [0.0] * (grid.dim - 1)
            try:
                theta, z = self.energy.project_to_P(self.spectral.translate(w, y), truncated,
                                                    cfg.support_tol)
            except (ProjectionError, PreconditionError) as e:
                logger.warning(f"Projection failed at |y|={radius}: {e}")
                return ThetaRecord(float(radius), None, error=str(e))
            return ThetaRecord(float(radius), theta, self.energy.energy(z, truncated).I)

        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(one, radii))

    def translated_levels(self, w: RealField, model: ModelSpec, radii: Sequence[float],
                          cfg: Optional[SolveConfig] = None) -> List[Optional[float]]:
        """I of the projected translates of w."""
        return [record.energy for record in self.theta_translation_experiment(w, model, radii, cfg)]

    # Sobolev quotient

    def sobolev_quotient(self, u: RealField, s: float) -> float:
        """T(u) / ||u||_{2*}^2."""
        q = critical_exponent(u.grid.dim, s)
        return self.spectral.kinetic_energy(u, s) / self.spectral.lq_norm(u, q) ** 2

    def estimate_sobolev_constant(self, dim: int, s: float, grid: BoxGrid,
                                  cfg: Optional[SolveConfig] = None, width: float = 1.0) -> float:
        """Minimize the Sobolev quotient by H^s-preconditioned descent with Armijo steps."""
        if not 2.0 * s < dim:
            raise PreconditionError(f"Sobolev quotient needs 2s < N, got N={dim}, s={s}")
        if grid.dim != dim:
            raise ValueError(f"grid dimension {grid.dim} does not match N={dim}")
        cfg = cfg or SolveConfig()
        q = critical_exponent(dim, s)
        modulus = grid.frequency_modulus()
        with np.errstate(divide='ignore'):
            inverse = np.where(modulus > 0, modulus ** (-2.0 * s), 0.0)

        u = RealField(grid, np.exp(-grid.radius() ** 2 / (2.0 * width ** 2)))
        u = u * (1.0 / self.spectral.lq_norm(u, q))
        quotient = self.sobolev_quotient(u, s)
        for iteration in range(min(cfg.max_iters, SOBOLEV_ITERS)):
            values = u.values
            grad = u.with_values(2.0 * self.spectral.frac_laplacian(u, s).values
                                 - 2.0 * quotient * np.abs(values) ** (q - 2.0) * values)
            direction = self.spectral.apply_symbol(grad, inverse)
            slope = grad.dot(direction)
            if not slope > 0:
                break
            alpha = 1.0
            while alpha > 1e-8:
                trial = u - direction * alpha
                value = self.sobolev_quotient(trial, s)
                if value <= quotient - ARMIJO * alpha * slope:
                    break
                alpha *= 0.5
            else:
                break
            gain = quotient - value
            u = trial * (1.0 / self.spectral.lq_norm(trial, q))
            quotient = value
            if gain < 1e-10 * quotient:
                break
        logger.info(f"Sobolev quotient estimate {quotient:.8g} (N={dim}, s={s}, width={width})")
        return quotient

    # decay

    def _window_shells(self, u: RealField, window: Tuple[float, float]
                       ) -> Tuple[np.ndarray, np.ndarray]:
        r1, r2 = window
        if not 0.0 < r1 < r2:
            raise FitWindowError(f"window must satisfy 0 < r1 < r2, got {window}")
        if not r2 < u.grid.half_width / 2.0:
            raise FitWindowError(f"window end {r2} reaches L/2 = {u.grid.half_width / 2.0}")
        centers, means, _ = self.spectral.shell_average(u)
        mask = (centers >= r1) & (centers <= r2)
        return centers[mask], means[mask]

    def decay_fit(self, u: RealField, window: Tuple[float, float], s: float) -> DecayFit:
        """Least-squares fit log mean|u| = c + k log r over the shell window."""
        radii, means = self._window_shells(u, window)
        if radii.size < 3:
            raise FitWindowError(f"window {window} holds only {radii.size} shells")
        if np.any(means < UNDERFLOW):
            raise FitWindowError(f"shell means drop below {UNDERFLOW:g} inside {window}")
        x, y = np.log(radii), np.log(means)
        slope, intercept = np.polyfit(x, y, 1)
        rms = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
        fit = DecayFit(float(slope), float(np.exp(intercept)), rms,
                       -(u.grid.dim + 2.0 * s), tuple(window))
        logger.info(f"Decay exponent {fit.exponent:.4f} (target {fit.target:.4f}, rms {rms:.2e})")
        return fit

    def radial_decay_profile(self, u: RealField, window: Tuple[float, float],
                             s: float) -> RadialDecayProfile:
        """|x|^((N-1)/2) |u| / ||u||_{H^s} on the shell window."""
        radii, means = self._window_shells(u, window)
        norm = self.spectral.hs_norm(u, s)
        return RadialDecayProfile(radii, radii ** ((u.grid.dim - 1) / 2.0) * means / norm)
