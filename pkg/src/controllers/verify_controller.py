"""Verify controller: property suites that need no solver run."""
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Tuple

import numpy as np
from scipy import special

from middleware.error_middleware import ErrorMiddleware
from models import BoxGrid, ExperimentConfig, RealField, RunRecord, critical_exponent
from services import (EnergyService, KernelService, ModelService, RunService, SpectralService,
                      normalization_constant, sharp_sobolev_constant)
from utils.helpers import format_check, plain
from utils.validators import validate_kernel_profile

logger = logging.getLogger(__name__)

REPORT_FILE = 'verify_report.json'
RANDOM_FIELDS = 50

Check = Tuple[bool, str]


def _gaussian(grid: BoxGrid, amplitude: float = 1.0, width: float = 1.0) -> RealField:
    return RealField(grid, amplitude * np.exp(-grid.radius() ** 2 / width ** 2))


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


class VerifyController:
    """Runs the grid, model, energy and kernel property suites."""

    def __init__(self, spectral: SpectralService, models: ModelService, energy: EnergyService,
                 kernel: KernelService, runs: RunService, workers: int = 1):
        self.spectral = spectral
        self.models = models
        self.energy = energy
        self.kernel = kernel
        self.runs = runs
        self.workers = workers
        self.suites: Dict[str, List[Tuple[str, Callable]]] = {
            'grid_spectral': [
                ('transform_roundtrip', self._transform_roundtrip),
                ('coefficients_hermitian', self._coefficients_hermitian),
                ('plane_wave_eigenrelation', self._plane_wave),
                ('symbol_semigroup', self._semigroup),
                ('kinetic_parseval', self._parseval),
                ('kinetic_dilation_scaling', self._dilation_scaling),
                ('translation_invariance', self._translation_invariance),
                ('normalization_closed_form', self._normalization_closed_form),
                ('normalization_cartesian', self._normalization_cartesian),
                ('gagliardo_equivalence', self._gagliardo),
                ('pv_matches_spectral', self._pv_matches_spectral),
                ('pohozaev_commutator', self._commutator),
                ('pohozaev_commutator_refinement', self._commutator_refinement),
                ('radial_symmetrize_fixed_point', self._symmetrize),
            ],
            'model': [
                ('g_odd', self._g_odd),
                ('G_primitive', self._G_primitive),
                ('split_identity', self._split_identity),
                ('split_signs', self._split_signs),
                ('zeta_root', self._zeta_root),
                ('epsilon_bound', self._epsilon_bound),
                ('canonical_assumptions', self._assumptions),
                ('critical_exponent', self._critical_exponent),
            ],
            'energy': [
                ('energy_lambda_one', self._energy_lambda_one),
                ('project_to_P0', self._project_P0),
                ('project_to_P', self._project_P),
                ('non_attainment_chain', self._chain),
                ('mountain_path_admissible', self._mountain_path),
                ('sphere_infimum_positive', self._sphere_infimum),
            ],
            'kernel': [
                ('resolvent_identity', self._resolvent_identity),
                ('kernel_contraction', self._contraction),
                ('kernel_shape_1d', self._kernel_shape),
                ('kernel_tail_1d', self._kernel_tail),
            ],
        }
        self.config = None
        self.seed = 0

    def list_properties(self) -> List[str]:
        return [f"{group}.{name}" for group, props in self.suites.items() for name, _ in props]

    def _run_group(self, group: str) -> List[dict]:
        results = []
        for name, check in self.suites[group]:
            try:
                passed, detail = check()
            except Exception as e:
                ErrorMiddleware.handle_general_error(e, f"property {group}.{name}")
                passed, detail = False, f"error: {e}"
            logger.debug(f"{group}.{name}: {format_check(passed)} {detail}")
            results.append({'group': group, 'name': name, 'passed': bool(passed), 'detail': detail})
        return results

    def verify(self, config: ExperimentConfig, seed: int = 0) -> RunRecord:
        """Run every suite, write the JSON report and seal the run."""
        self.config = config
        self.seed = seed
        record = self.runs.start_run('verify', config)
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            grouped = list(pool.map(self._run_group, list(self.suites)))
        results = [item for group in grouped for item in group]

        failed = [f"{r['group']}.{r['name']}" for r in results if not r['passed']]
        report = {
            'properties': results,
            'passed': len(results) - len(failed),
            'failed': failed,
            'total': len(results),
            'seed': seed,
        }
        path = os.path.join(record.run_dir, REPORT_FILE)
        with open(path, 'w', encoding='utf-8') as handle:
            json.dump(plain(report), handle, sort_keys=True, indent=2)
            handle.write("\n")
        record.outputs[REPORT_FILE] = 'json'
        logger.info(f"Verify: {report['passed']}/{report['total']} properties passed")
        return self.runs.finish_run(record, report, not failed)

    # grid_spectral

    def _transform_roundtrip(self) -> Check:
        rng = np.random.default_rng(self.seed)
        u = RealField(BoxGrid(2, 4.0, 32), rng.normal(size=(32, 32)))
        back = self.spectral.inverse_transform(self.spectral.forward_transform(u))
        err = float(np.max(np.abs(back.values - u.values)))
        return err < 1e-12, f"max error {err:.3e}"

    def _coefficients_hermitian(self) -> Check:
        rng = np.random.default_rng(self.seed + 1)
        u = RealField(BoxGrid(2, 4.0, 32), rng.normal(size=(32, 32)))
        ok = self.spectral.forward_transform(u).is_hermitian()
        return ok, "c(-xi) = conj c(xi)"

    def _plane_wave(self) -> Check:
        grid = BoxGrid(2, 8.0, 64)
        k = (3.0 * np.pi / grid.half_width, 2.0 * np.pi / grid.half_width)
        u = RealField.from_function(grid, lambda x, y: np.cos(k[0] * x + k[1] * y))
        lap = self.spectral.frac_laplacian(u, 0.6)
        expected = np.hypot(*k) ** 1.2 * u.values
        err = float(np.max(np.abs(lap.values - expected)) / np.max(np.abs(expected)))
        return err < 1e-10, f"relative error {err:.3e}"

    def _semigroup(self) -> Check:
        u = _gaussian(BoxGrid(2, 8.0, 64))
        twice = self.spectral.frac_laplacian(self.spectral.frac_laplacian(u, 0.3), 0.4)
        once = self.spectral.frac_laplacian(u, 0.7)
        err = float(np.max(np.abs(twice.values - once.values)) / np.max(np.abs(once.values)))
        return err < 1e-10, f"relative error {err:.3e}"

    def _parseval(self) -> Check:
        u = _gaussian(BoxGrid(2, 8.0, 64), 2.0, 1.3)
        T = self.spectral.kinetic_energy(u, 0.6)
        pairing = u.dot(self.spectral.frac_laplacian(u, 0.6))
        return _rel(T, pairing) < 1e-10, f"T={T:.12g}, <u,(-D)^s u>={pairing:.12g}"

    def _dilation_scaling(self) -> Check:
        u = _gaussian(BoxGrid(2, 8.0, 64))
        theta = 1.5
        T = self.spectral.kinetic_energy(u, 0.6)
        scaled = self.spectral.kinetic_energy(self.spectral.dilate(u, theta), 0.6)
        err = _rel(scaled, theta ** (2.0 - 1.2) * T)
        return err < 1e-8, f"relative error {err:.3e}"

    def _translation_invariance(self) -> Check:
        u = _gaussian(BoxGrid(2, 8.0, 64))
        T = self.spectral.kinetic_energy(u, 0.6)
        lattice = self.spectral.kinetic_energy(self.spectral.translate(u, (1.0, -0.5)), 0.6)
        phase = self.spectral.kinetic_energy(self.spectral.translate(u, (0.3, 0.1)), 0.6)
        err = max(_rel(lattice, T), _rel(phase, T))
        return err < 1e-10, f"relative error {err:.3e}"

    def _normalization_closed_form(self) -> Check:
        worst = 0.0
        for dim in (1, 2, 3):
            for s in (0.3, 0.6, 0.9):
                closed = (s * 4.0 ** s * special.gamma(dim / 2.0 + s)
                          / (np.pi ** (dim / 2.0) * special.gamma(1.0 - s)))
                worst = max(worst, _rel(normalization_constant(dim, s), closed))
        return worst < 1e-6, f"worst relative error {worst:.3e}"

    def _normalization_cartesian(self) -> Check:
        worst = max(_rel(normalization_constant(dim, s, 'cartesian'), normalization_constant(dim, s))
                    for dim in (2, 3) for s in (0.3, 0.6, 0.9))
        return worst < 1e-6, f"worst relative gap {worst:.3e}"

    def _gagliardo(self) -> Check:
        u = _gaussian(BoxGrid(1, 10.0, 64))
        s = 0.5
        gagliardo = self.spectral.gagliardo_seminorm_sq(u, s)
        spectral = 2.0 / normalization_constant(1, s) * self.spectral.kinetic_energy(
            self.spectral.pad_field(u, 8), s)
        err = _rel(gagliardo, spectral)
        return err < 2e-2, f"pair sum {gagliardo:.8g} vs spectral {spectral:.8g}"

    def _pv_matches_spectral(self) -> Check:
        grid = BoxGrid(1, 10.0, 256)
        u = _gaussian(grid)
        pv = self.spectral.frac_laplacian_pv(u, 0.5, self.config.pv_cutoff)
        spec = self.spectral.frac_laplacian(u, 0.5)
        mask = self.spectral.central_half_mask(grid, grid.half_width / 2.0)
        err = float(np.max(np.abs(pv.values - spec.values)[mask]) / np.max(np.abs(spec.values[mask])))
        return err < 5e-3, f"relative sup error {err:.3e}"

    def _commutator(self) -> Check:
        u = _gaussian(BoxGrid(1, 8.0, 512))
        residual = self.spectral.pohozaev_pointwise_residual(u, 0.5, pad=256, relative=True)
        return residual < 1e-6, f"relative residual {residual:.3e}"

    def _commutator_refinement(self) -> Check:
        # width 0.35 is under-resolved at M=64; the padding keeps the image floor out
        coarse, fine = (self.spectral.pohozaev_pointwise_residual(
            _gaussian(BoxGrid(1, 8.0, points), width=0.35), 0.75, pad=32, relative=True)
            for points in (64, 128))
        return coarse >= 4.0 * fine, f"M=64 residual {coarse:.3e} -> M=128 {fine:.3e}"

    def _symmetrize(self) -> Check:
        u = _gaussian(BoxGrid(2, 8.0, 64))
        err = float(np.max(np.abs(self.spectral.radial_symmetrize(u).values - u.values)))
        return err < 1e-12, f"max change {err:.3e}"

    # model

    def _t(self) -> np.ndarray:
        return np.linspace(0.0, 4.0 * max(self.config.model.nonlinearity.zeta, 1.0), 801)

    def _g_odd(self) -> Check:
        nl = self.config.model.nonlinearity
        t = self._t()
        gap = float(np.max(np.abs(nl.g(-t) + nl.g(t))))
        return gap == 0.0, f"max |g(-t) + g(t)| = {gap:.3e}"

    def _G_primitive(self) -> Check:
        nl = self.config.model.nonlinearity
        t = self._t()[1:-1]
        step = 1e-6
        slope = (nl.G(t + step) - nl.G(t - step)) / (2.0 * step)
        err = float(np.max(np.abs(slope - nl.g(t))) / max(np.max(np.abs(nl.g(t))), 1.0))
        return err < 1e-6, f"relative error {err:.3e}"

    def _split_identity(self) -> Check:
        model = self.config.model
        t = np.concatenate([-self._t(), self._t()])
        split = self.models.split(model.nonlinearity)
        gap = float(np.max(np.abs(split.g1(t) - split.g2(t) - model.nonlinearity.g(t))))
        return gap < 1e-12 * max(1.0, float(np.max(np.abs(split.g1(t))))), f"max gap {gap:.3e}"

    def _split_signs(self) -> Check:
        split = self.models.split(self.config.model.nonlinearity)
        t = self._t()
        worst = min(float(np.min(split.g1(t))), float(np.min(split.g2(t))),
                    float(np.min(split.G1(t))), float(np.min(split.G2(t))))
        return worst >= 0.0, f"smallest value {worst:.3e}"

    def _zeta_root(self) -> Check:
        nl = self.config.model.nonlinearity
        at_zeta = float(nl.G(nl.zeta))
        beyond = float(nl.G(nl.zeta + 1.0))
        ok = abs(at_zeta) < 1e-12 * max(1.0, nl.zeta ** 2) and beyond > 0
        return ok, f"G(zeta)={at_zeta:.3e}, G(zeta+1)={beyond:.6g}"

    def _epsilon_bound(self) -> Check:
        model = self.config.model
        if not np.isfinite(model.critical_exponent):
            return True, "no finite critical exponent; bound not applicable"
        split = self.models.split(model.nonlinearity)
        constant = self.models.epsilon_bound_constant(split, 0.5, model.dim, model.s)
        t, gap = self.models.epsilon_bound_witness(split, 0.5, model.dim, model.s, constant)
        scale = max(1.0, float(split.G1(t)))
        return gap <= 1e-9 * scale, f"C_eps={constant:.6g}, worst gap {gap:.3e} at t={t:.4g}"

    def _assumptions(self) -> Check:
        model, grid = self.config.model, self.config.grid
        S = sharp_sobolev_constant(model.dim, model.s) if 2.0 * model.s < model.dim else 1.0
        report = self.models.check_assumptions(model, grid, S)
        failed = report.failed()
        return not failed, f"failed: {', '.join(failed)}" if failed else "all checks satisfied"

    def _critical_exponent(self) -> Check:
        ok = critical_exponent(2, 0.6) == 5.0 and critical_exponent(1, 0.6) == float('inf')
        return ok, "2* = 2N/(N-2s), infinite for N <= 2s"

    # energy

    def _field(self) -> RealField:
        return _gaussian(self.config.grid, 3.0, 1.5)

    def _energy_lambda_one(self) -> Check:
        e = self.energy.energy(self._field(), self.config.model, 1.0)
        err = _rel(e.I_lambda, e.I)
        return err < 1e-12, f"I={e.I:.12g}, I_1={e.I_lambda:.12g}"

    def _project_P0(self) -> Check:
        theta, z = self.energy.project_to_P0(self._field(), self.config.model)
        rel = self.energy.pohozaev_report(z, self.config.model).free_residual_rel
        return rel < 1e-6, f"theta={theta:.8g}, free residual {rel:.3e}"

    def _project_P(self) -> Check:
        theta, z = self.energy.project_to_P(self._field(), self.config.model)
        rel = self.energy.pohozaev_report(z, self.config.model).residual_rel
        return rel < 1e-6, f"theta={theta:.8g}, residual {rel:.3e}"

    def _chain(self) -> Check:
        _, z = self.energy.project_to_P(self._field(), self.config.model)
        chain = self.energy.non_attainment_chain(z, self.config.model)
        return chain.holds, (f"theta={chain.theta:.6g}, I={chain.energy:.6g}, "
                             f"(s/N)T={chain.kinetic_share:.6g}, I0={chain.free_level:.6g}")

    def _mountain_path(self) -> Check:
        model, grid = self.config.model, self.config.grid
        level = model.nonlinearity.zeta + 1.0
        z = self.energy.plateau_profile(level, self.energy.plateau_radius_scan(model, level, grid), grid)
        path = self.energy.mountain_path(z, 1.0, self.config.solver.path_vertices, model, 1.0,
                                         tail_tol=self.config.solver.support_tol)
        ok = path.is_admissible() and path.max_energy > 0
        return ok, f"endpoint {path.endpoint_energy:.6g}, max {path.max_energy:.6g}"

    def _sphere_infimum(self) -> Check:
        rng = np.random.default_rng(self.seed)
        value = self.energy.sphere_infimum(self.config.model, 1.0, 0.1, self.config.grid, rng=rng)
        return value > 0, f"sampled inf I on the 0.1-sphere {value:.6g}"

    # kernel

    def _random_fields(self) -> List[RealField]:
        rng = np.random.default_rng(self.seed)
        grid = BoxGrid(2, 4.0, 32)
        return [RealField(grid, rng.normal(size=grid.shape)) for _ in range(RANDOM_FIELDS)]

    def _resolvent_identity(self) -> Check:
        worst = 0.0
        for u in self._random_fields():
            back = self.kernel.resolvent_apply(self.kernel.convolve_kernel(u, 0.6), 0.6)
            worst = max(worst, (back - u).norm() / u.norm())
        return worst < 1e-10, f"worst relative error {worst:.3e}"

    def _contraction(self) -> Check:
        worst = max(self.kernel.convolve_kernel(u, 0.6).norm() / u.norm()
                    for u in self._random_fields())
        return worst <= 1.0, f"largest norm ratio {worst:.6f}"

    def _kernel_shape(self) -> Check:
        profile = self.kernel.kernel_profile(1, 0.5, radii=np.geomspace(0.1, 10.0, 40))
        ok, message = validate_kernel_profile(profile)
        return ok, message or "positive and non-increasing"

    def _kernel_tail(self) -> Check:
        profile = self.kernel.kernel_profile(1, 0.5, radii=np.geomspace(0.1, 40.0, 80))
        report = self.kernel.kernel_decay_report(profile)
        return report.tail_relative_error < 0.1, (
            f"exponent {report.tail_exponent:.4f} on {report.tail_window}")
