"""Nonlinearity evaluation, truncation, splitting and assumption checks."""
import logging
from dataclasses import replace
from typing import Callable, Dict, Tuple

import numpy as np
from scipy import optimize

from models import (AssumptionCheck, AssumptionReport, BoxGrid, ModelSpec, Nonlinearity,
                    SplitPair, critical_exponent)

from .spectral_service import quad, sphere_area

logger = logging.getLogger(__name__)

T_GRID = (1e-6, 1e6, 4001)
R_FAR = 1e6


def _t_samples(nl: Nonlinearity) -> np.ndarray:
    return np.unique(np.concatenate([
        np.linspace(0.0, 10.0 * max(nl.zeta, 1.0), 2001)[1:],
        np.logspace(-8, 6, 400),
    ]))


def _r_samples(grid: BoxGrid) -> np.ndarray:
    return np.unique(np.concatenate([
        grid.radius().ravel(),
        np.linspace(0.0, 50.0, 2001),
        np.logspace(-3, 6, 400),
    ]))


class ModelService:
    """Evaluators and sampled checks for the model families."""

    def g_eval(self, nl: Nonlinearity, t):
        return nl.g(t)

    def G_eval(self, nl: Nonlinearity, t):
        return nl.G(t)

    def truncate(self, nl: Nonlinearity) -> Nonlinearity:
        """Cut g off beyond the configured cap t0, odd-extended."""
        if nl.truncation_cap is None:
            logger.debug(f"g > 0 beyond zeta={nl.zeta:.6g}: truncation is the identity")
        else:
            logger.debug(f"Truncating g at t0={nl.truncation_cap:.6g}")
        return replace(nl, truncated=True)

    def split(self, nl: Nonlinearity) -> SplitPair:
        return SplitPair(nl)

    def _required_constant(self, sp: SplitPair, eps: float, crit: float) -> Callable:
        def required(t):
            with np.errstate(over='ignore', invalid='ignore'):
                value = crit * (sp.G1(t) - eps * sp.G2(t)) / np.abs(t) ** crit
            return np.nan_to_num(value, nan=0.0, posinf=0.0, neginf=0.0)
        return required

    def epsilon_bound(self, sp: SplitPair, eps: float, dim: int, s: float) -> Tuple[float, float]:
        """Constant C_eps and the t where it is attained."""
        if not 0.0 < eps < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
        crit = critical_exponent(dim, s)
        if not np.isfinite(crit):
            raise ValueError(f"no finite critical exponent for N={dim}, s={s}")

        required = self._required_constant(sp, eps, crit)
        t = np.logspace(np.log10(T_GRID[0]), np.log10(T_GRID[1]), T_GRID[2])
        values = required(t)
        k = int(np.argmax(values))
        best_t, best = float(t[k]), float(values[k])

        lo = np.log(t[max(k - 1, 0)])
        hi = np.log(t[min(k + 1, t.size - 1)])
        if hi > lo:
            refined = optimize.minimize_scalar(lambda x: -float(required(np.exp(x))),
                                               bounds=(lo, hi), method='bounded',
                                               options={'xatol': 1e-12})
            if -refined.fun > best:
                best_t, best = float(np.exp(refined.x)), float(-refined.fun)
        return max(best, 0.0), best_t

    def epsilon_bound_constant(self, sp: SplitPair, eps: float, dim: int, s: float) -> float:
        """Smallest C with G1 <= C/2* |t|^2* + eps G2 on the sampled range."""
        return self.epsilon_bound(sp, eps, dim, s)[0]

    def epsilon_bound_witness(self, sp: SplitPair, eps: float, dim: int, s: float,
                              constant: float) -> Tuple[float, float]:
        """Point and size of the largest violation of the bound with the given constant."""
        crit = critical_exponent(dim, s)
        t = np.logspace(np.log10(T_GRID[0]), np.log10(T_GRID[1]), T_GRID[2])
        with np.errstate(over='ignore'):
            gap = sp.G1(t) - constant / crit * t ** crit - eps * sp.G2(t)
        k = int(np.argmax(gap))
        return float(t[k]), float(gap[k])

    def radial_lq_norm(self, func: Callable, dim: int, q: float) -> float:
        """(|S^(N-1)| int_0^inf |f(r)|^q r^(N-1) dr)^(1/q) by quadrature."""
        integral = quad(lambda r: abs(float(func(r))) ** q * r ** (dim - 1), 0.0, np.inf)
        return float((sphere_area(dim) * integral) ** (1.0 / q))

    def check_virial(self, model: ModelSpec, grid: BoxGrid) -> Dict[str, AssumptionCheck]:
        """Sign conditions on <grad V(x), x> used by the non-critical experiments."""
        r = _r_samples(grid)
        v = model.potential.radial(r)
        rv = model.potential.virial_radial(r)
        tol = 1e-12 * max(float(np.max(np.abs(v))), 1.0)

        k = int(np.argmax(rv))
        violation = max(float(rv[k]), 0.0)
        v5 = AssumptionCheck('V5', violation <= tol, float(r[k]), tol - violation,
                             "<grad V(x), x> <= 0")

        combo = model.dim * v + rv
        k = int(np.argmin(combo))
        violation = max(-float(combo[k]), 0.0)
        v6 = AssumptionCheck('V6', violation <= tol, float(r[k]), tol - violation,
                             "N V + <grad V(x), x> >= 0")
        return {'V5': v5, 'V6': v6}

    def check_assumptions(self, model: ModelSpec, grid: BoxGrid,
                          S_estimate: float) -> AssumptionReport:
        """Sample each structural inequality on t-grids, the box and radial refinements."""
        if not S_estimate > 0:
            raise ValueError(f"Sobolev estimate must be positive, got {S_estimate}")
        nl = model.nonlinearity
        V = model.potential
        N, s = model.dim, model.s
        crit = critical_exponent(N, s)
        checks: Dict[str, AssumptionCheck] = {}

        t = _t_samples(nl)
        odd_gap = float(np.max(np.abs(nl.g(-t) + nl.g(t))))
        gamma = min(1.0, nl.p - 1.0)
        needed = max(0.0, 1.0 - 2.0 * s)
        detail = f"Holder exponent {gamma:.3g} vs {needed:.3g}"
        if nl.truncation_cap is not None:
            detail += f"; cap t0={nl.truncation_cap:.6g} leaves g non-differentiable there"
        checks['g1'] = AssumptionCheck('g1', odd_gap == 0.0 and gamma > needed,
                                       float(t[np.argmax(np.abs(nl.g(-t) + nl.g(t)))]),
                                       gamma - needed if odd_gap == 0.0 else -odd_gap, detail)

        small = np.array([1e-6, 1e-7, 1e-8])
        slopes = nl.g(small) / small
        slope = float(slopes[-1])
        checks['g2'] = AssumptionCheck('g2', slope < 0 and abs(slope + nl.m) <= 1e-3 * nl.m,
                                       float(small[-1]), -slope,
                                       f"g(t)/t -> {slope:.6g} (m={nl.m:.6g})")

        inv_crit = 0.0 if not np.isfinite(crit) else 1.0 / crit
        with np.errstate(over='ignore', invalid='ignore'):
            far_ratio = (abs(float(nl.g(R_FAR))) / R_FAR ** (crit - 1.0)
                         if np.isfinite(crit) else 0.0)
        subcritical = nl.p + 1.0 < crit
        checks['g3'] = AssumptionCheck('g3', subcritical and far_ratio < 1e-3, R_FAR,
                                       1.0 / (nl.p + 1.0) - inv_crit,
                                       f"p+1={nl.p + 1.0:.6g} vs 2*={crit:.6g}")

        q = nl.p + 1.0
        growth = float(np.max(np.abs(nl.g(t) + nl.m * t) / t ** (q - 1.0)))
        margin = min(0.5 - 1.0 / q, 1.0 / q - inv_crit)
        checks['g3_prime'] = AssumptionCheck('g3_prime', np.isfinite(growth) and margin > 0, q,
                                             margin, f"|g(t)+mt| <= {growth:.6g}|t|^{q - 1.0:.6g}")

        G = nl.G(t)
        k = int(np.argmax(G))
        checks['g4'] = AssumptionCheck('g4', float(G[k]) > 0, float(t[k]), float(G[k]),
                                       f"zeta={nl.zeta:.6g}, G(zeta+1)={float(nl.G(nl.zeta + 1.0)):.6g}")

        r = _r_samples(grid)
        v = V.radial(r)
        rv = V.virial_radial(r)
        scale = max(float(np.max(np.abs(v))), 1.0)
        tol = 1e-12 * scale

        v_max = float(np.max(v))
        v_min = float(np.min(v))
        checks['V1'] = AssumptionCheck('V1', v_min >= -tol and v_max > 0,
                                       float(r[np.argmin(v)] if v_min < 0 else r[np.argmax(v)]),
                                       v_max if v_min >= -tol else v_min,
                                       "V >= 0, strict at some point")

        v2 = self.radial_lq_norm(lambda x: max(float(V.virial_radial(x)), 0.0), N, N / (2.0 * s))
        checks['V2'] = AssumptionCheck('V2', v2 < 2.0 * S_estimate, float(r[np.argmax(rv)]),
                                       2.0 * S_estimate - v2,
                                       f"{v2:.6g} vs 2S={2.0 * S_estimate:.6g}")

        far = float(V.radial(R_FAR))
        checks['V3'] = AssumptionCheck('V3', far <= 1e-6 * scale, R_FAR,
                                       1e-6 * scale - far, f"V({R_FAR:.0e})={far:.3g}")

        values = V.values(grid)
        mirrored = values
        for axis in range(grid.dim):
            mirrored = np.roll(np.flip(mirrored, axis=axis), 1, axis=axis)
        swapped = np.swapaxes(values, 0, -1)
        asym = float(max(np.max(np.abs(values - mirrored)), np.max(np.abs(values - swapped))))
        checks['V4'] = AssumptionCheck('V4', asym <= tol, 0.0, tol - asym,
                                       f"reflection/axis-swap gap {asym:.3g}")

        checks.update(self.check_virial(model, grid))

        failed = [name for name, check in checks.items() if not check.satisfied]
        if failed:
            logger.info(f"Assumption checks not satisfied: {', '.join(failed)}")
        return AssumptionReport(checks, v2, 2.0 * S_estimate)
