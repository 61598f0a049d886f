"""Validation utility functions for fracground."""
from typing import List, Optional, Tuple

import numpy as np

from models import ExperimentConfig, ExperimentName, KernelMethod, KernelProfile
from models.grid import MAX_GRID_POINTS

KERNEL_SPACING = 0.1


def validate_order_range(config: ExperimentConfig) -> Tuple[bool, Optional[str]]:
    """The continuation existence path needs s > 1/2; existence2 relaxes it."""
    if config.name == ExperimentName.EXISTENCE and config.model.s <= 0.5:
        return False, (f"order: experiment 'existence' needs s > 1/2, got s={config.model.s}; "
                       "use 'existence2' for 0 < s < 1")
    return True, None


def validate_subcritical(config: ExperimentConfig) -> Tuple[bool, Optional[str]]:
    """p + 1 must stay below the critical exponent 2N/(N-2s)."""
    model = config.model
    if not model.is_subcritical():
        return False, (f"subcriticality: p+1={model.nonlinearity.p + 1.0:.6g} "
                       f">= 2*={model.critical_exponent:.6g}")
    return True, None


def validate_fit_window(config: ExperimentConfig) -> Tuple[bool, Optional[str]]:
    r1, r2 = config.fit_window
    if not 0.0 < r1 < r2:
        return False, f"fit_window: need 0 < r1 < r2, got ({r1}, {r2})"
    if not r2 < config.grid.half_width / 2.0:
        return False, f"fit_window: r2={r2} must stay below L/2={config.grid.half_width / 2.0}"
    return True, None


def validate_radii(config: ExperimentConfig) -> Tuple[bool, Optional[str]]:
    if not config.radii:
        return False, "radii: at least one radius is required"
    limit = config.grid.half_width / 2.0
    outside = [r for r in config.radii if not 0.0 <= r < limit]
    if outside:
        return False, f"radii: {outside} leave [0, L/2={limit})"
    return True, None


def validate_lambda_count(config: ExperimentConfig) -> Tuple[bool, Optional[str]]:
    if config.solver.lambda_count < 3:
        return False, f"lambda_count: need at least 3, got {config.solver.lambda_count}"
    return True, None


def validate_kernel_setup(config: ExperimentConfig) -> Tuple[bool, Optional[str]]:
    """Kernel radius coverage and grid size for the grid method."""
    r_max = config.kernel_r_max
    if r_max < 8.0:
        return False, f"kernel_r_max: decay report needs R_max >= 8, got {r_max}"
    method = config.kernel_method
    if method is None:
        method = KernelMethod.QUADRATURE_1D if config.model.dim == 1 else KernelMethod.GRID_FFT
    if method == KernelMethod.QUADRATURE_1D and config.model.dim != 1:
        return False, f"kernel_method: quadrature is only available for N=1, got N={config.model.dim}"
    if method == KernelMethod.GRID_FFT:
        points = int(np.ceil(6.0 * r_max / KERNEL_SPACING))
        points += points % 2
        if points ** config.model.dim > MAX_GRID_POINTS:
            return False, (f"kernel grid: {points}^{config.model.dim} points exceed "
                           f"{MAX_GRID_POINTS}; lower kernel_r_max")
    return True, None


def validate_pad(config: ExperimentConfig) -> Tuple[bool, Optional[str]]:
    if config.pad < 1:
        return False, f"pad: need an integer >= 1, got {config.pad}"
    return True, None


def validate_noncrit_steps(config: ExperimentConfig) -> Tuple[bool, Optional[str]]:
    if config.noncrit_steps < 1:
        return False, f"noncrit_steps: need at least 1, got {config.noncrit_steps}"
    return True, None


def validate_threads(threads: int) -> Tuple[bool, Optional[str]]:
    if threads < 1:
        return False, f"threads: need at least 1, got {threads}"
    return True, None


COMMAND_VALIDATORS = {
    'verify': (validate_subcritical, validate_pad),
    'solve': (validate_order_range, validate_subcritical, validate_fit_window),
    'sweep': (validate_order_range, validate_subcritical, validate_lambda_count),
    'noncrit': (validate_subcritical, validate_radii, validate_noncrit_steps),
    'kernel': (validate_kernel_setup,),
}


def validate_experiment(config: ExperimentConfig, command: str) -> List[str]:
    """Messages of every failed validator for the command."""
    failures = []
    for validator in COMMAND_VALIDATORS.get(command, ()):
        ok, message = validator(config)
        if not ok:
            failures.append(message)
    return failures


def validate_kernel_profile(profile: KernelProfile, rtol: float = 1e-6) -> Tuple[bool, Optional[str]]:
    """Positive and non-increasing within rtol of the leading value."""
    values = profile.values
    if np.any(values <= 0):
        k = int(np.argmin(values))
        return False, f"kernel not positive at r={profile.radii[k]:.4g} (K={values[k]:.3e})"
    rises = np.diff(values)
    slack = rtol * abs(values[0])
    if np.any(rises > slack):
        k = int(np.argmax(rises))
        return False, f"kernel increases after r={profile.radii[k]:.4g} by {rises[k]:.3e}"
    return True, None
