"""Exception hierarchy for fracground."""
from typing import Any, Dict, List, Optional


class FracGroundError(Exception):
    """Base class for every error raised by fracground."""


class ConfigError(FracGroundError, ValueError):
    """Experiment or environment configuration is invalid."""

    def __init__(self, message: str, failures: Optional[List[str]] = None):
        super().__init__(message)
        self.failures = failures or []


class PreconditionError(FracGroundError, ValueError):
    """An operation was called outside its domain."""


class GridTooLargeError(PreconditionError):
    """Pairwise quadrature requested on a grid with too many points."""


class SupportOverflowError(PreconditionError):
    """A dilation would push too much mass outside the box."""

    def __init__(self, message: str, tail_mass: float):
        super().__init__(message)
        self.tail_mass = tail_mass


class ProfileTooLargeError(PreconditionError):
    """A plateau profile does not fit in the box."""


class RadiusCoverageError(PreconditionError):
    """A kernel profile does not cover the radii a report needs."""


class FitWindowError(PreconditionError):
    """A decay-fit window is outside the box or underflows."""


class QuadratureError(FracGroundError, RuntimeError):
    """Adaptive quadrature did not reach its tolerance."""


class ProjectionError(FracGroundError, RuntimeError):
    """No dilation parameter puts the field on the requested manifold."""

    def __init__(self, message: str, profile: Optional[Dict[str, List[float]]] = None):
        super().__init__(message)
        self.profile = profile or {}


class PathConstructionError(FracGroundError, RuntimeError):
    """A dilation path could not reach negative energy inside the box."""

    def __init__(self, message: str, profile: Optional[Dict[str, List[float]]] = None):
        super().__init__(message)
        self.profile = profile or {}


class SolverError(FracGroundError, RuntimeError):
    """Base class for iterative solver failures."""


class SolverDivergenceError(SolverError):
    """Iterate norm exceeded the divergence threshold."""


class SolverCollapseError(SolverError):
    """Iterate collapsed to the trivial solution."""


class SolverStagnationError(SolverError):
    """Mountain-pass relaxation stopped making progress."""


class ContinuationAborted(SolverError):
    """A lambda-continuation step failed; the partial trace is attached."""

    def __init__(self, message: str, trace: Any = None):
        super().__init__(message)
        self.trace = trace


class PropertyFailure(FracGroundError):
    """One or more verification properties failed."""

    def __init__(self, message: str, failed: Optional[List[str]] = None):
        super().__init__(message)
        self.failed = failed or []
