from __future__ import annotations

from typing import Optional


class GreensLabError(Exception):
    """Base class for every error raised by greenslab."""


class GridError(GreensLabError, ValueError):
    pass


class GridMismatchError(GreensLabError, ValueError):
    pass


class NonFiniteValueError(GreensLabError, ValueError):
    pass


class StencilError(GreensLabError, ValueError):
    pass


class OracleDomainError(GreensLabError, ValueError):
    pass


class SingularMatrixError(GreensLabError):
    """Factorization produced a pivot below the singularity threshold."""

    def __init__(self, message: str, min_pivot: float):
        super().__init__(message)
        self.min_pivot = min_pivot


class NoConvergenceError(GreensLabError):
    def __init__(self, message: str, iterations: int, estimate: Optional[float] = None):
        super().__init__(message)
        self.iterations = iterations
        self.estimate = estimate


class PreconditionViolated(GreensLabError):
    pass


class WitnessConstructionFailed(GreensLabError):
    """Even the single-node load failed to produce a negative mean."""


class TheoremViolation(GreensLabError):
    """An internal theorem check failed; this indicates a bug, not bad input."""

    def __init__(self, message: str, checks: Optional[list] = None):
        super().__init__(message)
        self.checks = list(checks or [])


class DimensionError(GreensLabError, ValueError):
    pass
