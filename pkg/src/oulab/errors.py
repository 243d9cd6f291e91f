"""Exception types shared across the package."""


class OULabError(Exception):
    """Base class for all package-specific errors."""


class InvalidArgumentError(OULabError, ValueError):
    """An argument violates a documented precondition."""


class NumericalDomainError(OULabError, ArithmeticError):
    """A function produced a non-finite value during evaluation.

    Carries the offending abscissa in ``point`` when known.
    """

    def __init__(self, message: str, point: float | None = None):
        super().__init__(message)
        self.point = point


class ModelInconsistencyError(OULabError, ValueError):
    """Supplied (F, f, f') triple fails the finite-difference consistency check.

    ``point`` is the probe abscissa with the largest mismatch.
    """

    def __init__(self, message: str, point: float | None = None):
        super().__init__(message)
        self.point = point


class NoConvergenceError(OULabError, RuntimeError):
    """An iteration diverged; ``best`` holds the best iterate seen."""

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class NumericalStiffnessError(OULabError, RuntimeError):
    """The adaptive integrator underflowed its step size.

    ``slope`` records the trial shooting slope that failed.
    """

    def __init__(self, message: str, slope: float | None = None):
        super().__init__(message)
        self.slope = slope


class DivergenceError(OULabError, RuntimeError):
    """Time stepping produced NaN or overflow; ``step`` is the step index."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class DegenerateFieldError(OULabError, RuntimeError):
    """A field diagnostic found too few noncritical nodes to be meaningful."""
