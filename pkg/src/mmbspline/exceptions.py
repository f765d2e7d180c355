"""Exception types raised by mmbspline."""


class MMBSplineError(Exception):
    """Base class for all package errors."""


class DomainError(MMBSplineError, ValueError):
    """Empty domain, or points outside the basis domain."""


class UnsupportedDegreeError(MMBSplineError, ValueError):
    pass


class DimensionError(MMBSplineError, ValueError):
    """Mismatched shapes or too few observations / basis functions."""


class NumericalError(MMBSplineError, ArithmeticError):
    """Base class for failures that map to CLI exit code 3."""


class NotPositiveDefiniteError(NumericalError):
    """A Cholesky pivot was not strictly positive."""

    def __init__(self, pivot, message=None):
        self.pivot = pivot
        super().__init__(message or f"matrix is not positive definite (pivot {pivot})")


class NonPositiveVarianceError(NumericalError):
    """The residual variance estimate is negative beyond rounding slack."""


class NonFiniteLikelihoodError(NumericalError):
    pass
