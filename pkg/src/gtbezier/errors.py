"""Exception types raised by the kernel."""


class GTBezierError(Exception):
    """Base class for all kernel errors."""


class DomainError(GTBezierError, ValueError):
    """Evaluation point outside the parameter domain, or a negative power base."""


class SingularityError(GTBezierError, ZeroDivisionError):
    """Zero base raised to a negative exponent."""


class DegenerateError(GTBezierError, ValueError):
    """Knot configuration without a proper convex hull (collinear, repeated, ...)."""


class PreconditionError(GTBezierError, ValueError):
    """An operation was called with arguments violating its stated preconditions."""


class SizeError(PreconditionError):
    """Input too large for brute-force enumeration."""


class SolverError(GTBezierError, ArithmeticError):
    """Numerical failure: singular system, overflow, ..."""


class ConvergenceError(SolverError):
    """An iteration did not reach its tolerance. ``history`` holds the residuals."""

    def __init__(self, message, history=()):
        super().__init__(message)
        self.history = list(history)


class NonPositiveCoefficientsWarning(UserWarning):
    """Partition coefficients were solved but some are not strictly positive."""


class NormalizationFallbackWarning(UserWarning):
    """Primitive-integer edge normalization requested for an irrational edge."""
