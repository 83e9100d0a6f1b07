"""
Exceptions and warnings module.
Part of the pyTVSpec package.
"""


class InvalidInputError(ValueError):
    """Raised when an argument violates the documented preconditions."""


class EmptyDomainError(InvalidInputError):
    """Raised when no admissible changepoint location exists."""


class ResourceLimitError(RuntimeError):
    """Raised when an exhaustive computation would exceed its configured bound."""


class NumericalError(ArithmeticError):
    """Raised when an objective, filter or inverse transform leaves the real numbers."""


class ConvergenceWarning(UserWarning):
    """Issued when an optimizer stops before meeting its convergence criterion."""
