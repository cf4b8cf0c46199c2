"""Exception types shared across the package.

Each class maps onto one CLI exit code (see ``translate_lab.cli``).
"""


class TranslateLabError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class ConfigurationError(TranslateLabError, ValueError):
    """Invalid parameters or configuration (bad grid size, bad schedule, ...)."""

    exit_code = 2

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DomainError(TranslateLabError, ValueError):
    """Argument outside the mathematical domain of an operation."""

    exit_code = 2


class ValidationError(TranslateLabError, ValueError):
    """Structural validation failure (overlapping intervals and the like)."""

    exit_code = 2


class PreconditionError(TranslateLabError, ValueError):
    """A documented precondition of an operation is not met."""

    exit_code = 2


class NumericalHazardError(TranslateLabError, ArithmeticError):
    """Overflow, division by a vanishing denominator, or a similar hazard."""

    exit_code = 3


class RangeError(NumericalHazardError):
    """Values overflow the floating point range."""


class DivisionHazardError(NumericalHazardError):
    """Division by a quantity that is numerically zero."""


class ResourceError(TranslateLabError):
    """Requested problem exceeds a configured size cap."""

    exit_code = 2


class ReproducibilityError(TranslateLabError):
    """Replayed metrics drift from the recorded report."""

    exit_code = 1
