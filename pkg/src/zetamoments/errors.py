"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedMethodError(ValueError):
    """A requested evaluation method does not apply to the given arguments."""


class MomentOverflowError(OverflowError):
    """A moment is too large to be represented as a double."""


class SingularityError(ArithmeticError):
    """A negative power was requested exactly at a zero of the polynomial."""


class NumericalDegeneracyError(ArithmeticError):
    """A random matrix was numerically rank deficient."""


class MissedZeroError(RuntimeError):
    """The zero search found a count inconsistent with the counting function."""

    def __init__(self, message, found=None, expected=None):
        super().__init__(message)
        self.found = found
        self.expected = expected


class ZeroTableFormatError(ValueError):
    """A zero-table file violates the plain-text format."""


class MultipleZeroError(ArithmeticError):
    """Two tabulated zeros are too close to be treated as simple zeros."""
