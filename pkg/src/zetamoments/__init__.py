"""Moments of random-matrix characteristic polynomials and of the Riemann zeta function at its zeros."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DomainError,
    MissedZeroError,
    MomentOverflowError,
    MultipleZeroError,
    NumericalDegeneracyError,
    SingularityError,
    UnsupportedMethodError,
    ZeroTableFormatError,
)

__all__ = [
    "DomainError",
    "MissedZeroError",
    "MomentOverflowError",
    "MultipleZeroError",
    "NumericalDegeneracyError",
    "SingularityError",
    "UnsupportedMethodError",
    "ZeroTableFormatError",
    "__version__",
]
