"""Exceptions shared across the package.

The CLI maps ValidationError to exit code 2 and UnsupportedRangeError to
exit code 3; everything else is a bug.
"""


class ValidationError(ValueError):
    """Input is structurally wrong or an exactness invariant failed."""


class IntegrityError(ValidationError):
    """An exact computation produced a value it must never produce
    (non-integer stack sum, inconsistent point counts, ...)."""


class UnsupportedRangeError(ValueError):
    """Argument is valid but outside the supported desk-scale range."""
