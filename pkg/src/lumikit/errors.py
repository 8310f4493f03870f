"""Exception types shared across the package."""


class LumikitError(Exception):
    """Base class for all lumikit errors."""


class ValidationError(LumikitError, ValueError):
    """Invalid input: out-of-range value, shape mismatch, malformed file content.

    CLI maps this to exit code 1; I/O problems surface as OSError (exit code 2).
    """


class DegenerateImageError(LumikitError):
    """Image content defeats an estimator (zero channel statistic, empty ratio set)."""
