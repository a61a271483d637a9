"""Exception types shared across the package."""


class DreError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(DreError):
    """Invalid user-supplied data (measure, window, parameters)."""


class DimensionError(DreError):
    """Operation requires a lattice dimension it was not given (usually d = 2)."""


class ModelAssumptionError(DreError):
    """The environment violates an assumption the operation relies on.

    Carries the offending lattice site when one exists.
    """

    def __init__(self, message: str, site=None):
        super().__init__(message)
        self.site = site


class ConsistencyError(DreError):
    """An internal invariant failed; indicates a bug, not bad input."""
