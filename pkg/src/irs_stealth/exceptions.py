"""Exception hierarchy used across the package."""


class StealthError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(StealthError, ValueError):
    """Raised when a size argument is zero, negative or inconsistent."""


class LayoutError(StealthError, ValueError):
    """Raised for an ES-surface layout that cannot be split into IRS/EWAM parts."""


class ConfigError(StealthError, ValueError):
    """Raised for malformed or out-of-range configuration values."""


class SolverError(StealthError, RuntimeError):
    """Raised when an optimizer fails to reach its tolerance.

    The last residuals are kept on ``residuals`` for diagnostics.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})
