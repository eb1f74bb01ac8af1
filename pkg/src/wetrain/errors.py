"""Exception types raised by the wetrain numerics and CLI."""


class WetrainError(Exception):
    """Base class for all package errors."""


class LimitExceeded(WetrainError):
    """Exact series requested beyond its configured size limit."""


class ConvergenceFailure(WetrainError):
    """Quadrature could not reach the requested tolerance."""


class DegenerateCase(WetrainError):
    """Quantity is undefined for the given parameters (e.g. M = 1)."""


class RootFindingFailure(WetrainError):
    """Stationary-point polynomial could not be solved reliably."""

    def __init__(self, message, n1=None):
        super().__init__(message if n1 is None else f"{message} (n1={n1})")
        self.n1 = n1


class ConfigError(WetrainError):
    """Invalid experiment configuration."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
