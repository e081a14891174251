"""Exception hierarchy shared by all design engines."""


class BacsError(Exception):
    """Base class for all package errors."""


class DomainError(BacsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NoSignChangeError(BacsError, ValueError):
    """A bracketing root finder was given an interval without a sign change."""


class ConvergenceError(BacsError, RuntimeError):
    """An iterative solver failed to converge.

    Attributes:
        iterations: Number of iterations performed before giving up.
        residual: Last achieved residual, if known.
    """

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class DegenerateCharacteristicsError(BacsError, ValueError):
    """Specificity or sensitivity sits on a boundary where odds are undefined."""


class InfeasibleDesignError(BacsError):
    """No design satisfies the requested constraints.

    Attributes:
        details: Diagnostic payload (best margins, smallest feasible size, ...).
    """

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


class ConfigError(BacsError, ValueError):
    """A run configuration failed validation."""
