"""Exception types shared across the solver."""


class FracEFGError(Exception):
    """Base class for all solver errors."""


class ConfigurationError(FracEFGError, ValueError):
    """Invalid discretization, parameter or run configuration."""


class CoverageError(FracEFGError):
    """MLS moment matrix is singular or ill-conditioned at a point."""

    def __init__(self, message, point=None, n_active=None):
        super().__init__(message)
        self.point = point
        self.n_active = n_active


class SolverError(FracEFGError):
    """Linear system could not be factorized."""


class NonConvergenceError(FracEFGError):
    """Newton-Raphson iteration failed; ``history`` holds the records."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history or []


class InvariantError(FracEFGError):
    """Internal consistency check failed."""
