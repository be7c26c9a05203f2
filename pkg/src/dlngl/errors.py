"""Exception types raised across the package."""


class DlnGlError(Exception):
    """Base class for every error raised by dlngl."""


class InvalidArgument(DlnGlError, ValueError):
    pass


class UnsupportedDegree(DlnGlError, ValueError):
    pass


class DimensionMismatch(DlnGlError, ValueError):
    pass


class InvalidWeight(DlnGlError, ValueError):
    pass


class InvalidSource(DlnGlError, ValueError):
    pass


class UnsupportedQuery(DlnGlError, LookupError):
    pass


class ConfigurationError(DlnGlError, ValueError):
    pass


class SolverFailure(DlnGlError, RuntimeError):
    """A linear solve did not reach the requested residual.

    ``residual`` is the final relative residual and ``step`` the time step
    index when raised from inside the time loop (``None`` otherwise).
    """

    def __init__(self, message, residual=float("nan"), step=None):
        super().__init__(message)
        self.residual = residual
        self.step = step


class SingularMatrix(SolverFailure):
    pass


class DivergenceDetected(SolverFailure):
    pass


class SweepAborted(SolverFailure):
    """A convergence sweep stopped early; ``table`` holds the rows that completed."""

    def __init__(self, message, table=None, residual=float("nan"), step=None):
        super().__init__(message, residual, step)
        self.table = table
