"""Exception hierarchy shared by all modules."""


class NonlocalFrontsError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(NonlocalFrontsError, ValueError):
    """Invalid configuration (inadmissible splitting exponent, bad sizes, ...).

    ``problems`` lists every violated invariant when several are detected at once.
    """

    def __init__(self, message, problems=None):
        super().__init__(message)
        self.problems = list(problems) if problems else [message]


class DomainError(NonlocalFrontsError, ValueError):
    """Argument outside the mathematical domain of a function."""


class DimensionError(NonlocalFrontsError, ValueError):
    """Vector/matrix size mismatch."""


class SolverError(NonlocalFrontsError, RuntimeError):
    """Iterative solver failed to reach the requested residual."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class MatrixError(NonlocalFrontsError, RuntimeError):
    """Matrix is not symmetric positive definite."""


class NumericalBlowUpError(NonlocalFrontsError, RuntimeError):
    """Non-finite values appeared in the field during time stepping."""

    def __init__(self, message, time_index=None):
        super().__init__(message)
        self.time_index = time_index


class InsufficientDataError(NonlocalFrontsError, ValueError):
    """Too few usable samples for a rate fit."""


class BracketError(NonlocalFrontsError, RuntimeError):
    """A root bracket could not be established (level never attained)."""
