"""Exception hierarchy shared by all modules."""


class HDConfError(Exception):
    """Base class for errors raised by hdconf."""


class DomainError(HDConfError, ValueError):
    """An argument lies outside the domain of an operation."""


class DivisibilityError(DomainError):
    """Block size does not divide the dimension."""


class NotSPDError(DomainError):
    """Matrix is not (numerically) symmetric positive definite."""


class SizeError(DomainError):
    """Requested dense object exceeds the supported size cap."""


class ConvergenceError(HDConfError, ArithmeticError):
    """An iterative method failed to converge.

    The last iterate is kept on ``last_value``.
    """

    def __init__(self, message, last_value=None):
        super().__init__(message)
        self.last_value = last_value


class NotFoundError(HDConfError, LookupError):
    """A bounded search finished without finding a solution."""


class ConfigurationError(HDConfError, ValueError):
    """An experiment configuration is unusable."""
