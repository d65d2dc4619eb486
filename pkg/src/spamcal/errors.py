"""Exception types shared across the package.

Exit-code mapping used by the CLI: ValidationError -> 2,
MissingDataError -> 3, NumericalError / ConvergenceError -> 4.
"""


class SpamcalError(Exception):
    """Base class for all package errors."""


class ValidationError(SpamcalError):
    """Invalid input: bad geometry, malformed file, non-stochastic matrix,
    or a noise model producing negative probabilities."""


class MissingDataError(SpamcalError):
    """A replay backend was asked for a prepared state it does not hold."""

    def __init__(self, missing, message=None):
        self.missing = list(missing) if not isinstance(missing, str) else [missing]
        if message is None:
            message = "missing prepared state(s): " + ", ".join(self.missing)
        super().__init__(message)


class NumericalError(SpamcalError):
    """Singular or ill-conditioned matrix; carries the condition estimate."""

    def __init__(self, message, rcond=None):
        self.rcond = rcond
        super().__init__(message)


class ConvergenceError(SpamcalError):
    """Iterative solver hit its iteration cap; carries the best iterate."""

    def __init__(self, message, best=None, residual=None, iterations=None):
        self.best = best
        self.residual = residual
        self.iterations = iterations
        super().__init__(message)
