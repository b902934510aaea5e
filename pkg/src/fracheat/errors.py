"""Shared exception types.

ValidationError: a parameter or config violates a documented precondition.
NumericalError: a quadrature or solver failed to reach its accuracy target;
carries the achieved error estimate so callers can report it.
"""


class ValidationError(ValueError):
    pass


class NumericalError(RuntimeError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
