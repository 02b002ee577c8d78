"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input violates a documented precondition (shape, range, Hermiticity...)."""


class NumericError(ArithmeticError):
    """A numerical procedure failed or produced an out-of-contract result."""

    def __init__(self, message, residual=None, index=None):
        super().__init__(message)
        self.residual = residual
        self.index = index


class RootNotFoundError(NumericError):
    """A bracketing root search found no sign change."""
