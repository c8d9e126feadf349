"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An argument violates a documented precondition."""


class DivergenceError(ArithmeticError):
    """A run produced non-finite or runaway values.

    ``step`` is the 1-based index of the failing step (``None`` inside a
    single step), ``stage`` the 1-based stage index when the failure was
    detected while evaluating a stage derivative.
    """

    def __init__(self, message, step=None, stage=None):
        super().__init__(message)
        self.step = step
        self.stage = stage
