"""Exception types shared across the package."""


class DomainError(ValueError):
    """Arguments outside the mathematical domain of an operation."""


class NoDensityError(DomainError):
    """A density was requested from a law that has none."""


class NumericError(RuntimeError):
    """A numeric routine could not reach the requested tolerance.

    Carries the achieved error estimate in ``estimate`` when available.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class StageError(NumericError):
    """A stage of the iterative inversion failed; ``stage`` is its index."""

    def __init__(self, message, stage, estimate=None):
        super().__init__(message, estimate)
        self.stage = stage
