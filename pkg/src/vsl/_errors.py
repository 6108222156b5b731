"""Exception hierarchy.

Validation problems derive from ``ValueError``; numerical failures derive from
``ArithmeticError``. The CLI maps the two families to exit codes 2 and 1.
"""


class VslError(Exception):
    pass


class ValidationError(VslError, ValueError):
    pass


class NumericalError(VslError, ArithmeticError):
    pass


class PositivityError(NumericalError):
    """A Hankel or Toeplitz pivot was not positive."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"non-positive pivot at index {index}")


class PrecisionError(NumericalError):
    """Result could not be certified at the available precision."""


class ConvergenceError(NumericalError):
    pass


class TruncationError(NumericalError):
    """A series tail bound was not met within the term cap."""

    def __init__(self, message, partial_sums=None):
        self.partial_sums = partial_sums
        super().__init__(message)


class PoleError(NumericalError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"zero denominator at depth {index}")


class ConditioningError(NumericalError):
    pass


class BlowUpError(NumericalError):
    pass
