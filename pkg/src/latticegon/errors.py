"""Exception types.

Validation problems (bad input, infeasible preconditions) derive from
``ValidationError``; numerical failures derive from ``NumericError``.  The CLI
maps the first family to exit code 2 and the second to exit code 3.
"""


class ValidationError(ValueError):
    pass


class NumericError(RuntimeError):
    pass


class InvalidBody(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class ConstructionError(ValidationError):
    pass


class NonZeroSum(ConstructionError):
    pass


class EmptyConstruction(ConstructionError):
    pass


class DegenerateClosing(ConstructionError):
    pass


class InfeasibleShape(ValidationError):
    pass


class SearchTooLarge(ValidationError):
    pass


class BudgetExceeded(NumericError):
    """Raised by the branch-and-bound search; ``best`` holds the uncertified incumbent."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NoConvergence(NumericError):
    pass


class NonPositive(NumericError):
    pass


class NotClosed(NumericError):
    pass
