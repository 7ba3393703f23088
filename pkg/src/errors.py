"""
Exception hierarchy for ParkedTrees.

Every error raised by the library derives from ParkedTreesError so the CLI
can map failures to exit codes in one place.
"""


class ParkedTreesError(Exception):
    """Base class for all library errors."""


class ConfigError(ParkedTreesError):
    """Malformed configuration (unknown family, unparsable scalar, ...)."""


class AssumptionError(ParkedTreesError):
    """
    A standing assumption on the weight sequence is violated.

    Attributes:
        assumption: Short name of the violated assumption, e.g. "b_0>0".
    """

    def __init__(self, assumption: str, message: str | None = None):
        self.assumption = assumption
        super().__init__(message or f"standing assumption violated: {assumption}")


class BackendMismatchError(ParkedTreesError):
    """Series of different coefficient backends were combined."""


class SeriesError(ParkedTreesError):
    """Ill-posed series operation (non-unit division, bad composition, ...)."""


class DomainError(ParkedTreesError):
    """Evaluation requested outside the domain of a function."""


class OutOfScopeError(ParkedTreesError):
    """The request is outside what the library implements (e.g. dense phase)."""


class InconsistencyError(ParkedTreesError):
    """An internal cross-check failed; indicates a bug or broken input."""


class BudgetExceededError(ParkedTreesError):
    """
    A work budget ran out before the requested tolerance was reached.

    Attributes:
        partial: Partial result accumulated before the budget ran out.
        bound: Estimate of the remaining error, if known.
    """

    def __init__(self, message: str, partial=None, bound=None):
        self.partial = partial
        self.bound = bound
        super().__init__(message)
