"""Exception types shared across the package."""

from __future__ import annotations


class PopmachineError(Exception):
    """Base class for errors raised by this package."""


class ParseError(PopmachineError):
    """Input text was rejected; carries the offending 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class DomainMismatchError(PopmachineError):
    """An object referenced fluents or actions outside its declared domain."""


class PreconditionError(PopmachineError):
    """An action was applied in a state violating its preconditions."""

    def __init__(self, message: str, *, missing=(), forbidden=(), index: int | None = None):
        super().__init__(message)
        self.missing = frozenset(missing)
        self.forbidden = frozenset(forbidden)
        self.index = index


class BudgetExceededError(PopmachineError):
    """A search exhausted its node budget; carries the plans found so far."""

    def __init__(self, message: str, plans=()):
        super().__init__(message)
        self.plans = tuple(plans)


class CapacityError(PopmachineError):
    """A constructed state space exceeded its configured node cap."""


class ConvergenceError(PopmachineError):
    """An iterative solver failed to converge within its iteration budget."""


class ExperimentError(PopmachineError):
    """A training run or aggregation step in an experiment failed."""
