"""Propositional STRIPS planning: fluents, actions, tasks, and execution.

States are frozensets of fluent names (closed world: absent means false).
Actions carry signed precondition and effect sets; goals are signed fluent
sets interpreted conjunctively or disjunctively.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from popmachine.errors import DomainMismatchError, PreconditionError

Fluent = str
PlanningState = frozenset[str]

EMPTY_STATE: PlanningState = frozenset()


@dataclass(frozen=True)
class PlanningAction:
    """An action with positive/negative preconditions and add/delete effects."""

    name: str
    pre_pos: frozenset[str] = frozenset()
    pre_neg: frozenset[str] = frozenset()
    eff_pos: frozenset[str] = frozenset()
    eff_neg: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.name:
            raise ValueError("action name must be nonempty")
        if self.pre_pos & self.pre_neg:
            raise ValueError(
                f"action {self.name}: fluents {sorted(self.pre_pos & self.pre_neg)} "
                "appear in both pre+ and pre-"
            )
        if self.eff_pos & self.eff_neg:
            raise ValueError(
                f"action {self.name}: fluents {sorted(self.eff_pos & self.eff_neg)} "
                "appear in both eff+ and eff-"
            )

    @property
    def mentioned_fluents(self) -> frozenset[str]:
        return self.pre_pos | self.pre_neg | self.eff_pos | self.eff_neg

    def __repr__(self):
        return f"PlanningAction({self.name!r})"


class GoalMode(Enum):
    CONJUNCTIVE = "conjunctive"
    DISJUNCTIVE = "disjunctive"


@dataclass(frozen=True)
class Goal:
    """Signed goal condition over fluents."""

    pos: frozenset[str] = frozenset()
    neg: frozenset[str] = frozenset()
    mode: GoalMode = GoalMode.CONJUNCTIVE

    def __post_init__(self):
        if self.pos & self.neg:
            raise ValueError(f"goal fluents {sorted(self.pos & self.neg)} appear with both signs")


@dataclass(frozen=True)
class PlanningDomain:
    """A set of fluents and the actions defined over them."""

    fluents: frozenset[str]
    actions: tuple[PlanningAction, ...]

    def __post_init__(self):
        for f in self.fluents:
            if not f:
                raise ValueError("fluent names must be nonempty")
        names = [a.name for a in self.actions]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate action names: {dup}")
        for a in self.actions:
            undeclared = a.mentioned_fluents - self.fluents
            if undeclared:
                raise ValueError(f"action {a.name} mentions undeclared fluents {sorted(undeclared)}")
        # Canonical action order so identical domains compare equal.
        object.__setattr__(self, "actions", tuple(sorted(self.actions, key=lambda a: a.name)))

    def action(self, name: str) -> PlanningAction:
        for a in self.actions:
            if a.name == name:
                return a
        raise KeyError(name)


@dataclass(frozen=True)
class PlanningTask:
    """An initial state and goal over a domain."""

    domain: PlanningDomain
    init: PlanningState
    goal: Goal

    def __post_init__(self):
        undeclared = (self.init | self.goal.pos | self.goal.neg) - self.domain.fluents
        if undeclared:
            raise ValueError(f"task mentions undeclared fluents {sorted(undeclared)}")


def applicable(state: PlanningState, action: PlanningAction, domain: PlanningDomain | None = None) -> bool:
    """True iff the action's signed preconditions hold in state."""
    if domain is not None and not action.mentioned_fluents <= domain.fluents:
        raise DomainMismatchError(
            f"action {action.name} mentions fluents outside the domain: "
            f"{sorted(action.mentioned_fluents - domain.fluents)}"
        )
    return action.pre_pos <= state and not (action.pre_neg & state)


def apply(state: PlanningState, action: PlanningAction) -> PlanningState:
    """Successor state under the action; raises PreconditionError if inapplicable."""
    if not applicable(state, action):
        raise PreconditionError(
            f"action {action.name} not applicable",
            missing=action.pre_pos - state,
            forbidden=action.pre_neg & state,
        )
    return (state - action.eff_neg) | action.eff_pos


def is_goal(state: PlanningState, goal: Goal) -> bool:
    """Check a state against a signed goal under its conjunctive/disjunctive mode."""
    if goal.neg & state:
        return False
    if goal.mode is GoalMode.CONJUNCTIVE:
        return goal.pos <= state
    return bool(goal.pos & state)


def execute_sequence(actions, init: PlanningState) -> PlanningState:
    """Fold a sequence of actions over init, raising on the first violation.

    The raised PreconditionError carries the index of the offending action.
    """
    state = init
    for i, action in enumerate(actions):
        try:
            state = apply(state, action)
        except PreconditionError as e:
            raise PreconditionError(
                f"step {i} ({action.name}): {e}",
                missing=e.missing,
                forbidden=e.forbidden,
                index=i,
            ) from None
    return state
