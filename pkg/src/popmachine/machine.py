"""Reward machines induced by plan sets.

A machine's non-goal states are the proper-prefix state sequences of the
linearisations of a plan set; the goal state is absorbing. On observing a
signed label, the tracked planning state is updated; completing a tracked
linearisation (or hitting a goal state on a tracked prefix) jumps to the
machine's goal state, extending a known prefix advances, and anything else
self-loops. Every transition pays -1 except entry into (or staying at) the
goal state, which pays 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

from popmachine import planning as pl
from popmachine import pop as pp

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ObservationLabel:
    """A signed set of fluents: what became true and what became false."""

    pos: frozenset[str] = frozenset()
    neg: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.pos & self.neg:
            raise ValueError(f"label fluents {sorted(self.pos & self.neg)} carry both signs")

    def __repr__(self):
        parts = [f"+{f}" for f in sorted(self.pos)] + [f"-{f}" for f in sorted(self.neg)]
        return "<" + " ".join(parts) + ">" if parts else "<empty>"


EMPTY_LABEL = ObservationLabel()


def signed_delta(prev: frozenset[str], new: frozenset[str]) -> ObservationLabel:
    """The label observed when the true-fluent set changes from prev to new."""
    return ObservationLabel(pos=frozenset(new - prev), neg=frozenset(prev - new))


def action_label(action: pl.PlanningAction) -> ObservationLabel:
    """The signed postcondition of an action."""
    return ObservationLabel(pos=action.eff_pos, neg=action.eff_neg)


@dataclass(frozen=True)
class RmState:
    """Either a sequence of planning states (a linearisation prefix) or the goal."""

    seq: tuple[frozenset[str], ...] = ()
    is_goal: bool = False

    def last(self) -> frozenset[str]:
        return self.seq[-1]

    def __repr__(self):
        if self.is_goal:
            return "RmState(goal)"
        return "RmState(" + "|".join("{" + ",".join(sorted(s)) + "}" for s in self.seq) + ")"


GOAL_STATE = RmState(is_goal=True)


def _state_sort_key(u: RmState):
    return (len(u.seq), tuple(tuple(sorted(s)) for s in u.seq))


def _label_sort_key(lab: ObservationLabel):
    return (tuple(sorted(lab.pos)), tuple(sorted(lab.neg)))


@dataclass(frozen=True, eq=False)
class RewardMachine:
    """A deterministic machine over signed labels with -1/0 rewards."""

    states: frozenset[RmState]
    initial: RmState
    alphabet: frozenset[ObservationLabel]
    task: pl.PlanningTask
    complete: frozenset[tuple[frozenset[str], ...]] = field(repr=False)
    transitions: dict[tuple[RmState, ObservationLabel], RmState] = field(repr=False)

    @cached_property
    def state_list(self) -> tuple[RmState, ...]:
        """Canonical state order: prefixes by (length, content), goal last."""
        inner = sorted((u for u in self.states if not u.is_goal), key=_state_sort_key)
        return tuple(inner) + (GOAL_STATE,)

    @cached_property
    def state_index(self) -> dict[RmState, int]:
        return {u: i for i, u in enumerate(self.state_list)}

    @cached_property
    def label_list(self) -> tuple[ObservationLabel, ...]:
        return tuple(sorted(self.alphabet, key=_label_sort_key))

    def reward(self, u: RmState, u_next: RmState) -> float:
        return 0.0 if u_next.is_goal else -1.0


def rm_step(rm: RewardMachine, u: RmState, label: ObservationLabel) -> tuple[RmState, float]:
    """Transition on an arbitrary signed label (not restricted to the alphabet)."""
    if u not in rm.states:
        raise ValueError(f"state {u!r} does not belong to this reward machine")
    if u.is_goal:
        return u, 0.0
    new_state = (u.last() - label.neg) | label.pos
    ext = u.seq + (new_state,)
    extended = RmState(ext)
    if ext in rm.complete or (
        pl.is_goal(new_state, rm.task.goal) and extended in rm.states
    ):
        return GOAL_STATE, 0.0
    if extended in rm.states:
        return extended, -1.0
    return u, -1.0


def run_labels(rm: RewardMachine, labels) -> tuple[RmState, float]:
    """Run a label sequence from the initial state; returns (state, total reward)."""
    u = rm.initial
    total = 0.0
    for lab in labels:
        u, r = rm_step(rm, u, lab)
        total += r
    return u, total


def _machine_from_linearisations(linss, task: pl.PlanningTask) -> RewardMachine:
    initial = RmState(seq=(task.init,))
    states: set[RmState] = {initial, GOAL_STATE}
    completes: set[tuple[frozenset[str], ...]] = set()
    actions: set[pl.PlanningAction] = set()
    any_lin = False
    for lin in sorted(linss, key=lambda lin: tuple(a.name for a in lin)):
        any_lin = True
        actions.update(lin)
        trace = [task.init]
        for action in lin:
            trace.append(pl.apply(trace[-1], action))
        completes.add(tuple(trace))
        for k in range(1, len(lin) + 1):
            states.add(RmState(seq=tuple(trace[:k])))
    if not any_lin and not pl.is_goal(task.init, task.goal):
        log.warning("empty plan set: the reward machine will never reach its goal state")
    alphabet = frozenset(action_label(a) for a in actions)
    rm = RewardMachine(
        states=frozenset(states),
        initial=initial,
        alphabet=alphabet,
        task=task,
        complete=frozenset(completes),
        transitions={},
    )
    for u in rm.state_list:
        for lab in rm.label_list:
            rm.transitions[(u, lab)] = rm_step(rm, u, lab)[0]
    return rm


def build_mprm(plans: pp.PlanSet, task: pl.PlanningTask) -> RewardMachine:
    """The maximally permissive reward machine of a plan set."""
    linss = []
    for plan in plans:
        if not pp.validate_pop(plan, task):
            raise ValueError(f"plan with actions {plan.action_names()} does not solve the task")
        linss.extend(pp.linearisations(plan))
    return _machine_from_linearisations(linss, task)


def build_single_plan_rm(plan, task: pl.PlanningTask) -> RewardMachine:
    """Reward machine of one plan: a PartialOrderPlan or an action sequence."""
    if isinstance(plan, pp.PartialOrderPlan):
        if not pp.validate_pop(plan, task):
            raise ValueError(f"plan with actions {plan.action_names()} does not solve the task")
        linss = pp.linearisations(plan)
    else:
        seq = tuple(plan)
        final = pl.execute_sequence(seq, task.init)
        if not pl.is_goal(final, task.goal):
            raise ValueError("sequential plan does not reach a goal state")
        linss = [seq]
    return _machine_from_linearisations(linss, task)


def _fmt_state(u: RmState) -> str:
    if u.is_goal:
        return "goal"
    return "|".join("{" + ",".join(sorted(s)) + "}" for s in u.seq)


def _fmt_label(lab: ObservationLabel) -> str:
    parts = [f"+{f}" for f in sorted(lab.pos)] + [f"-{f}" for f in sorted(lab.neg)]
    return " ".join(parts) if parts else "empty"


def rm_to_text(rm: RewardMachine) -> str:
    """Deterministic plain-text listing of states, alphabet, and transitions."""
    states = rm.state_list
    labels = rm.label_list
    index = rm.state_index
    out = ["reward-machine"]
    out.append(f"states {len(states)}")
    out.append(f"initial {index[rm.initial]}")
    out.append(f"goal {index[GOAL_STATE]}")
    for i, u in enumerate(states):
        out.append(f"state {i} {_fmt_state(u)}")
    out.append(f"alphabet {len(labels)}")
    for i, lab in enumerate(labels):
        out.append(f"label {i} {_fmt_label(lab)}")
    for i, u in enumerate(states):
        for j, lab in enumerate(labels):
            u2, r = rm_step(rm, u, lab)
            out.append(f"trans {i} {j} {index[u2]} {int(r)}")
    return "\n".join(out) + "\n"


def rm_to_dot(rm: RewardMachine) -> str:
    """Graphviz rendering; self-loops are omitted for readability."""
    states = rm.state_list
    index = rm.state_index
    out = ["digraph rm {", "  rankdir=LR;"]
    for i, u in enumerate(states):
        shape = "doublecircle" if u.is_goal else "circle"
        label = _fmt_state(u).replace("|", "\\n")
        out.append(f'  u{i} [shape={shape}, label="{label}"];')
    for u in states:
        grouped: dict[int, list[str]] = {}
        for lab in rm.label_list:
            u2, r = rm_step(rm, u, lab)
            if u2 != u:
                grouped.setdefault(index[u2], []).append(f"{_fmt_label(lab)} / {int(r)}")
        for j in sorted(grouped):
            text = "\\n".join(grouped[j])
            out.append(f'  u{index[u]} -> u{j} [label="{text}"];')
    out.append("}")
    return "\n".join(out) + "\n"
