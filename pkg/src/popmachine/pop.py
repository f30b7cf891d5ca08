"""Enumeration of all partial-order plans for a STRIPS task.

The search grows a plan from sentinel start/finish steps, establishing one
open signed precondition at a time through a causal link from an existing or
freshly added step, and branching over every producer and every combination
of interval-separating constraints that resolves the current threats. Every
consistent complete plan is emitted; plans are deduplicated by action
multiset plus transitive closure of the ordering.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations, permutations, product as iter_product

from popmachine import planning as pl
from popmachine.errors import BudgetExceededError, PreconditionError

START_NAME = "__start__"
FINISH_NAME = "__finish__"

START_ID = 0
FINISH_ID = 1


@dataclass(frozen=True)
class Step:
    """One occurrence of an action inside a plan."""

    id: int
    action: pl.PlanningAction


@dataclass(frozen=True)
class CausalLink:
    """Step `producer` establishes the signed fluent consumed by `consumer`."""

    producer: int
    fluent: str
    positive: bool
    consumer: int


@dataclass(frozen=True)
class Ordering:
    """A strict partial order over step ids, stored as a set of pairs."""

    pairs: frozenset[tuple[int, int]] = frozenset()

    def __iter__(self):
        return iter(self.pairs)


@dataclass(frozen=True)
class PartialOrderPlan:
    steps: tuple[Step, ...]
    order: Ordering
    links: frozenset[CausalLink] = frozenset()

    def step_ids(self) -> tuple[int, ...]:
        return tuple(s.id for s in self.steps)

    def action_names(self) -> tuple[str, ...]:
        return tuple(sorted(s.action.name for s in self.steps))


@dataclass(frozen=True)
class PlanSet:
    """Canonically ordered, duplicate-free collection of partial-order plans."""

    plans: tuple[PartialOrderPlan, ...]

    def __len__(self):
        return len(self.plans)

    def __iter__(self):
        return iter(self.plans)

    def __getitem__(self, i):
        return self.plans[i]


def transitive_closure(pairs) -> frozenset[tuple[int, int]]:
    """All (i, j) with a nonempty path i -> j through the given pairs."""
    succ: dict[int, set[int]] = {}
    for i, j in pairs:
        succ.setdefault(i, set()).add(j)
    out = set()
    for root in succ:
        stack = list(succ[root])
        seen = set()
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(succ.get(n, ()))
        out.update((root, n) for n in seen)
    return frozenset(out)


def is_consistent(order) -> bool:
    """True iff the ordering is acyclic."""
    pairs = order.pairs if isinstance(order, Ordering) else order
    return all(i != j for i, j in transitive_closure(pairs))


def transitive_reduction(pairs, nodes) -> frozenset[tuple[int, int]]:
    """Smallest edge set with the same transitive closure (requires acyclicity)."""
    closure = transitive_closure(pairs)
    if any(i == j for i, j in closure):
        raise ValueError("ordering contains a cycle")
    nodes = set(nodes)
    keep = set()
    for i, j in closure:
        if i in nodes and j in nodes:
            if not any((i, k) in closure and (k, j) in closure for k in nodes if k not in (i, j)):
                keep.add((i, j))
    return frozenset(keep)


def _effects(action: pl.PlanningAction, positive: bool) -> frozenset[str]:
    return action.eff_pos if positive else action.eff_neg


def _signed_preconditions(action: pl.PlanningAction):
    for f in sorted(action.pre_pos):
        yield f, True
    for f in sorted(action.pre_neg):
        yield f, False


def _unresolved_threats(steps: dict[int, pl.PlanningAction], pairs, links):
    """Triples (s, producer, consumer) where step s undoes a link's fluent
    and is not already ordered outside the link's interval."""
    closure = transitive_closure(pairs)
    threats = []
    for sid in sorted(steps):
        action = steps[sid]
        for link in sorted(links, key=lambda l: (l.producer, l.consumer, l.fluent, l.positive)):
            if sid in (link.producer, link.consumer):
                continue
            if link.fluent not in _effects(action, not link.positive):
                continue
            if (sid, link.producer) in closure or (link.consumer, sid) in closure:
                continue
            threats.append((sid, link.producer, link.consumer))
    return threats


def resolve_threats(plan: PartialOrderPlan, new_link: CausalLink | None = None) -> list[frozenset[tuple[int, int]]]:
    """Every combination of interval separations for the plan's open threats.

    Each threat (s, a', a) contributes two alternatives, s before the producer
    or after the consumer; the caller must consistency-check each returned set
    against the plan's ordering. No threats yields a single empty set.
    """
    steps = {s.id: s.action for s in plan.steps}
    links = set(plan.links)
    if new_link is not None:
        links.add(new_link)
    threats = _unresolved_threats(steps, plan.order.pairs, links)
    alternatives = [[(s, producer), (consumer, s)] for s, producer, consumer in threats]
    return [frozenset(choice) for choice in iter_product(*alternatives)]


class _Enumerator:
    def __init__(self, task: pl.PlanningTask, max_repeats: int, node_limit: int):
        self.task = task
        self.max_repeats = max_repeats
        self.node_limit = node_limit
        self.nodes_visited = 0
        self.found: dict[tuple, PartialOrderPlan] = {}

    def run(self) -> tuple[PartialOrderPlan, ...]:
        goal = self.task.goal
        if goal.mode is pl.GoalMode.DISJUNCTIVE:
            # A disjunctive task is planned as the union over its disjuncts.
            subgoals = [pl.Goal(frozenset({f}), goal.neg) for f in sorted(goal.pos)]
        else:
            subgoals = [goal]
        for subgoal in subgoals:
            self._search_goal(subgoal)
        return _sorted_plans(self.found.values())

    def _search_goal(self, goal: pl.Goal):
        fluents = self.task.domain.fluents
        start = pl.PlanningAction(
            START_NAME, eff_pos=self.task.init, eff_neg=fluents - self.task.init
        )
        finish = pl.PlanningAction(FINISH_NAME, pre_pos=goal.pos, pre_neg=goal.neg)
        steps = {START_ID: start, FINISH_ID: finish}
        self._search(steps, frozenset({(START_ID, FINISH_ID)}), frozenset())

    def _search(self, steps, pairs, links):
        self.nodes_visited += 1
        if self.nodes_visited > self.node_limit:
            raise BudgetExceededError(
                f"plan search exceeded node budget of {self.node_limit}",
                plans=_sorted_plans(self.found.values()),
            )
        open_pcs = self._open_preconditions(steps, links)
        if not open_pcs:
            self._emit(steps, pairs, links)
            return
        consumer, fluent, positive = open_pcs[0]
        for producer_id, new_action in self._producers(steps, consumer, fluent, positive):
            steps2 = steps
            extra = set()
            if new_action is not None:
                producer_id = max(steps) + 1
                steps2 = dict(steps)
                steps2[producer_id] = new_action
                extra = {(START_ID, producer_id), (producer_id, FINISH_ID)}
            pairs2 = pairs | extra | {(producer_id, consumer)}
            if not is_consistent(pairs2):
                continue
            links2 = links | {CausalLink(producer_id, fluent, positive, consumer)}
            for separation in self._threat_combos(steps2, pairs2, links2):
                self._search(steps2, pairs2 | separation, links2)

    @staticmethod
    def _open_preconditions(steps, links):
        satisfied = {(l.consumer, l.fluent, l.positive) for l in links}
        out = []
        for sid in sorted(steps):
            for fluent, positive in _signed_preconditions(steps[sid]):
                if (sid, fluent, positive) not in satisfied:
                    out.append((sid, fluent, positive))
        return out

    def _producers(self, steps, consumer, fluent, positive):
        """Candidate establishers: existing steps by id, then new instances by name."""
        out = []
        for sid in sorted(steps):
            if sid != consumer and fluent in _effects(steps[sid], positive):
                out.append((sid, None))
        counts = Counter(a.name for sid, a in steps.items() if sid not in (START_ID, FINISH_ID))
        for action in self.task.domain.actions:
            if fluent in _effects(action, positive) and counts[action.name] < self.max_repeats:
                out.append((None, action))
        return out

    def _threat_combos(self, steps, pairs, links):
        threats = _unresolved_threats(steps, pairs, links)
        alternatives = [[(s, producer), (consumer, s)] for s, producer, consumer in threats]
        combos = []
        for choice in iter_product(*alternatives):
            if is_consistent(pairs | set(choice)):
                combos.append(frozenset(choice))
        return combos

    def _emit(self, steps, pairs, links):
        ids = [sid for sid in steps if sid not in (START_ID, FINISH_ID)]
        closure = transitive_closure(pairs)
        inner_pairs = frozenset((i, j) for i, j in closure if i in ids and j in ids)
        inner_links = frozenset(
            l for l in links if l.producer in ids and l.consumer in ids
        )
        plan = PartialOrderPlan(
            steps=tuple(Step(sid, steps[sid]) for sid in sorted(ids)),
            order=Ordering(inner_pairs),
            links=inner_links,
        )
        canon = canonicalize(plan)
        key = (canon.action_names(), transitive_closure(canon.order.pairs))
        self.found.setdefault(key, canon)


def _sorted_plans(plans) -> tuple[PartialOrderPlan, ...]:
    return tuple(sorted(plans, key=lambda p: (p.action_names(), sorted(p.order.pairs))))


def enumerate_pops(task: pl.PlanningTask, max_action_repeats: int = 1, node_limit: int = 10**6) -> PlanSet:
    """All partial-order plans for the task, canonicalized and deduplicated.

    Raises BudgetExceededError (carrying the plans found so far) if the
    search visits more than node_limit partial plans.
    """
    if max_action_repeats < 1:
        raise ValueError("max_action_repeats must be at least 1")
    return PlanSet(_Enumerator(task, max_action_repeats, node_limit).run())


def canonicalize(plan: PartialOrderPlan) -> PartialOrderPlan:
    """Relabel steps into canonical ids and reduce the ordering.

    Steps are sorted by action name; duplicate names are assigned the
    permutation minimizing the (closure, links) encoding so equal plans get
    identical canonical forms.
    """
    ids = [s.id for s in plan.steps]
    closure = transitive_closure(plan.order.pairs)
    if any(i == j for i, j in closure):
        raise ValueError("plan ordering contains a cycle")

    by_name: dict[str, list[int]] = {}
    for s in sorted(plan.steps, key=lambda s: (s.action.name, s.id)):
        by_name.setdefault(s.action.name, []).append(s.id)

    base = 0
    slot_groups = []  # (old ids in group, first new id)
    for name in sorted(by_name):
        slot_groups.append((by_name[name], base))
        base += len(by_name[name])

    best = None
    for perm_choice in iter_product(*[permutations(g) for g, _ in slot_groups]):
        relabel = {}
        for (group, first), perm in zip(slot_groups, perm_choice):
            for offset, old in enumerate(perm):
                relabel[old] = first + offset
        new_closure = frozenset(
            (relabel[i], relabel[j]) for i, j in closure if i in relabel and j in relabel
        )
        new_links = frozenset(
            CausalLink(relabel[l.producer], l.fluent, l.positive, relabel[l.consumer])
            for l in plan.links
        )
        key = (sorted(new_closure), sorted((l.producer, l.consumer, l.fluent, l.positive) for l in new_links))
        if best is None or key < best[0]:
            best = (key, relabel, new_closure, new_links)

    _, relabel, new_closure, new_links = best
    actions = {relabel[s.id]: s.action for s in plan.steps}
    new_ids = sorted(actions)
    return PartialOrderPlan(
        steps=tuple(Step(i, actions[i]) for i in new_ids),
        order=Ordering(transitive_reduction(new_closure, new_ids)),
        links=new_links,
    )


def linearisations(plan: PartialOrderPlan) -> frozenset[tuple[pl.PlanningAction, ...]]:
    """Every total order of the plan's steps consistent with its ordering."""
    ids = [s.id for s in plan.steps]
    actions = {s.id: s.action for s in plan.steps}
    pairs = {(i, j) for i, j in plan.order.pairs if i in actions and j in actions}
    if not is_consistent(pairs):
        raise ValueError("plan ordering contains a cycle")
    succ: dict[int, set[int]] = {i: set() for i in ids}
    indeg = {i: 0 for i in ids}
    for i, j in pairs:
        if j not in succ[i]:
            succ[i].add(j)
            indeg[j] += 1
    out: set[tuple[pl.PlanningAction, ...]] = set()
    seq: list[int] = []

    def backtrack():
        ready = [i for i in ids if indeg[i] == 0 and i not in taken]
        if not ready:
            if len(seq) == len(ids):
                out.add(tuple(actions[i] for i in seq))
            return
        for i in ready:
            taken.add(i)
            seq.append(i)
            for j in succ[i]:
                indeg[j] -= 1
            backtrack()
            for j in succ[i]:
                indeg[j] += 1
            seq.pop()
            taken.remove(i)

    taken: set[int] = set()
    backtrack()
    return frozenset(out)


def all_sequential_plans(plans: PlanSet) -> tuple[tuple[pl.PlanningAction, ...], ...]:
    """Union of the linearisations of every plan, in canonical order."""
    seqs: set[tuple[pl.PlanningAction, ...]] = set()
    for p in plans:
        seqs |= linearisations(p)
    return tuple(sorted(seqs, key=lambda s: tuple(a.name for a in s)))


def validate_pop(plan: PartialOrderPlan, task: pl.PlanningTask) -> bool:
    """True iff every linearisation executes from init and ends in a goal state."""
    try:
        lins = linearisations(plan)
    except ValueError:
        return False
    for seq in lins:
        try:
            final = pl.execute_sequence(seq, task.init)
        except PreconditionError:
            return False
        if not pl.is_goal(final, task.goal):
            return False
    return True


def brute_force_plans(task: pl.PlanningTask, max_len: int) -> frozenset[tuple[pl.PlanningAction, ...]]:
    """Oracle: all non-redundant successful action sequences up to max_len.

    A sequence is successful when it executes from init and its final state
    satisfies the goal; it is redundant when some proper subsequence is
    itself successful.
    """
    successful: set[tuple[pl.PlanningAction, ...]] = set()

    def dfs(state, seq):
        if pl.is_goal(state, task.goal):
            successful.add(seq)
        if len(seq) == max_len:
            return
        for action in task.domain.actions:
            if pl.applicable(state, action):
                dfs(pl.apply(state, action), seq + (action,))

    dfs(task.init, ())

    def redundant(seq):
        for n in range(len(seq)):
            for keep in combinations(range(len(seq)), n):
                if tuple(seq[i] for i in keep) in successful:
                    return True
        return False

    return frozenset(s for s in successful if not redundant(s))
