"""Unit tests for partial-order plan enumeration."""

from importlib import resources

import pytest

from popmachine import domain_io
from popmachine.errors import BudgetExceededError
from popmachine.planning import Goal, PlanningAction, PlanningDomain, PlanningTask
from popmachine.pop import (
    CausalLink,
    Ordering,
    PartialOrderPlan,
    Step,
    all_sequential_plans,
    brute_force_plans,
    canonicalize,
    enumerate_pops,
    is_consistent,
    linearisations,
    resolve_threats,
    transitive_closure,
    transitive_reduction,
    validate_pop,
)

DATA = resources.files("popmachine") / "data" / "domains"


def load_task(dom: str, task: str) -> PlanningTask:
    return domain_io.parse_domain((DATA / dom).read_text()).tasks[task]


def lin_names(plan):
    return sorted(tuple(a.name for a in lin) for lin in linearisations(plan))


class TestOrderingPrimitives:
    def test_transitive_closure(self):
        assert transitive_closure({(1, 2), (2, 3)}) == frozenset({(1, 2), (2, 3), (1, 3)})

    def test_consistency(self):
        assert is_consistent(Ordering(frozenset({(1, 2), (2, 3)})))
        assert not is_consistent(Ordering(frozenset({(1, 2), (2, 1)})))

    def test_transitive_reduction(self):
        red = transitive_reduction({(1, 2), (2, 3), (1, 3)}, {1, 2, 3})
        assert red == frozenset({(1, 2), (2, 3)})

    def test_reduction_rejects_cycles(self):
        with pytest.raises(ValueError):
            transitive_reduction({(1, 2), (2, 1)}, {1, 2})


class TestThreatResolution:
    def test_no_threats_single_empty_choice(self):
        a = PlanningAction("a", eff_pos=frozenset({"p"}))
        plan = PartialOrderPlan(steps=(Step(0, a),), order=Ordering())
        assert resolve_threats(plan) == [frozenset()]

    def test_two_mutual_threats_yield_four_combos_two_consistent(self):
        # Two producers of p, two consumers, and each producer deletes q/p of
        # the other link: classic interval-separation with 2 threats.
        p_maker = PlanningAction("make-p", eff_pos=frozenset({"p"}), eff_neg=frozenset({"q"}))
        q_maker = PlanningAction("make-q", eff_pos=frozenset({"q"}), eff_neg=frozenset({"p"}))
        use_p = PlanningAction("use-p", pre_pos=frozenset({"p"}))
        use_q = PlanningAction("use-q", pre_pos=frozenset({"q"}))
        steps = (Step(0, p_maker), Step(1, q_maker), Step(2, use_p), Step(3, use_q))
        links = frozenset(
            {
                CausalLink(0, "p", True, 2),
                CausalLink(1, "q", True, 3),
            }
        )
        plan = PartialOrderPlan(steps=steps, order=Ordering(), links=links)
        combos = resolve_threats(plan)
        # threat A: step 1 deletes p protected by 0->2; threat B: step 0 deletes q protected by 1->3
        assert len(combos) == 4
        consistent = [c for c in combos if is_consistent(Ordering(frozenset(c)))]
        # only the doubly-promoted combo {0<1, 1<0} is cyclic
        assert len(consistent) == 3
        assert frozenset({(1, 0), (0, 1)}) not in consistent

    def test_separated_threat_not_reported(self):
        breaker = PlanningAction("break-p", eff_neg=frozenset({"p"}))
        maker = PlanningAction("make-p", eff_pos=frozenset({"p"}))
        user = PlanningAction("use-p", pre_pos=frozenset({"p"}))
        steps = (Step(0, maker), Step(1, user), Step(2, breaker))
        link = CausalLink(0, "p", True, 1)
        ordered = PartialOrderPlan(
            steps=steps, order=Ordering(frozenset({(1, 2)})), links=frozenset({link})
        )
        assert resolve_threats(ordered) == [frozenset()]


class TestEnumerationCounts:
    @pytest.mark.parametrize(
        "dom, task, n_pops, n_seqs",
        [
            ("bridge.dom", "bridge", 2, 4),
            ("gold.dom", "gold", 2, 4),
            ("gold-or-gem.dom", "gold-or-gem", 3, 7),
        ],
    )
    def test_plan_and_linearisation_counts(self, dom, task, n_pops, n_seqs):
        pt = load_task(dom, task)
        plans = enumerate_pops(pt)
        assert len(plans) == n_pops
        seqs = all_sequential_plans(plans)
        assert len(seqs) == n_seqs
        for plan in plans:
            assert validate_pop(plan, pt)

    def test_bridge_plan_structure(self):
        pt = load_task("bridge.dom", "bridge")
        plans = enumerate_pops(pt)
        names = sorted(p.action_names() for p in plans)
        assert names == [
            ("get-grass", "get-wood", "use-toolshed"),
            ("get-iron", "get-wood", "use-factory"),
        ]
        for plan in plans:
            craft = [s.id for s in plan.steps if s.action.name.startswith("use-")][0]
            gets = [s.id for s in plan.steps if s.action.name.startswith("get-")]
            assert plan.order.pairs == frozenset({(g, craft) for g in gets})

    def test_gem_pop_matches_published_ordering(self):
        pt = load_task("gold-or-gem.dom", "gold-or-gem")
        plans = enumerate_pops(pt)
        gem = [p for p in plans if "get-gem" in p.action_names()]
        assert len(gem) == 1
        plan = gem[0]
        by_name = {s.action.name: s.id for s in plan.steps}
        expected = {
            (by_name["get-iron"], by_name["use-toolshed-for-axe"]),
            (by_name["get-wood"], by_name["use-workbench"]),
            (by_name["use-workbench"], by_name["use-toolshed-for-axe"]),
            (by_name["use-toolshed-for-axe"], by_name["get-gem"]),
        }
        assert plan.order.pairs == frozenset(expected)
        assert len(linearisations(plan)) == 3

    def test_disjunctive_union_of_subtasks(self):
        pt = load_task("gold-or-gem.dom", "gold-or-gem")
        plans = enumerate_pops(pt)
        goals_hit = {("get-gem" in p.action_names(), "get-gold" in p.action_names()) for p in plans}
        assert goals_hit == {(True, False), (False, True)}


class TestCanonicalForm:
    def test_enumeration_is_deterministic(self):
        pt = load_task("gold-or-gem.dom", "gold-or-gem")
        a = enumerate_pops(pt)
        b = enumerate_pops(pt)
        assert a.plans == b.plans

    def test_canonicalize_is_idempotent_and_name_sorted(self):
        pt = load_task("bridge.dom", "bridge")
        for plan in enumerate_pops(pt):
            assert canonicalize(plan) == plan
            names = [s.action.name for s in sorted(plan.steps, key=lambda s: s.id)]
            assert names == sorted(names)

    def test_relabelled_duplicate_collapses(self):
        pt = load_task("bridge.dom", "bridge")
        plan = enumerate_pops(pt)[0]
        # shuffle ids: i -> i + 7, then canonicalize back
        remap = {s.id: s.id + 7 for s in plan.steps}
        shuffled = PartialOrderPlan(
            steps=tuple(Step(remap[s.id], s.action) for s in reversed(plan.steps)),
            order=Ordering(frozenset((remap[i], remap[j]) for i, j in plan.order.pairs)),
            links=frozenset(
                CausalLink(remap[l.producer], l.fluent, l.positive, remap[l.consumer])
                for l in plan.links
            ),
        )
        assert canonicalize(shuffled) == plan


class TestLinearisations:
    def test_bridge_linearisations_execute(self):
        pt = load_task("bridge.dom", "bridge")
        for plan in enumerate_pops(pt):
            for lin in linearisations(plan):
                assert validate_pop(plan, pt)
                assert len(lin) == 3

    def test_all_sequential_plans_sorted_unique(self):
        pt = load_task("gold-or-gem.dom", "gold-or-gem")
        seqs = all_sequential_plans(enumerate_pops(pt))
        names = [tuple(a.name for a in s) for s in seqs]
        assert names == sorted(names)
        assert len(set(names)) == len(names)

    def test_cyclic_plan_rejected(self):
        a = PlanningAction("a", eff_pos=frozenset({"p"}))
        plan = PartialOrderPlan(
            steps=(Step(0, a), Step(1, a)),
            order=Ordering(frozenset({(0, 1), (1, 0)})),
        )
        with pytest.raises(ValueError):
            linearisations(plan)


class TestOracle:
    def test_bridge_matches_brute_force(self):
        pt = load_task("bridge.dom", "bridge")
        plans = enumerate_pops(pt)
        union = frozenset(all_sequential_plans(plans))
        assert union == brute_force_plans(pt, 5)

    def test_brute_force_drops_redundant_sequences(self):
        # get-wood twice then factory is successful but redundant
        pt = load_task("bridge.dom", "bridge")
        for seq in brute_force_plans(pt, 5):
            assert len(seq) == 3


class TestBudget:
    def test_budget_error_carries_partial_plans(self):
        pt = load_task("gold-or-gem.dom", "gold-or-gem")
        full = set(enumerate_pops(pt).plans)
        with pytest.raises(BudgetExceededError) as info:
            enumerate_pops(pt, node_limit=10)
        # whatever was found so far is retained on the error, and is a
        # subset of the full enumeration
        assert isinstance(info.value.plans, tuple)
        assert set(info.value.plans) <= full

    def test_budget_monotonicity(self):
        pt = load_task("gold-or-gem.dom", "gold-or-gem")
        full = set(enumerate_pops(pt).plans)
        previous: set = set()
        for limit in (5, 10, 15, 20):
            try:
                found = set(enumerate_pops(pt, node_limit=limit).plans)
            except BudgetExceededError as e:
                found = set(e.plans)
            assert previous <= found <= full
            previous = found

    def test_default_budget_suffices(self):
        pt = load_task("gold-or-gem.dom", "gold-or-gem")
        assert len(enumerate_pops(pt)) == 3


class TestValidatePop:
    def test_validate_rejects_broken_plan(self):
        pt = load_task("bridge.dom", "bridge")
        factory = pt.domain.action("use-factory")
        wood = pt.domain.action("get-wood")
        # missing get-iron: not every linearisation reaches the goal
        plan = PartialOrderPlan(
            steps=(Step(0, wood), Step(1, factory)),
            order=Ordering(frozenset({(0, 1)})),
        )
        assert not validate_pop(plan, pt)
