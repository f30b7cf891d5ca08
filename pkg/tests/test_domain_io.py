"""Unit tests for the `.dom` parser and serializer."""

import random
from importlib import resources

import pytest

from popmachine.domain_io import DomainFile, parse_domain, serialize_domain
from popmachine.errors import ParseError
from popmachine.planning import Goal, GoalMode, PlanningAction, PlanningDomain, PlanningTask

DATA = resources.files("popmachine") / "data" / "domains"

MINIMAL = """\
domain tiny
fluents: a b

action make-b
  pre+: a
  eff+: b

task both
  init: a
  goal+: b
"""


class TestParsing:
    def test_minimal_roundtrip_fields(self):
        doc = parse_domain(MINIMAL)
        assert doc.name == "tiny"
        assert doc.domain.fluents == frozenset({"a", "b"})
        act = doc.domain.action("make-b")
        assert act.pre_pos == frozenset({"a"})
        assert act.eff_pos == frozenset({"b"})
        task = doc.tasks["both"]
        assert task.init == frozenset({"a"})
        assert task.goal == Goal(pos=frozenset({"b"}))

    def test_comments_and_blank_lines_ignored(self):
        doc = parse_domain("# hi\n\n" + MINIMAL + "\n# bye\n")
        assert doc.name == "tiny"

    def test_goal_mode_parsed(self):
        text = MINIMAL.replace("  goal+: b\n", "  goal+: a b\n  goal-mode: disjunctive\n")
        doc = parse_domain(text)
        assert doc.tasks["both"].goal.mode is GoalMode.DISJUNCTIVE

    @pytest.mark.parametrize(
        "mangle, fragment",
        [
            (lambda t: t.replace("domain tiny", "domain Tiny"), "name"),
            (lambda t: t.replace("fluents: a b", "fluents: a a"), "twice"),
            (lambda t: t.replace("pre+: a", "pre+: zz"), "undeclared"),
            (lambda t: t + "\naction make-b\n  eff+: a\n", "duplicate"),
            (lambda t: t.replace("goal+: b", "goal-mode: sometimes"), "goal-mode"),
            (lambda t: t.replace("task both", "banana stand"), "banana"),
            (lambda t: t.replace("init: a", "knit: a"), "knit"),
        ],
    )
    def test_errors_carry_line_numbers(self, mangle, fragment):
        with pytest.raises(ParseError) as info:
            parse_domain(mangle(MINIMAL))
        assert info.value.line >= 1
        assert fragment in str(info.value)

    def test_missing_domain_header(self):
        with pytest.raises(ParseError):
            parse_domain("fluents: a\n")

    def test_bundled_domains_parse(self):
        for name in ("bridge.dom", "gold.dom", "gold-or-gem.dom"):
            doc = parse_domain((DATA / name).read_text())
            assert doc.tasks


class TestSerialization:
    def test_roundtrip_bundled(self):
        for name in ("bridge.dom", "gold.dom", "gold-or-gem.dom"):
            doc = parse_domain((DATA / name).read_text())
            text = serialize_domain(doc)
            doc2 = parse_domain(text)
            assert doc2.domain == doc.domain
            assert doc2.tasks == doc.tasks
            # serialization is canonical: a second pass is byte-identical
            assert serialize_domain(doc2) == text

    def test_random_domains_roundtrip(self):
        rng = random.Random(20240817)
        fluent_pool = [f"f{i}" for i in range(8)]
        for _ in range(50):
            fluents = frozenset(rng.sample(fluent_pool, rng.randint(1, 8)))
            actions = []
            for j in range(rng.randint(1, 5)):
                pick = lambda: frozenset(
                    f for f in fluents if rng.random() < 0.3
                )
                pre_pos = pick()
                pre_neg = pick() - pre_pos
                eff_pos = pick()
                eff_neg = pick() - eff_pos
                actions.append(
                    PlanningAction(f"act-{j}", pre_pos, pre_neg, eff_pos, eff_neg)
                )
            domain = PlanningDomain(fluents=fluents, actions=tuple(actions))
            goal_pos = frozenset(f for f in fluents if rng.random() < 0.4)
            goal = Goal(
                pos=goal_pos,
                neg=frozenset(f for f in fluents - goal_pos if rng.random() < 0.2),
                mode=rng.choice([GoalMode.CONJUNCTIVE, GoalMode.DISJUNCTIVE]),
            )
            init = frozenset(f for f in fluents if rng.random() < 0.3)
            doc = DomainFile(
                name="rand",
                domain=domain,
                tasks={"t0": PlanningTask(domain, init, goal)},
            )
            text = serialize_domain(doc)
            doc2 = parse_domain(text)
            assert doc2.domain == domain
            assert doc2.tasks["t0"] == doc.tasks["t0"]
            assert serialize_domain(doc2) == text
