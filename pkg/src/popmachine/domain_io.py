"""Line-oriented text format for planning domains and tasks (`.dom` files).

Format sketch::

    # comment
    domain bridge
    fluents: has-bridge has-grass has-iron has-wood

    action use-factory
      pre+: has-iron has-wood
      eff+: has-bridge
      eff-: has-iron has-wood

    task bridge
      init:
      goal+: has-bridge
      goal-mode: conjunctive

Clause lines may be omitted when empty; `goal-mode` defaults to conjunctive.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from popmachine.errors import ParseError
from popmachine.planning import Goal, GoalMode, PlanningAction, PlanningDomain, PlanningTask

NAME_RE = re.compile(r"^[a-z][a-z0-9-]*$")

_ACTION_CLAUSES = ("pre+", "pre-", "eff+", "eff-")
_TASK_CLAUSES = ("init", "goal+", "goal-", "goal-mode")


@dataclass(frozen=True)
class DomainFile:
    """A parsed `.dom` file: one domain plus its named tasks."""

    name: str
    domain: PlanningDomain
    tasks: dict[str, PlanningTask]


def _check_name(name: str, what: str, line: int) -> str:
    if not NAME_RE.match(name):
        raise ParseError(line, f"invalid {what} name {name!r} (lowercase letters, digits, hyphens)")
    return name


def _split_fluents(body: str, fluents: frozenset[str] | None, line: int) -> frozenset[str]:
    names = body.split()
    seen = set()
    for n in names:
        _check_name(n, "fluent", line)
        if n in seen:
            raise ParseError(line, f"fluent {n!r} listed twice")
        if fluents is not None and n not in fluents:
            raise ParseError(line, f"undeclared fluent {n!r}")
        seen.add(n)
    return frozenset(names)


def parse_domain(text: str) -> DomainFile:
    """Parse `.dom` text; raises ParseError with a 1-based line number."""
    domain_name: str | None = None
    fluents: frozenset[str] | None = None
    actions: list[PlanningAction] = []
    action_names: set[str] = set()
    tasks: dict[str, PlanningTask] = {}

    # Current block under construction: ("action"|"task", name, header line, clauses)
    block: tuple[str, str, int, dict[str, object]] | None = None
    domain: PlanningDomain | None = None

    def close_block():
        nonlocal block, domain
        if block is None:
            return
        kind, name, header_line, clauses = block
        if kind == "action":
            try:
                actions.append(
                    PlanningAction(
                        name=name,
                        pre_pos=clauses.get("pre+", frozenset()),
                        pre_neg=clauses.get("pre-", frozenset()),
                        eff_pos=clauses.get("eff+", frozenset()),
                        eff_neg=clauses.get("eff-", frozenset()),
                    )
                )
            except ValueError as e:
                raise ParseError(header_line, str(e)) from None
        else:
            if domain is None:
                domain = _build_domain(fluents, actions, header_line)
            try:
                tasks[name] = PlanningTask(
                    domain=domain,
                    init=clauses.get("init", frozenset()),
                    goal=Goal(
                        pos=clauses.get("goal+", frozenset()),
                        neg=clauses.get("goal-", frozenset()),
                        mode=clauses.get("goal-mode", GoalMode.CONJUNCTIVE),
                    ),
                )
            except ValueError as e:
                raise ParseError(header_line, str(e)) from None
        block = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        key, _, body = stripped.partition(":")
        key = key.strip()
        body = body.strip()

        if stripped.startswith("domain "):
            if domain_name is not None:
                raise ParseError(lineno, "duplicate domain declaration")
            domain_name = _check_name(stripped.split(None, 1)[1].strip(), "domain", lineno)
        elif key == "fluents" and ":" in stripped:
            if domain_name is None:
                raise ParseError(lineno, "fluents declared before domain header")
            if fluents is not None:
                raise ParseError(lineno, "duplicate fluents declaration")
            close_block()
            fluents = _split_fluents(body, None, lineno)
        elif stripped.startswith("action "):
            close_block()
            if fluents is None:
                raise ParseError(lineno, "actions must come after the fluents declaration")
            name = _check_name(stripped.split(None, 1)[1].strip(), "action", lineno)
            if name in action_names:
                raise ParseError(lineno, f"duplicate action name {name!r}")
            action_names.add(name)
            block = ("action", name, lineno, {})
        elif stripped.startswith("task "):
            close_block()
            if fluents is None:
                raise ParseError(lineno, "tasks must come after the fluents declaration")
            name = _check_name(stripped.split(None, 1)[1].strip(), "task", lineno)
            if name in tasks or (block and block[1] == name):
                raise ParseError(lineno, f"duplicate task name {name!r}")
            block = ("task", name, lineno, {})
        elif block is not None and block[0] == "action" and key in _ACTION_CLAUSES:
            if key in block[3]:
                raise ParseError(lineno, f"duplicate {key} clause")
            block[3][key] = _split_fluents(body, fluents, lineno)
        elif block is not None and block[0] == "task" and key in _TASK_CLAUSES:
            if key in block[3]:
                raise ParseError(lineno, f"duplicate {key} clause")
            if key == "goal-mode":
                try:
                    block[3][key] = GoalMode(body)
                except ValueError:
                    raise ParseError(lineno, f"goal-mode must be conjunctive or disjunctive, got {body!r}") from None
            else:
                block[3][key] = _split_fluents(body, fluents, lineno)
        else:
            raise ParseError(lineno, f"unrecognized line {stripped!r}")

    close_block()
    if domain_name is None:
        raise ParseError(1, "missing domain header")
    if domain is None:
        domain = _build_domain(fluents, actions, 1)
    return DomainFile(name=domain_name, domain=domain, tasks=tasks)


def _build_domain(fluents, actions, line) -> PlanningDomain:
    if fluents is None:
        fluents = frozenset()
    try:
        return PlanningDomain(fluents=fluents, actions=tuple(actions))
    except ValueError as e:
        raise ParseError(line, str(e)) from None


def _fluent_line(indent: str, key: str, values: frozenset[str]) -> list[str]:
    if not values:
        return []
    return [f"{indent}{key}: {' '.join(sorted(values))}"]


def serialize_domain(doc: DomainFile) -> str:
    """Canonical text for a DomainFile: sorted fluents, actions, and tasks."""
    out = [f"domain {doc.name}"]
    out.append(f"fluents: {' '.join(sorted(doc.domain.fluents))}")
    for action in doc.domain.actions:
        out.append("")
        out.append(f"action {action.name}")
        out += _fluent_line("  ", "pre+", action.pre_pos)
        out += _fluent_line("  ", "pre-", action.pre_neg)
        out += _fluent_line("  ", "eff+", action.eff_pos)
        out += _fluent_line("  ", "eff-", action.eff_neg)
    for name in sorted(doc.tasks):
        task = doc.tasks[name]
        out.append("")
        out.append(f"task {name}")
        out += _fluent_line("  ", "init", task.init)
        out += _fluent_line("  ", "goal+", task.goal.pos)
        out += _fluent_line("  ", "goal-", task.goal.neg)
        out.append(f"  goal-mode: {task.goal.mode.value}")
    return "\n".join(out) + "\n"
