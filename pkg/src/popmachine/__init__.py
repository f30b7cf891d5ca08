"""popmachine: enumerate partial-order plans, build reward machines from
them, and train tabular agents on CraftWorld gridworlds."""

__version__ = "0.1.0"

from popmachine.domain_io import DomainFile, parse_domain, serialize_domain
from popmachine.machine import (
    ObservationLabel,
    RewardMachine,
    RmState,
    build_mprm,
    build_single_plan_rm,
    rm_step,
    signed_delta,
)
from popmachine.planning import (
    Goal,
    GoalMode,
    PlanningAction,
    PlanningDomain,
    PlanningTask,
    applicable,
    apply,
    execute_sequence,
    is_goal,
)
from popmachine.pop import (
    PartialOrderPlan,
    PlanSet,
    brute_force_plans,
    canonicalize,
    enumerate_pops,
    linearisations,
    validate_pop,
)

__all__ = [
    "__version__",
    "DomainFile",
    "parse_domain",
    "serialize_domain",
    "ObservationLabel",
    "RewardMachine",
    "RmState",
    "build_mprm",
    "build_single_plan_rm",
    "rm_step",
    "signed_delta",
    "Goal",
    "GoalMode",
    "PlanningAction",
    "PlanningDomain",
    "PlanningTask",
    "applicable",
    "apply",
    "execute_sequence",
    "is_goal",
    "PartialOrderPlan",
    "PlanSet",
    "brute_force_plans",
    "canonicalize",
    "enumerate_pops",
    "linearisations",
    "validate_pop",
]
