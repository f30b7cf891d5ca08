"""Command-line interface: plan, synth, env, train, and experiment subcommands."""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from popmachine import domain_io, experiment, machine, pop
from popmachine.craftworld import parse_map, render_map
from popmachine.errors import PopmachineError
from popmachine.trainer import Hyperparams, Mode, evaluate, train, trajectory, trajectory_csv


def _find_file(token: str, bundled_subdir: str) -> Path:
    """Resolve a CLI path argument: as given, else from the bundled data dir."""
    cand = Path(token)
    if cand.is_file():
        return cand
    bundled = Path(str(resources.files("popmachine") / "data")) / bundled_subdir / token
    if bundled.is_file():
        return bundled
    raise FileNotFoundError(f"no such file: {token} (also tried bundled {bundled_subdir}/)")


def _load_task(domain_arg: str, task_name: str):
    doc = domain_io.parse_domain(_find_file(domain_arg, "domains").read_text())
    if task_name not in doc.tasks:
        known = ", ".join(sorted(doc.tasks))
        raise PopmachineError(f"domain has no task {task_name!r} (tasks: {known})")
    return doc, doc.tasks[task_name]


def plans_to_text(plans: pop.PlanSet) -> str:
    """Canonical plan listing: steps by id plus transitive-reduction edges."""
    out = [f"plans {len(plans)}"]
    for i, plan in enumerate(plans):
        out.append(f"plan {i}")
        for step in sorted(plan.steps, key=lambda s: s.id):
            out.append(f"  step {step.id} {step.action.name}")
        for a, b in sorted(plan.order.pairs):
            out.append(f"  order {a} {b}")
    return "\n".join(out) + "\n"


def _cmd_plan(args) -> int:
    _, task = _load_task(args.domain, args.task)
    plans = pop.enumerate_pops(task, max_action_repeats=args.max_repeats)
    text = plans_to_text(plans)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {len(plans)} plans to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_synth(args) -> int:
    doc, _ = _load_task(args.domain, args.task)
    rm = experiment.build_rm_for_kind(doc, args.task, args.kind)
    Path(args.out).write_text(machine.rm_to_text(rm))
    print(f"wrote {len(rm.state_list)}-state machine to {args.out}")
    if args.dot:
        Path(args.dot).write_text(machine.rm_to_dot(rm))
        print(f"wrote dot rendering to {args.dot}")
    return 0


def _cmd_env(args) -> int:
    grid = parse_map(_find_file(args.map, "maps").read_text())
    if args.render:
        agent = grid.eval_starts[args.start] if args.start is not None else None
        sys.stdout.write(render_map(grid, agent=agent))
    print(f"{grid.width}x{grid.height}, starts: " + " ".join(f"({x},{y})" for x, y in grid.eval_starts))
    return 0


def _cmd_train(args) -> int:
    doc, _ = _load_task(args.domain, args.task)
    grid = parse_map(_find_file(args.map, "maps").read_text())
    rm = experiment.build_rm_for_kind(doc, args.task, args.rm)
    hp = Hyperparams(
        alpha=args.alpha,
        gamma=args.gamma,
        epsilon=args.epsilon,
        episode_cap=args.episode_cap,
        total_steps=args.steps,
        eval_every=args.eval_every,
        seed=args.seed,
    )
    qtable, runlog = train(grid, rm, hp, mode=Mode(args.mode), domain=doc.domain)
    Path(args.out).write_text(runlog.to_csv())
    returns = evaluate(qtable, cap=hp.episode_cap)
    print(f"wrote {args.out}; final eval returns: {[int(r) for r in returns]}")
    if args.dump_trajectory:
        start = grid.eval_starts[args.trajectory_start]
        rows = trajectory(qtable, start, cap=hp.episode_cap)
        Path(args.dump_trajectory).write_text(trajectory_csv(rows))
        print(f"wrote trajectory from {start} ({len(rows) - 1} steps) to {args.dump_trajectory}")
    return 0


def _cmd_experiment_run(args) -> int:
    config_path = Path(args.config)
    if not config_path.is_file():
        config_path = _find_file(args.config, "experiments")
    cfg = experiment.parse_experiment(config_path.read_text(), config_path.resolve().parent)
    written = experiment.run_experiment(cfg, Path(args.out), workers=args.workers)
    print(f"wrote {len(written)} CSVs to {args.out}")
    return 0


def _cmd_experiment_aggregate(args) -> int:
    out = experiment.aggregate_to_file(Path(getattr(args, "in")), Path(args.out), task=args.task)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="popmachine", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="enumerate all partial-order plans of a task")
    p.add_argument("--domain", required=True)
    p.add_argument("--task", required=True)
    p.add_argument("--max-repeats", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("synth", help="synthesize a reward machine from plans")
    p.add_argument("--domain", required=True)
    p.add_argument("--task", required=True)
    p.add_argument("--kind", required=True, help="mprm | pop:<index> | seq:<index>")
    p.add_argument("--out", required=True)
    p.add_argument("--dot")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("env", help="inspect a map file")
    p.add_argument("--map", required=True)
    p.add_argument("--render", action="store_true")
    p.add_argument("--start", type=int, default=None, help="eval-start index to place the agent at")
    p.set_defaults(func=_cmd_env)

    p = sub.add_parser("train", help="train one agent and write its run CSV")
    p.add_argument("--domain", required=True)
    p.add_argument("--task", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--rm", required=True, help="mprm | pop:<index> | seq:<index>")
    p.add_argument("--mode", default="qrm", choices=[m.value for m in Mode])
    p.add_argument("--steps", type=int, default=500_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.95)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--episode-cap", type=int, default=1000)
    p.add_argument("--eval-every", type=int, default=10_000)
    p.add_argument("--out", required=True)
    p.add_argument("--dump-trajectory")
    p.add_argument("--trajectory-start", type=int, default=0)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("experiment", help="run or aggregate a whole protocol")
    esub = p.add_subparsers(dest="subcommand", required=True)
    pr = esub.add_parser("run", help="run every (map, kind, seed) cell of a config")
    pr.add_argument("--config", required=True)
    pr.add_argument("--out", required=True)
    pr.add_argument("--workers", type=int, default=None)
    pr.set_defaults(func=_cmd_experiment_run)
    pa = esub.add_parser("aggregate", help="aggregate run CSVs into one combined CSV")
    pa.add_argument("--in", required=True)
    pa.add_argument("--out", required=True)
    pa.add_argument("--task", default=None)
    pa.set_defaults(func=_cmd_experiment_aggregate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PopmachineError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
