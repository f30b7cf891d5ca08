"""Experiment orchestration: configs, parallel training runs, and aggregation.

An experiment config is a line-oriented text file in the same style as the
`.dom` format::

    # desk-scale bridge experiment
    experiment bridge-desk
      domain: domains/bridge.dom
      task: bridge
      map: maps/bridge_15x15_a.map
      map: maps/bridge_15x15_b.map
      kinds: mprm pop:* seq:*
      seeds: 5
      mode: qrm
      alpha: 0.95
      gamma: 1.0
      epsilon: 0.1
      episode-cap: 1000
      total-steps: 500000
      eval-every: 10000

`domain:` and `map:` paths are resolved relative to the config file's
directory, falling back to the bundled data directory. `kinds:` accepts
explicit tokens (`mprm`, `pop:0`, `seq:3`) and the wildcards `pop:*` /
`seq:*`, which expand to every plan index for the task. `seeds: N` runs
seeds 0..N-1 for every (map, kind) cell.

One run CSV (`train_step,start_index,eval_return`) is written per cell and
one aggregate CSV (`train_step,family,p25,p50,p75`) per RM family; the
family of a run pools plan indices: `pop:i` runs aggregate into one POP
family, `seq:i` runs into one Seq family, and the MPRM stands alone.
"""

from __future__ import annotations

import os
import multiprocessing
from concurrent.futures import FIRST_EXCEPTION, ProcessPoolExecutor, wait
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from popmachine import domain_io, machine, pop
from popmachine.craftworld import parse_map
from popmachine.errors import ExperimentError, ParseError
from popmachine.trainer import Hyperparams, Mode, RunLog, train

_HP_KEYS = {
    "alpha": ("alpha", float),
    "gamma": ("gamma", float),
    "epsilon": ("epsilon", float),
    "episode-cap": ("episode_cap", int),
    "total-steps": ("total_steps", int),
    "eval-every": ("eval_every", int),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One task's protocol: maps x RM kinds x seeds under fixed hyperparameters."""

    name: str
    domain_path: Path
    task: str
    maps: tuple[Path, ...]
    kinds: tuple[str, ...]
    seeds: int
    hp: Hyperparams
    mode: Mode = Mode.CRM

    def __post_init__(self):
        if not self.maps:
            raise ValueError("experiment needs at least one map")
        if not self.kinds:
            raise ValueError("experiment needs at least one RM kind")
        if self.seeds < 1:
            raise ValueError("experiment needs at least one seed")


@dataclass(frozen=True)
class AggregateRow:
    """Percentiles of pooled per-run returns at one evaluation step."""

    train_step: int
    family: str
    p25: float
    p50: float
    p75: float

    def __post_init__(self):
        if not (self.p25 <= self.p50 <= self.p75):
            raise ValueError(f"percentiles out of order at step {self.train_step}")


def _resolve(token: str, base_dir: Path, line: int) -> Path:
    """A config path, relative to the config file or the bundled data dir."""
    cand = Path(token)
    if cand.is_absolute() and cand.is_file():
        return cand
    rel = base_dir / cand
    if rel.is_file():
        return rel.resolve()
    from importlib import resources

    bundled = Path(str(resources.files("popmachine") / "data")) / cand
    if bundled.is_file():
        return bundled
    raise ParseError(line, f"cannot find file {token!r} (tried {rel} and bundled data)")


def _kind_ok(token: str) -> bool:
    if token == "mprm":
        return True
    head, sep, tail = token.partition(":")
    return sep == ":" and head in ("pop", "seq") and (tail == "*" or tail.isdigit())


def parse_experiment(text: str, base_dir: Path) -> ExperimentConfig:
    """Parse experiment-config text; raises ParseError with a line number."""
    name = None
    fields: dict[str, object] = {"maps": [], "kinds": None, "seeds": None, "mode": Mode.CRM}
    hp_fields: dict[str, float | int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if name is None:
            head, _, rest = line.partition(" ")
            if head != "experiment" or not rest.strip():
                raise ParseError(lineno, "expected 'experiment <name>' header")
            name = rest.strip()
            if not domain_io.NAME_RE.match(name):
                raise ParseError(lineno, f"invalid experiment name {name!r}")
            continue
        key, sep, body = line.partition(":")
        key, body = key.strip(), body.strip()
        if not sep:
            raise ParseError(lineno, f"expected 'key: value' line, got {raw.strip()!r}")
        if key == "domain":
            fields["domain"] = _resolve(body, base_dir, lineno)
        elif key == "task":
            fields["task"] = body
        elif key == "map":
            fields["maps"].append(_resolve(body, base_dir, lineno))
        elif key == "kinds":
            tokens = body.split()
            for t in tokens:
                if not _kind_ok(t):
                    raise ParseError(lineno, f"unknown RM kind {t!r}")
            fields["kinds"] = tuple(tokens)
        elif key == "seeds":
            if not body.isdigit() or int(body) < 1:
                raise ParseError(lineno, f"seeds must be a positive integer, got {body!r}")
            fields["seeds"] = int(body)
        elif key == "mode":
            try:
                fields["mode"] = Mode(body)
            except ValueError:
                raise ParseError(lineno, f"unknown mode {body!r}") from None
        elif key in _HP_KEYS:
            attr, conv = _HP_KEYS[key]
            try:
                hp_fields[attr] = conv(body)
            except ValueError:
                raise ParseError(lineno, f"bad value for {key}: {body!r}") from None
        else:
            raise ParseError(lineno, f"unknown config key {key!r}")

    if name is None:
        raise ParseError(1, "missing 'experiment <name>' header")
    for req in ("domain", "task", "kinds", "seeds"):
        if fields.get(req) is None:
            raise ParseError(1, f"config is missing a '{req}:' line")
    if not fields["maps"]:
        raise ParseError(1, "config is missing a 'map:' line")
    try:
        hp = replace(Hyperparams(), **hp_fields)
    except ValueError as exc:
        raise ParseError(1, str(exc)) from None
    return ExperimentConfig(
        name=name,
        domain_path=fields["domain"],
        task=fields["task"],
        maps=tuple(fields["maps"]),
        kinds=fields["kinds"],
        seeds=fields["seeds"],
        hp=hp,
        mode=fields["mode"],
    )


def expand_kinds(kinds: tuple[str, ...], n_pops: int, n_seqs: int) -> tuple[str, ...]:
    """Expand pop:*/seq:* wildcards and validate explicit indices."""
    out: list[str] = []
    for token in kinds:
        if token == "pop:*":
            out.extend(f"pop:{i}" for i in range(n_pops))
        elif token == "seq:*":
            out.extend(f"seq:{i}" for i in range(n_seqs))
        else:
            if token != "mprm":
                head, _, idx = token.partition(":")
                limit = n_pops if head == "pop" else n_seqs
                if int(idx) >= limit:
                    raise ValueError(f"kind {token!r} out of range (task has {limit} {head} plans)")
            out.append(token)
    seen = set()
    uniq = [t for t in out if not (t in seen or seen.add(t))]
    return tuple(uniq)


def family_of(kind: str, mode: Mode) -> str:
    """The aggregation family label of a run ('QRM-MPRM', 'Aggregated-QRM-POP', ...)."""
    base = mode.label
    if kind == "mprm":
        return f"{base}-MPRM"
    if kind.startswith("pop"):
        return f"Aggregated-{base}-POP"
    return f"Aggregated-{base}-Seq"


def run_name(task: str, map_path: Path, kind: str, mode: Mode, seed: int) -> str:
    kind_tok = kind.replace(":", "-")
    return f"{task}__{map_path.stem}__{kind_tok}__{mode.value}__s{seed}.csv"


def build_rm_for_kind(doc: domain_io.DomainFile, task_name: str, kind: str) -> machine.RewardMachine:
    """The reward machine a kind token denotes (mprm | pop:<i> | seq:<i>)."""
    if not _kind_ok(kind) or kind.endswith(":*"):
        raise ValueError(f"unknown RM kind {kind!r} (expected mprm, pop:<i>, or seq:<i>)")
    task = doc.tasks[task_name]
    plans = pop.enumerate_pops(task)
    if kind == "mprm":
        return machine.build_mprm(plans, task)
    head, _, idx_text = kind.partition(":")
    idx = int(idx_text)
    if head == "pop":
        if idx >= len(plans):
            raise ValueError(f"task has {len(plans)} POPs; {kind!r} is out of range")
        return machine.build_single_plan_rm(plans[idx], task)
    seqs = pop.all_sequential_plans(plans)
    if idx >= len(seqs):
        raise ValueError(f"task has {len(seqs)} sequential plans; {kind!r} is out of range")
    return machine.build_single_plan_rm(seqs[idx], task)


def _run_cell(domain_path: str, task_name: str, map_path: str, kind: str,
              mode_value: str, hp: Hyperparams, seed: int, out_dir: str) -> str:
    """Worker: train one (map, kind, seed) cell and write its run CSV."""
    doc = domain_io.parse_domain(Path(domain_path).read_text())
    grid = parse_map(Path(map_path).read_text())
    rm = build_rm_for_kind(doc, task_name, kind)
    mode = Mode(mode_value)
    cell_hp = replace(hp, seed=seed)
    _, runlog = train(grid, rm, cell_hp, mode=mode, domain=doc.domain)
    name = run_name(task_name, Path(map_path), kind, mode, seed)
    (Path(out_dir) / name).write_text(runlog.to_csv())
    return name


def _cell_error(cell: tuple, exc: BaseException) -> ExperimentError:
    return ExperimentError(
        f"run (map={Path(cell[2]).name}, kind={cell[3]}, seed={cell[6]}) failed: {exc}"
    )


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("POPMACHINE_WORKERS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def run_experiment(cfg: ExperimentConfig, out_dir: Path, workers: int | None = None) -> list[Path]:
    """Run every (map, kind, seed) cell, then write per-family aggregates.

    Returns the paths of all CSVs written. A failing run aborts the
    experiment with a diagnostic naming the cell; completed run CSVs are
    kept on disk.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = domain_io.parse_domain(cfg.domain_path.read_text())
    if cfg.task not in doc.tasks:
        raise ExperimentError(f"domain {cfg.domain_path} has no task {cfg.task!r}")
    plans = pop.enumerate_pops(doc.tasks[cfg.task])
    seqs = pop.all_sequential_plans(plans)
    kinds = expand_kinds(cfg.kinds, len(plans), len(seqs))

    cells = [
        (str(cfg.domain_path), cfg.task, str(map_path), kind, cfg.mode.value, cfg.hp, seed, str(out_dir))
        for map_path in cfg.maps
        for kind in kinds
        for seed in range(cfg.seeds)
    ]
    names: list[str] = []
    n_workers = min(_worker_count(workers), len(cells))
    if n_workers == 1:
        for cell in cells:
            try:
                names.append(_run_cell(*cell))
            except Exception as exc:
                raise _cell_error(cell, exc) from exc
    else:
        # spawn, not fork: forking new workers while the executor's feeder
        # thread is live can kill a child mid-fork (spurious BrokenProcessPool)
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=n_workers, mp_context=ctx) as pool:
            futures = {pool.submit(_run_cell, *cell): cell for cell in cells}
            done, not_done = wait(futures, return_when=FIRST_EXCEPTION)
            if any(f.exception() is not None for f in done):
                for f in not_done:
                    f.cancel()
                wait(futures)  # let in-flight cells settle so the diagnostic is stable
                failed = [f for f in futures if not f.cancelled() and f.exception() is not None]
                # name the first failing cell in submission order, preferring a
                # real task error over pool-teardown artifacts
                real = [f for f in failed if not isinstance(f.exception(), BrokenProcessPool)]
                chosen = (real or failed)[0]
                exc = chosen.exception()
                raise _cell_error(futures[chosen], exc) from exc
            names = [f.result() for f in done]

    written = [out_dir / n for n in sorted(names)]
    written.extend(write_aggregates(out_dir, out_dir, task=cfg.task))
    return written


def aggregate(runlogs: list[RunLog], family: str) -> list[AggregateRow]:
    """Percentiles (linear interpolation) of per-run mean returns per step."""
    if not runlogs:
        raise ValueError("cannot aggregate an empty list of runs")
    grids = {tuple(step for step, _ in log.entries) for log in runlogs}
    if len(grids) != 1:
        raise ValueError("runs have mismatched evaluation step grids")
    rows = []
    for i, (step, _) in enumerate(runlogs[0].entries):
        pooled = np.array([np.mean(log.entries[i][1]) for log in runlogs])
        p25, p50, p75 = np.percentile(pooled, [25.0, 50.0, 75.0], method="linear")
        rows.append(AggregateRow(train_step=step, family=family, p25=float(p25), p50=float(p50), p75=float(p75)))
    return rows


def _fmt_num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def aggregate_csv(rows: list[AggregateRow]) -> str:
    out = ["train_step,family,p25,p50,p75"]
    for r in rows:
        out.append(f"{r.train_step},{r.family},{_fmt_num(r.p25)},{_fmt_num(r.p50)},{_fmt_num(r.p75)}")
    return "\n".join(out) + "\n"


def _family_from_name(name: str) -> tuple[str, str] | None:
    """(task, family) parsed from a run CSV filename, or None if not a run CSV."""
    parts = name[: -len(".csv")].split("__")
    if len(parts) != 5 or not parts[4].startswith("s"):
        return None
    kind_tok, mode_tok = parts[2], parts[3]
    kind = kind_tok.replace("-", ":", 1) if kind_tok != "mprm" else "mprm"
    try:
        mode = Mode(mode_tok)
    except ValueError:
        return None
    if not _kind_ok(kind):
        return None
    return parts[0], family_of(kind, mode)


def _collect_groups(in_dir: Path, task: str | None = None) -> dict[str, list[RunLog]]:
    groups: dict[str, list[RunLog]] = {}
    for path in sorted(Path(in_dir).iterdir()):
        if not path.name.endswith(".csv") or "__aggregate__" in path.name:
            continue
        parsed = _family_from_name(path.name)
        if parsed is None or (task is not None and parsed[0] != task):
            continue
        groups.setdefault(parsed[1], []).append(RunLog.from_csv(path.read_text()))
    if not groups:
        raise ExperimentError(f"no run CSVs found under {in_dir}")
    return groups


def write_aggregates(in_dir: Path, out_dir: Path, task: str | None = None) -> list[Path]:
    """Aggregate the run CSVs under in_dir into one CSV per RM family."""
    groups = _collect_groups(in_dir, task=task)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    prefix = f"{task}__" if task is not None else ""
    written = []
    for family in sorted(groups):
        rows = aggregate(groups[family], family)
        target = out_dir / f"{prefix}aggregate__{family}.csv"
        target.write_text(aggregate_csv(rows))
        written.append(target)
    return written


def aggregate_to_file(in_dir: Path, out_file: Path, task: str | None = None) -> Path:
    """Aggregate the run CSVs under in_dir into a single combined CSV."""
    groups = _collect_groups(in_dir, task=task)
    rows: list[AggregateRow] = []
    for family in sorted(groups):
        rows.extend(aggregate(groups[family], family))
    out_file = Path(out_file)
    out_file.parent.mkdir(parents=True, exist_ok=True)
    out_file.write_text(aggregate_csv(rows))
    return out_file
