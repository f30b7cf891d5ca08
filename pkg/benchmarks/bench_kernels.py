"""Benchmark the compiled training kernel against the pure-Python twin.

Runs the same seeded CRM training workload on both backends, verifies the
Q-tables match bit for bit, and reports wall time and speedup:

    python3 benchmarks/bench_kernels.py [--steps N] [--map NAME] [--task NAME]
"""

import argparse
import time
from importlib import resources

import numpy as np

from popmachine import domain_io, pop
from popmachine.craftworld import parse_map
from popmachine.machine import build_mprm
from popmachine.trainer import Hyperparams, train
from popmachine.trainer import _qcore_py

DATA = resources.files("popmachine") / "data"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=500_000)
    parser.add_argument("--map", default="bridge_15x15_a.map")
    parser.add_argument("--task", default="bridge")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    try:
        from popmachine.trainer import _qcore
    except ImportError:
        raise SystemExit("compiled kernel is not built; run pip install -e . first")

    doc = domain_io.parse_domain((DATA / "domains" / f"{args.task}.dom").read_text())
    task = doc.tasks[args.task]
    grid = parse_map((DATA / "maps" / args.map).read_text())
    rm = build_mprm(pop.enumerate_pops(task), task)
    hp = Hyperparams(total_steps=args.steps, eval_every=args.steps, seed=0)

    print(f"task={args.task} map={args.map} rm_states={len(rm.state_list)} steps={args.steps:,}")
    results = {}
    qtables = {}
    for name, kernel in (("compiled", _qcore), ("pure", _qcore_py)):
        best = float("inf")
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            qt, _ = train(grid, rm, hp, domain=doc.domain, kernel=kernel)
            best = min(best, time.perf_counter() - t0)
        results[name] = best
        qtables[name] = qt.q
        rate = args.steps / best
        print(f"  {name:9s} {best:8.3f} s   ({rate:,.0f} steps/s)")

    if not np.array_equal(qtables["compiled"], qtables["pure"]):
        raise SystemExit("BACKEND MISMATCH: Q-tables differ between kernels")
    print(f"  backends bit-identical; speedup x{results['pure'] / results['compiled']:.1f}")


if __name__ == "__main__":
    main()
