"""Tabular Q-learning over the product of a CraftWorld map and a reward machine."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from popmachine.craftworld import GridMap
from popmachine.errors import DomainMismatchError
from popmachine.machine import RewardMachine, RmState
from popmachine.planning import PlanningDomain
from popmachine.trainer import backend
from popmachine.trainer.encode import ProductTables, build_tables


class Mode(Enum):
    """Update rule: counterfactual updates for every RM state, or plain
    Q-learning on the experienced product state."""

    CRM = "qrm"
    PRODUCT_Q = "product-q"

    @property
    def label(self) -> str:
        return "QRM" if self is Mode.CRM else "ProductQ"


@dataclass(frozen=True)
class Hyperparams:
    alpha: float = 0.95
    gamma: float = 1.0
    epsilon: float = 0.1
    episode_cap: int = 1000
    total_steps: int = 500_000
    eval_every: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not (0.0 <= self.gamma <= 1.0):
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if not (0.0 <= self.epsilon <= 1.0):
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.episode_cap < 1 or self.total_steps < 1 or self.eval_every < 1:
            raise ValueError("episode_cap, total_steps, and eval_every must be positive")


@dataclass(frozen=True)
class RunLog:
    """Greedy eval returns per eval point, one value per eval start."""

    eval_every: int
    entries: tuple[tuple[int, tuple[float, ...]], ...]

    def to_csv(self) -> str:
        lines = ["train_step,start_index,eval_return"]
        for step, returns in self.entries:
            for i, r in enumerate(returns):
                lines.append(f"{step},{i},{int(r)}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_csv(text: str) -> "RunLog":
        rows: dict[int, dict[int, float]] = {}
        lines = text.strip().splitlines()
        if not lines or lines[0] != "train_step,start_index,eval_return":
            raise ValueError("not a run log CSV")
        for line in lines[1:]:
            step_s, idx_s, ret_s = line.split(",")
            rows.setdefault(int(step_s), {})[int(idx_s)] = float(ret_s)
        entries = tuple(
            (step, tuple(rows[step][i] for i in sorted(rows[step])))
            for step in sorted(rows)
        )
        eval_every = entries[0][0] if entries else 0
        return RunLog(eval_every=eval_every, entries=entries)


@dataclass
class QTable:
    """Dense action-value table keyed by (cell, inventory id, RM state id)."""

    tables: ProductTables
    q: np.ndarray  # (n_pos, n_inv, n_u, 4) float64

    def values(self, x: int, y: int, inventory, rm_state: RmState) -> np.ndarray:
        pos = self.tables.pos_id(x, y)
        inv = self.tables.inv_id(frozenset(inventory))
        u = self.tables.rm.state_index[rm_state]
        return self.q[pos, inv, u].copy()

    def greedy_action(self, x: int, y: int, inventory, rm_state: RmState) -> int:
        return int(np.argmax(self.values(x, y, inventory, rm_state)))


def train(grid: GridMap, rm: RewardMachine, hp: Hyperparams, mode: Mode = Mode.CRM,
          domain: PlanningDomain | None = None, kernel=None) -> tuple[QTable, RunLog]:
    """Train a tabular agent; evaluates greedily every eval_every steps.

    The RNG stream depends only on hp.seed, and identical seeds give
    bit-identical results on both kernel backends.
    """
    if domain is not None and domain.fluents != rm.task.domain.fluents:
        raise DomainMismatchError(
            "environment domain and reward machine disagree on declared fluents"
        )
    tables = build_tables(grid, rm.task.domain, rm)
    if kernel is None:
        kernel = backend.kernel
    n_u = len(rm.state_list)
    q = np.zeros((tables.n_pos, len(tables.inventories), n_u, 4), dtype=np.float64)
    carry = np.array([-1, 0, tables.u0, 0], dtype=np.int64)
    rng = np.random.Generator(np.random.PCG64(hp.seed))
    entries = []
    done = 0
    while done < hp.total_steps:
        seg = min(hp.eval_every, hp.total_steps - done)
        stream = rng.random(3 * seg + 8)
        kernel.run_segment(
            q, tables.pos_next, tables.inv_next, tables.delta_of, tables.rm_next,
            tables.u_goal, tables.u0, tables.start_cells,
            hp.alpha, hp.gamma, hp.epsilon, hp.episode_cap, mode is Mode.CRM,
            stream, seg, carry,
        )
        done += seg
        if done % hp.eval_every == 0:
            returns = tuple(
                kernel.evaluate_greedy(
                    q, tables.pos_next, tables.inv_next, tables.delta_of, tables.rm_next,
                    tables.u_goal, tables.u0, int(s), hp.episode_cap,
                )
                for s in tables.eval_starts
            )
            entries.append((done, returns))
    return QTable(tables, q), RunLog(eval_every=hp.eval_every, entries=tuple(entries))


def evaluate(qtable: QTable, starts=None, cap: int = 1000, kernel=None) -> list[float]:
    """Greedy returns from each start (default: the map's eval starts)."""
    tables = qtable.tables
    if kernel is None:
        kernel = backend.kernel
    if starts is None:
        start_ids = [int(s) for s in tables.eval_starts]
    else:
        start_ids = [tables.pos_id(x, y) for x, y in starts]
    return [
        kernel.evaluate_greedy(
            qtable.q, tables.pos_next, tables.inv_next, tables.delta_of, tables.rm_next,
            tables.u_goal, tables.u0, s, cap,
        )
        for s in start_ids
    ]


def trajectory(qtable: QTable, start: tuple[int, int], cap: int = 1000) -> list[tuple[int, int, int, int]]:
    """Greedy rollout as (t, x, y, rm_state_id) rows, including the start.

    Mirrors the kernels' evaluation stepping exactly (same tie-breaking).
    """
    tables = qtable.tables
    q = qtable.q
    pos = tables.pos_id(*start)
    inv = 0
    u = tables.u0
    rows = [(0, *tables.pos_xy(pos), u)]
    for t in range(1, cap + 1):
        row = q[pos, inv, u]
        a = 0
        if row[1] > row[a]:
            a = 1
        if row[2] > row[a]:
            a = 2
        if row[3] > row[a]:
            a = 3
        p2 = int(tables.pos_next[pos, a])
        if p2 != pos:
            i2 = int(tables.inv_next[p2, inv])
            d = int(tables.delta_of[p2, inv])
        else:
            i2 = inv
            d = 0
        u2 = int(tables.rm_next[u, d])
        rows.append((t, *tables.pos_xy(p2), u2))
        if u2 == tables.u_goal:
            break
        pos, inv, u = p2, i2, u2
    return rows


def trajectory_csv(rows) -> str:
    lines = ["t,x,y,rm_state_id"]
    for t, x, y, u in rows:
        lines.append(f"{t},{x},{y},{u}")
    return "\n".join(lines) + "\n"
