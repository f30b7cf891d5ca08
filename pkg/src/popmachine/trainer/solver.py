"""Exact solvers over the product MDP: value iteration and a BFS oracle."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from popmachine.errors import CapacityError, ConvergenceError
from popmachine.trainer.encode import ProductTables


@dataclass
class ProductMdp:
    """Reachable product graph over (cell, inventory, RM state) nodes.

    Nodes are the product states reachable from some non-wall cell with an
    empty inventory and the machine's initial state; `node` maps a
    (pos, inv, u) triple to its row in `succ`/`reward`.
    """

    tables: ProductTables
    node_keys: np.ndarray          # (n,) int64, (pos * n_inv + inv) * n_u + u
    succ: np.ndarray               # (n, 4) int64
    reward: np.ndarray             # (n, 4) float64
    _lookup: np.ndarray = field(repr=False)  # dense key -> row, -1 if unreachable

    def __len__(self) -> int:
        return len(self.node_keys)

    def node(self, pos: int, inv: int, u: int) -> int:
        n_inv = self.tables.inv_next.shape[1]
        n_u = self.tables.rm_next.shape[0]
        row = int(self._lookup[(pos * n_inv + inv) * n_u + u])
        if row < 0:
            raise KeyError(f"product state (pos={pos}, inv={inv}, u={u}) is unreachable")
        return row


def _product_step(tables: ProductTables, pos: int, inv: int, u: int, a: int):
    p2 = int(tables.pos_next[pos, a])
    if p2 != pos:
        i2 = int(tables.inv_next[p2, inv])
        d = int(tables.delta_of[p2, inv])
    else:
        i2 = inv
        d = 0
    u2 = int(tables.rm_next[u, d])
    return p2, i2, u2


def build_product(tables: ProductTables, node_cap: int = 2_000_000) -> ProductMdp:
    """BFS the product graph from every non-wall cell with empty inventory."""
    from popmachine.craftworld import CellKind

    grid = tables.grid
    n_inv = tables.inv_next.shape[1]
    n_u = tables.rm_next.shape[0]
    pos_next = tables.pos_next.astype(np.int64)
    inv_next = tables.inv_next.astype(np.int64)
    delta_of = tables.delta_of.astype(np.int64)
    rm_next = tables.rm_next.astype(np.int64)
    dense = pos_next.shape[0] * n_inv * n_u

    seed_pos = np.array(
        [
            y * grid.width + x
            for y in range(grid.height)
            for x in range(grid.width)
            if grid.cells[y][x] is not CellKind.WALL
        ],
        dtype=np.int64,
    )
    seen = np.zeros(dense, dtype=bool)
    frontier = np.unique((seed_pos * n_inv + 0) * n_u + tables.u0)
    seen[frontier] = True
    levels = [frontier]
    total = frontier.size
    edge_src: list[np.ndarray] = []
    edge_dst: list[np.ndarray] = []

    while frontier.size:
        pos = frontier // (n_inv * n_u)
        rest = frontier % (n_inv * n_u)
        inv = rest // n_u
        u = rest % n_u
        dsts = []
        for a in range(4):
            p2 = pos_next[pos, a]
            moved = p2 != pos
            i2 = np.where(moved, inv_next[p2, inv], inv)
            d = np.where(moved, delta_of[p2, inv], 0)
            u2 = rm_next[u, d]
            dsts.append((p2 * n_inv + i2) * n_u + u2)
        edge_src.append(frontier)
        edge_dst.append(np.stack(dsts, axis=1))  # (m, 4)
        nxt = np.unique(np.concatenate(dsts))
        new = nxt[~seen[nxt]]
        seen[new] = True
        total += new.size
        if total > node_cap:
            raise CapacityError(f"product graph exceeded node cap of {node_cap}")
        levels.append(new)
        frontier = new

    node_keys = np.concatenate(levels)
    lookup = np.full(dense, -1, dtype=np.int64)
    lookup[node_keys] = np.arange(node_keys.size)
    src = lookup[np.concatenate(edge_src)]
    dst = lookup[np.concatenate(edge_dst, axis=0)]
    succ = np.empty((node_keys.size, 4), dtype=np.int64)
    succ[src] = dst
    succ_u = node_keys[succ] % n_u
    reward = np.where(succ_u == tables.u_goal, 0.0, -1.0)
    return ProductMdp(tables=tables, node_keys=node_keys, succ=succ, reward=reward, _lookup=lookup)


def value_iteration(pm: ProductMdp, gamma: float = 1.0, tol: float = 1e-9,
                    horizon: int = 1000, max_iters: int = 100_000) -> np.ndarray:
    """Optimal state values.

    For gamma = 1 this is the finite-horizon value over `horizon` steps
    (matching the episode cap), stopping early at a fixed point; for
    gamma < 1 it iterates to `tol` and errors out past max_iters.
    """
    v = np.zeros(len(pm.node_keys), dtype=np.float64)
    iters = horizon if gamma == 1.0 else max_iters
    for _ in range(iters):
        q = pm.reward + gamma * v[pm.succ]
        v2 = q.max(axis=1)
        if gamma == 1.0:
            if np.array_equal(v2, v):
                return v2
        elif np.max(np.abs(v2 - v)) < tol:
            return v2
        v = v2
    if gamma == 1.0:
        return v
    raise ConvergenceError(f"value iteration did not converge within {max_iters} iterations")


def start_value(pm: ProductMdp, v: np.ndarray, x: int, y: int) -> float:
    """Optimal value at (x, y) with empty inventory and the initial RM state."""
    tables = pm.tables
    return float(v[pm.node(tables.pos_id(x, y), 0, tables.u0)])


def bfs_shortest_completion(tables: ProductTables, start: tuple[int, int]) -> int:
    """Fewest env steps from start (empty inventory) to a goal-satisfying
    inventory, ignoring any reward machine; -1 if unreachable."""
    if bool(tables.inv_is_goal[0]):
        return 0
    pos0 = tables.pos_id(*start)
    seen = {(pos0, 0)}
    queue = deque([(pos0, 0, 0)])
    while queue:
        pos, inv, dist = queue.popleft()
        for a in range(4):
            p2 = int(tables.pos_next[pos, a])
            if p2 == pos:
                continue
            i2 = int(tables.inv_next[p2, inv])
            if tables.inv_is_goal[i2]:
                return dist + 1
            if (p2, i2) not in seen:
                seen.add((p2, i2))
                queue.append((p2, i2, dist + 1))
    return -1
