"""Integer table encoding of a (map, domain, reward machine) product.

The training kernels and the value-iteration solver operate on these
lookup tables only: positions are row-major cell ids, inventories are ids
into the reachable-inventory list, signed labels are ids into a small
delta alphabet, and RM states follow the machine's canonical state order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from popmachine.craftworld import CellKind, CraftWorld, EnvAction, GridMap, _MOVES
from popmachine.machine import ObservationLabel, RewardMachine, rm_step, signed_delta
from popmachine.planning import PlanningDomain, is_goal


@dataclass
class ProductTables:
    grid: GridMap
    domain: PlanningDomain
    rm: RewardMachine
    fluent_order: tuple[str, ...]
    inventories: tuple[frozenset[str], ...]
    pos_next: np.ndarray   # (n_pos, 4) int32: target cell or same if blocked
    inv_next: np.ndarray   # (n_pos, n_inv) int32: inventory id after entering pos
    delta_of: np.ndarray   # (n_pos, n_inv) int32: label id observed on entry
    deltas: tuple[ObservationLabel, ...]
    rm_next: np.ndarray    # (n_u, n_d) int32
    u0: int
    u_goal: int
    start_cells: np.ndarray   # int32 cell ids of the random-reset region
    eval_starts: np.ndarray   # int32 cell ids of the eval starts, file order
    inv_is_goal: np.ndarray   # bool (n_inv,)

    @property
    def n_pos(self) -> int:
        return self.grid.width * self.grid.height

    def pos_id(self, x: int, y: int) -> int:
        return y * self.grid.width + x

    def pos_xy(self, pos: int) -> tuple[int, int]:
        return pos % self.grid.width, pos // self.grid.width

    def inv_id(self, inventory: frozenset[str]) -> int:
        return self.inventories.index(frozenset(inventory))


def build_tables(grid: GridMap, domain: PlanningDomain, rm: RewardMachine) -> ProductTables:
    env = CraftWorld(grid, domain)
    fluent_order = tuple(sorted(domain.fluents))
    if len(fluent_order) > 60:
        raise ValueError("inventory bitmask encoding supports at most 60 fluents")
    bit = {f: 1 << i for i, f in enumerate(fluent_order)}

    def mask_of(inv: frozenset[str]) -> int:
        return sum(bit[f] for f in inv)

    kinds_present = {grid.cells[y][x] for y in range(grid.height) for x in range(grid.width)}
    kinds_present -= {CellKind.WALL}

    # Reachable inventories, closed under entering any cell kind on the map.
    seen = {frozenset()}
    frontier = [frozenset()]
    while frontier:
        inv = frontier.pop()
        for kind in kinds_present:
            inv2 = env.interact(inv, kind)
            if inv2 not in seen:
                seen.add(inv2)
                frontier.append(inv2)
    inventories = tuple(sorted(seen, key=mask_of))
    inv_index = {inv: i for i, inv in enumerate(inventories)}
    n_inv = len(inventories)

    w, h = grid.width, grid.height
    n_pos = w * h
    pos_next = np.empty((n_pos, 4), dtype=np.int32)
    for y in range(h):
        for x in range(w):
            pos = y * w + x
            for a in EnvAction:
                dx, dy = _MOVES[a]
                nx, ny = x + dx, y + dy
                blocked = not (0 <= nx < w and 0 <= ny < h) or grid.cells[ny][nx] is CellKind.WALL
                pos_next[pos, a] = pos if blocked else ny * w + nx

    inv_next = np.empty((n_pos, n_inv), dtype=np.int32)
    delta_labels: list[list[ObservationLabel]] = [[] for _ in range(n_pos)]
    label_set = {ObservationLabel()}
    for y in range(h):
        for x in range(w):
            pos = y * w + x
            kind = grid.cells[y][x]
            for i, inv in enumerate(inventories):
                inv2 = env.interact(inv, kind) if kind is not CellKind.WALL else inv
                inv_next[pos, i] = inv_index[inv2]
                lab = signed_delta(inv, inv2)
                delta_labels[pos].append(lab)
                label_set.add(lab)

    deltas = tuple(
        sorted(label_set, key=lambda l: (len(l.pos) + len(l.neg), tuple(sorted(l.pos)), tuple(sorted(l.neg))))
    )
    assert deltas[0] == ObservationLabel(), "empty label must have id 0"
    delta_index = {lab: i for i, lab in enumerate(deltas)}
    delta_of = np.empty((n_pos, n_inv), dtype=np.int32)
    for pos in range(n_pos):
        for i in range(n_inv):
            delta_of[pos, i] = delta_index[delta_labels[pos][i]]

    states = rm.state_list
    n_u = len(states)
    rm_next = np.empty((n_u, len(deltas)), dtype=np.int32)
    for ui, u in enumerate(states):
        for di, lab in enumerate(deltas):
            rm_next[ui, di] = rm.state_index[rm_step(rm, u, lab)[0]]

    start_cells = np.array([y * w + x for x, y in grid.start_region], dtype=np.int32)
    eval_starts = np.array([y * w + x for x, y in grid.eval_starts], dtype=np.int32)
    inv_is_goal = np.array([is_goal(inv, rm.task.goal) for inv in inventories], dtype=bool)

    return ProductTables(
        grid=grid,
        domain=domain,
        rm=rm,
        fluent_order=fluent_order,
        inventories=inventories,
        pos_next=pos_next,
        inv_next=inv_next,
        delta_of=delta_of,
        deltas=deltas,
        rm_next=rm_next,
        u0=rm.state_index[rm.initial],
        u_goal=rm.state_index[states[-1]],
        start_cells=start_cells,
        eval_starts=eval_starts,
        inv_is_goal=inv_is_goal,
    )
