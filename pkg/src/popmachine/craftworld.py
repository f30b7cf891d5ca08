"""Deterministic CraftWorld-style labelled gridworld.

Maps are ASCII grids with an eval-start header. The agent moves in four
directions; bumping a wall or the border wastes the step. Entering a cell
bound to a domain action fires that action when its preconditions hold in
the current inventory (a blocked move is not an entry). The labelling
function is the inventory itself.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum, IntEnum

import numpy as np

from popmachine.errors import ParseError
from popmachine.planning import PlanningAction, PlanningDomain, PlanningState, applicable, apply


class CellKind(Enum):
    EMPTY = "."
    WALL = "#"
    WOOD = "T"
    GRASS = "G"
    IRON = "I"
    GOLD = "o"
    GEM = "m"
    FACTORY = "F"
    TOOLSHED = "S"
    WORKBENCH = "W"


_GLYPHS = {kind.value: kind for kind in CellKind}

# Actions a cell may fire on entry, in priority order (first applicable wins;
# the toolshed prefers building a bridge over forging an axe).
CELL_ACTIONS: dict[CellKind, tuple[str, ...]] = {
    CellKind.WOOD: ("get-wood",),
    CellKind.GRASS: ("get-grass",),
    CellKind.IRON: ("get-iron",),
    CellKind.GOLD: ("get-gold",),
    CellKind.GEM: ("get-gem",),
    CellKind.FACTORY: ("use-factory",),
    CellKind.TOOLSHED: ("use-toolshed", "use-toolshed-for-axe"),
    CellKind.WORKBENCH: ("use-workbench",),
}


class EnvAction(IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3


_MOVES = {
    EnvAction.UP: (0, -1),
    EnvAction.DOWN: (0, 1),
    EnvAction.LEFT: (-1, 0),
    EnvAction.RIGHT: (1, 0),
}


@dataclass(frozen=True)
class EnvState:
    x: int
    y: int
    inventory: PlanningState = frozenset()
    step_count: int = 0


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    cells: tuple[tuple[CellKind, ...], ...]  # indexed [y][x]
    eval_starts: tuple[tuple[int, int], ...]
    start_region: tuple[tuple[int, int], ...] = field(default=())

    def kind_at(self, x: int, y: int) -> CellKind:
        return self.cells[y][x]

    def positions_of(self, kind: CellKind) -> tuple[tuple[int, int], ...]:
        return tuple(
            (x, y) for y in range(self.height) for x in range(self.width) if self.cells[y][x] is kind
        )


_START_TOKEN = re.compile(r"^\((\d+),(\d+)\)$")


def parse_map(text: str) -> GridMap:
    """Parse an ASCII map; raises ParseError with line (and row/column) info."""
    lines = [
        (lineno, raw.rstrip())
        for lineno, raw in enumerate(text.splitlines(), start=1)
        if raw.strip() and not raw.lstrip().startswith(";")
    ]
    if not lines:
        raise ParseError(1, "empty map file")
    header_line, header = lines[0]
    if not header.strip().startswith("starts:"):
        raise ParseError(header_line, "expected a 'starts: (x,y) ...' header before the grid")
    starts = []
    for token in header.strip()[len("starts:"):].split():
        m = _START_TOKEN.match(token)
        if not m:
            raise ParseError(header_line, f"malformed start coordinate {token!r}")
        starts.append((int(m.group(1)), int(m.group(2))))
    if not starts:
        raise ParseError(header_line, "at least one eval start is required")

    rows: list[tuple[CellKind, ...]] = []
    width = None
    for row_idx, (lineno, line) in enumerate(lines[1:]):
        if width is None:
            width = len(line)
        elif len(line) != width:
            raise ParseError(lineno, f"row {row_idx} has width {len(line)}, expected {width}")
        row = []
        for col, ch in enumerate(line):
            kind = _GLYPHS.get(ch)
            if kind is None:
                raise ParseError(lineno, f"unknown glyph {ch!r} at row {row_idx}, column {col}")
            row.append(kind)
        rows.append(tuple(row))
    height = len(rows)
    if width is None or width < 2 or height < 2:
        raise ParseError(lines[-1][0], "map must be at least 2x2")
    for x, y in starts:
        if not (0 <= x < width and 0 <= y < height):
            raise ParseError(header_line, f"eval start ({x},{y}) is outside the {width}x{height} grid")
        if rows[y][x] is CellKind.WALL:
            raise ParseError(header_line, f"eval start ({x},{y}) is on a wall")
    region = tuple(
        (x, y) for y in range(height) for x in range(width) if rows[y][x] is CellKind.EMPTY
    )
    return GridMap(
        width=width,
        height=height,
        cells=tuple(rows),
        eval_starts=tuple(starts),
        start_region=region,
    )


def render_map(grid: GridMap, agent: tuple[int, int] | None = None) -> str:
    out = []
    for y in range(grid.height):
        row = "".join(grid.cells[y][x].value for x in range(grid.width))
        if agent is not None and agent[1] == y:
            x = agent[0]
            row = row[:x] + "@" + row[x + 1:]
        out.append(row)
    return "\n".join(out)


class CraftWorld:
    """A grid map bound to the actions of a planning domain."""

    def __init__(self, grid: GridMap, domain: PlanningDomain):
        self.grid = grid
        self.domain = domain
        names = {a.name for a in domain.actions}
        self.bindings: dict[CellKind, tuple[PlanningAction, ...]] = {
            kind: tuple(domain.action(n) for n in actions if n in names)
            for kind, actions in CELL_ACTIONS.items()
        }

    def interact(self, inventory: PlanningState, kind: CellKind) -> PlanningState:
        """Inventory after entering a cell of the given kind."""
        for action in self.bindings.get(kind, ()):
            if applicable(inventory, action):
                return apply(inventory, action)
        return inventory

    def reset(self, start: tuple[int, int] | None = None, seed: int | None = None,
              rng: np.random.Generator | None = None) -> EnvState:
        """Start an episode at `start`, or at a seeded draw from the start region."""
        if start is None:
            if rng is None:
                rng = np.random.default_rng(seed)
            region = self.grid.start_region
            if not region:
                raise ValueError("map has no empty cells to start from")
            start = region[int(rng.random() * len(region))]
        x, y = start
        if not (0 <= x < self.grid.width and 0 <= y < self.grid.height):
            raise ValueError(f"start ({x},{y}) is outside the grid")
        if self.grid.kind_at(x, y) is CellKind.WALL:
            raise ValueError(f"start ({x},{y}) is on a wall")
        return EnvState(x=x, y=y, inventory=frozenset(), step_count=0)

    def step(self, state: EnvState, action: EnvAction | int) -> EnvState:
        """One deterministic step; blocked moves waste the step without entry."""
        dx, dy = _MOVES[EnvAction(action)]
        nx, ny = state.x + dx, state.y + dy
        blocked = (
            not (0 <= nx < self.grid.width and 0 <= ny < self.grid.height)
            or self.grid.kind_at(nx, ny) is CellKind.WALL
        )
        if blocked:
            return EnvState(state.x, state.y, state.inventory, state.step_count + 1)
        inventory = self.interact(state.inventory, self.grid.kind_at(nx, ny))
        return EnvState(nx, ny, inventory, state.step_count + 1)

    def label(self, state: EnvState) -> PlanningState:
        return state.inventory

    def render(self, state: EnvState | None = None) -> str:
        return render_map(self.grid, (state.x, state.y) if state else None)
