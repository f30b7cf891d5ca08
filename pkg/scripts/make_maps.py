#!/usr/bin/env python3
"""Regenerate the bundled CraftWorld maps (desk 15x15 and paper-scale 41x41).

Maps are deterministic functions of (task, size, index). Each map keeps the
structural property the experiments rely on: resources for one bridge route
(iron + factory) sit strictly in the upper half, resources for the other
(grass + toolshed) strictly in the lower half, and wood sits on the middle
row, so the cheapest plan depends on where the agent starts. All non-wall
cells are mutually connected and the five evaluation starts are fixed,
resource-free cells spread across the map.

Usage: python3 scripts/make_maps.py [--out-dir src/popmachine/data/maps]
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

WALL, EMPTY = "#", "."

TASK_SEED = {"bridge": 1, "gold": 2, "gold-or-gem": 3}

DESK_SIZE, DESK_COUNT = 15, 3
PAPER_SIZE, PAPER_COUNT = 41, 10


def _blank(n: int) -> list[list[str]]:
    grid = [[EMPTY] * n for _ in range(n)]
    for k in range(n):
        grid[0][k] = grid[n - 1][k] = grid[k][0] = grid[k][n - 1] = WALL
    return grid


def _eval_starts(n: int) -> list[tuple[int, int]]:
    """Five predetermined (x, y) starts: four inset corners plus the centre."""
    lo, hi, mid = 2, n - 3, n // 2
    return [(lo, lo), (hi, lo), (mid, mid), (lo, hi), (hi, hi)]


def _carve_walls(grid, rng, n: int, reserved: set[tuple[int, int]]) -> None:
    """Drop a few straight wall segments, skipping reserved cells."""
    segments = 2 if n <= 20 else 10
    for _ in range(segments):
        horizontal = rng.random() < 0.5
        length = int(3 + rng.integers(0, max(2, n // 3)))
        if horizontal:
            y = int(1 + rng.integers(0, n - 2))
            x0 = int(1 + rng.integers(0, n - 1 - length))
            cells = [(x0 + k, y) for k in range(length)]
        else:
            x = int(1 + rng.integers(0, n - 2))
            y0 = int(1 + rng.integers(0, n - 1 - length))
            cells = [(x, y0 + k) for k in range(length)]
        for (x, y) in cells:
            if (x, y) not in reserved:
                grid[y][x] = WALL


def _connected(grid, n: int) -> bool:
    open_cells = {(x, y) for y in range(n) for x in range(n) if grid[y][x] != WALL}
    if not open_cells:
        return False
    seed = next(iter(open_cells))
    seen = {seed}
    frontier = [seed]
    while frontier:
        x, y = frontier.pop()
        for dx, dy in ((0, 1), (0, -1), (1, 0), (-1, 0)):
            nxt = (x + dx, y + dy)
            if nxt in open_cells and nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen == open_cells


def _place(grid, rng, glyph: str, band: tuple[int, int], n: int, taken: set[tuple[int, int]]) -> None:
    """Put one glyph on a random empty cell whose row lies in [band[0], band[1]]."""
    y_lo, y_hi = band
    for _ in range(10_000):
        y = int(rng.integers(y_lo, y_hi + 1))
        x = int(rng.integers(1, n - 1))
        if grid[y][x] == EMPTY and (x, y) not in taken:
            grid[y][x] = glyph
            taken.add((x, y))
            return
    raise RuntimeError(f"could not place {glyph!r} in rows {band}")


def make_map(task: str, n: int, index: int) -> str:
    rng = np.random.default_rng(TASK_SEED[task] * 1_000_003 + n * 101 + index)
    starts = _eval_starts(n)
    mid = n // 2
    upper = (1, mid - 1)
    lower = (mid + 1, n - 2)
    middle = (mid, mid)
    right_band = (mid - 1, mid + 1)

    while True:
        grid = _blank(n)
        reserved = set(starts)
        _carve_walls(grid, rng, n, reserved)
        taken = set(starts)
        try:
            # One bridge route per half; wood on the midline serves both.
            _place(grid, rng, "I", upper, n, taken)
            _place(grid, rng, "F", upper, n, taken)
            _place(grid, rng, "G", lower, n, taken)
            _place(grid, rng, "S", lower, n, taken)
            _place(grid, rng, "T", middle, n, taken)
            if task in ("gold", "gold-or-gem"):
                _place(grid, rng, "o", right_band, n, taken)
            if task == "gold-or-gem":
                _place(grid, rng, "W", middle, n, taken)
                _place(grid, rng, "m", lower, n, taken)
        except RuntimeError:
            continue
        if _connected(grid, n):
            break

    lines = [f"; {task} {n}x{n} map {index} (generated by scripts/make_maps.py)"]
    lines.append("starts: " + " ".join(f"({x},{y})" for (x, y) in starts))
    lines.extend("".join(row) for row in grid)
    return "\n".join(lines) + "\n"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out-dir",
        default=Path(__file__).resolve().parent.parent / "src" / "popmachine" / "data" / "maps",
        type=Path,
    )
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    for task in TASK_SEED:
        for i in range(DESK_COUNT):
            name = f"{task}_15x15_{chr(ord('a') + i)}.map"
            (args.out_dir / name).write_text(make_map(task, DESK_SIZE, i))
            print(name)
        for i in range(PAPER_COUNT):
            name = f"{task}_41x41_{i:02d}.map"
            (args.out_dir / name).write_text(make_map(task, PAPER_SIZE, i))
            print(name)


if __name__ == "__main__":
    main()
