"""Unit tests for the CraftWorld gridworld and map parsing."""

from importlib import resources

import pytest

from popmachine import domain_io
from popmachine.craftworld import (
    CellKind,
    CraftWorld,
    EnvAction,
    EnvState,
    GridMap,
    parse_map,
    render_map,
)
from popmachine.errors import ParseError

DATA = resources.files("popmachine") / "data"

MINI = """\
; a tiny bridge map
starts: (1,1) (3,3)
#####
#.T.#
#G.S#
#...#
#####
"""


def bridge_domain():
    return domain_io.parse_domain((DATA / "domains" / "bridge.dom").read_text()).domain


def gem_domain():
    return domain_io.parse_domain((DATA / "domains" / "gold-or-gem.dom").read_text()).domain


class TestParseMap:
    def test_glyphs_and_shape(self):
        grid = parse_map(MINI)
        assert (grid.width, grid.height) == (5, 5)
        assert grid.kind_at(2, 1) is CellKind.WOOD
        assert grid.kind_at(1, 2) is CellKind.GRASS
        assert grid.kind_at(3, 2) is CellKind.TOOLSHED
        assert grid.kind_at(0, 0) is CellKind.WALL
        assert grid.eval_starts == ((1, 1), (3, 3))
        assert grid.positions_of(CellKind.TOOLSHED) == ((3, 2),)

    def test_start_region_is_row_major_empty_cells(self):
        grid = parse_map(MINI)
        assert grid.start_region == ((1, 1), (3, 1), (2, 2), (1, 3), (2, 3), (3, 3))

    def test_comments_and_blank_lines_skipped(self):
        grid = parse_map("\n; note\n" + MINI + "\n; trailing\n\n")
        assert grid.width == 5

    @pytest.mark.parametrize(
        "mangle, fragment",
        [
            (lambda t: t.replace("starts: (1,1) (3,3)", "grid:"), "starts"),
            (lambda t: t.replace("(3,3)", "(3;3)"), "malformed start"),
            (lambda t: t.replace("starts: (1,1) (3,3)", "starts:"), "at least one"),
            (lambda t: t.replace("#G.S#", "#G.S##"), "width"),
            (lambda t: t.replace("#G.S#", "#G?S#"), "unknown glyph"),
            (lambda t: t.replace("(3,3)", "(9,9)"), "outside"),
            (lambda t: t.replace("(3,3)", "(0,0)"), "wall"),
            (lambda t: "", "empty"),
        ],
    )
    def test_errors_carry_line_and_message(self, mangle, fragment):
        with pytest.raises(ParseError) as info:
            parse_map(mangle(MINI))
        assert fragment in str(info.value)
        assert info.value.line >= 1

    def test_unknown_glyph_reports_row_and_column(self):
        with pytest.raises(ParseError) as info:
            parse_map(MINI.replace("#G.S#", "#G?S#"))
        assert "row 2" in str(info.value) and "column 2" in str(info.value)

    def test_bundled_maps_parse(self):
        maps = sorted(p.name for p in (DATA / "maps").iterdir() if p.name.endswith(".map"))
        assert len(maps) == 42
        for name in maps:
            grid = parse_map((DATA / "maps" / name).read_text())
            assert len(grid.eval_starts) == 5
            assert grid.start_region  # every map has somewhere to start


class TestRender:
    def test_render_roundtrips_grid_body(self):
        grid = parse_map(MINI)
        body = "\n".join(MINI.splitlines()[2:])
        assert render_map(grid) == body

    def test_render_with_agent(self):
        grid = parse_map(MINI)
        out = render_map(grid, agent=(2, 2)).splitlines()
        assert out[2] == "#G@S#"


class TestInteraction:
    def test_pickup_and_precondition_gating(self):
        world = CraftWorld(parse_map(MINI), bridge_domain())
        inv = world.interact(frozenset(), CellKind.WOOD)
        assert inv == frozenset({"has-wood"})
        # toolshed without ingredients leaves the inventory alone
        assert world.interact(inv, CellKind.TOOLSHED) == inv
        full = frozenset({"has-wood", "has-grass"})
        assert world.interact(full, CellKind.TOOLSHED) == frozenset({"has-bridge"})

    def test_empty_and_wall_cells_do_nothing(self):
        world = CraftWorld(parse_map(MINI), bridge_domain())
        inv = frozenset({"has-wood"})
        assert world.interact(inv, CellKind.EMPTY) == inv
        assert world.interact(inv, CellKind.WALL) == inv

    def test_toolshed_prefers_bridge_over_axe(self):
        world = CraftWorld(parse_map(MINI), gem_domain())
        inv = frozenset({"has-grass", "has-wood", "has-iron", "has-stick"})
        out = world.interact(inv, CellKind.TOOLSHED)
        assert "has-bridge" in out and "has-axe" not in out
        # with only axe ingredients the second binding fires
        out = world.interact(frozenset({"has-iron", "has-stick"}), CellKind.TOOLSHED)
        assert out == frozenset({"has-axe"})

    def test_unbound_actions_are_skipped(self):
        # the bridge domain has no axe action, so the toolshed binds only one
        world = CraftWorld(parse_map(MINI), bridge_domain())
        assert [a.name for a in world.bindings[CellKind.TOOLSHED]] == ["use-toolshed"]


class TestStepping:
    def setup_method(self):
        self.world = CraftWorld(parse_map(MINI), bridge_domain())

    def test_blocked_moves_waste_the_step(self):
        s0 = self.world.reset(start=(1, 1))
        s1 = self.world.step(s0, EnvAction.UP)  # border wall above
        assert (s1.x, s1.y) == (1, 1)
        assert s1.inventory == frozenset()
        assert s1.step_count == 1
        s2 = self.world.step(s1, EnvAction.LEFT)  # wall to the left
        assert (s2.x, s2.y) == (1, 1) and s2.step_count == 2

    def test_entry_fires_interaction(self):
        s = self.world.reset(start=(1, 1))
        s = self.world.step(s, EnvAction.RIGHT)  # onto the wood cell
        assert (s.x, s.y) == (2, 1)
        assert s.inventory == frozenset({"has-wood"})
        assert self.world.label(s) == frozenset({"has-wood"})

    def test_full_crafting_walk(self):
        s = self.world.reset(start=(1, 1))
        for a in (EnvAction.RIGHT, EnvAction.LEFT, EnvAction.DOWN,  # wood, back, grass
                  EnvAction.RIGHT, EnvAction.RIGHT):                # across to toolshed
            s = self.world.step(s, a)
        assert (s.x, s.y) == (3, 2)
        assert s.inventory == frozenset({"has-bridge"})
        assert s.step_count == 5

    def test_revisiting_a_pickup_is_idempotent(self):
        s = self.world.reset(start=(1, 1))
        s = self.world.step(s, EnvAction.RIGHT)
        s = self.world.step(s, EnvAction.LEFT)
        s = self.world.step(s, EnvAction.RIGHT)
        assert s.inventory == frozenset({"has-wood"})


class TestReset:
    def setup_method(self):
        self.world = CraftWorld(parse_map(MINI), bridge_domain())

    def test_explicit_start(self):
        s = self.world.reset(start=(3, 3))
        assert s == EnvState(x=3, y=3)

    def test_invalid_starts_rejected(self):
        with pytest.raises(ValueError):
            self.world.reset(start=(0, 0))  # wall
        with pytest.raises(ValueError):
            self.world.reset(start=(9, 9))  # outside

    def test_seeded_reset_is_deterministic_and_in_region(self):
        a = [self.world.reset(seed=7) for _ in range(5)]
        b = [self.world.reset(seed=7) for _ in range(5)]
        assert a == b
        region = set(self.world.grid.start_region)
        assert all((s.x, s.y) in region for s in a)
        # different seeds eventually hit different cells
        seen = {(self.world.reset(seed=k).x, self.world.reset(seed=k).y) for k in range(20)}
        assert len(seen) > 1

    def test_reset_without_empty_cells_fails(self):
        grid = GridMap(
            width=2,
            height=2,
            cells=((CellKind.WALL, CellKind.WOOD),) * 2,
            eval_starts=((1, 0),),
        )
        world = CraftWorld(grid, bridge_domain())
        with pytest.raises(ValueError):
            world.reset(seed=0)
