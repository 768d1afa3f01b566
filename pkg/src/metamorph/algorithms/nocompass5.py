"""Five-module compass-free search (4-neighborhood views, 2- and 3-slidings).

All reachable states are rotationally asymmetric pentominoes, so the modules
always agree on a canonical frame and the decide map is rotation-covariant
by construction.  The sweep is a single track:

* eastward pass: an L-shaped snake (line of four plus a tail) advancing one
  column per two steps -- a 3-sliding of the tail followed by a simultaneous
  pair of rotations;
* westward pass: a vertical column of four with a swinging tail, advancing
  one column per five steps and painting a full four-row band down to the
  west wall;
* a climb up the east wall through a block-shaped crawler, entered at the
  southeast corner and exited into the westward pass along the top band;
* turn routes between passes, derived once by deterministic breadth-first
  search and frozen into rule entries at import.

Wall conditions on every rule are restricted to what the deciding modules
can actually observe; the shared decide machinery additionally verifies at
runtime that a module's action is identical in every world consistent with
its own view.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from ..grid import CLOCKWISE as CW
from ..grid import COUNTERCLOCKWISE as CCW
from ..grid import Cell, Move, Rotation, Sliding, bounding_box, normalize
from ..shapes import canonical_rotation, is_forbidden5, rotation_order
from ..views import View
from .base import (
    Action,
    canonicalize_entry,
    AlgorithmSpec,
    FrameMove,
    FrameRotation,
    FrameSlide,
    RuleEntry,
    RuleTable,
    UnhandledState,
    absolute_to_frame_move,
    make_conds,
)
from .router import FAR, VirtualField, bfs_route, context_of, field_from_context
from .tabledecide import CovariantTableAlgorithm, canonical_world

RADIUS = 4
BIG = RADIUS + 1

# ---------------------------------------------------------------------------
# Pass phases (cells are frame coordinates; shapes normalized on entry)
# ---------------------------------------------------------------------------

A_PHASE = ((0, 1), (0, 0), (1, 0), (2, 0), (3, 0))
B_PHASE = ((0, 0), (1, 0), (2, 0), (3, 0), (3, 1))
W0 = ((0, 1), (1, 0), (1, 1), (1, 2), (1, 3))
W1 = ((0, 0), (0, 1), (1, 1), (1, 2), (1, 3))
W2 = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2))
W3 = ((0, 0), (0, 1), (0, 2), (0, 3), (1, 1))
W4 = ((0, 0), (1, 0), (1, 1), (1, 2), (2, 0))

PASS_CLASSES = frozenset(
    canonical_rotation(s) for s in (A_PHASE, B_PHASE, W0, W1, W2, W3, W4)
)


def _mv_rot(mover: Cell, pivot: Cell, sense: str) -> FrameRotation:
    return FrameRotation(mover, pivot, sense)


def _mv_slide(mover: Cell, direction: Cell, dist: int, side: int) -> FrameSlide:
    return FrameSlide(mover, direction, dist, side)


_frame_move = absolute_to_frame_move


# ---------------------------------------------------------------------------
# Turn routes (searched at import; see module docstring)
# ---------------------------------------------------------------------------


MIN_FIELD = (10, 10)


def _owned(table: RuleTable, cfg: FrozenSet[Cell], f: VirtualField) -> bool:
    """True if an existing entry already claims this exact world."""
    canon, ctx = canonical_world(cfg, f, BIG)
    return table.joint_for(canon, ctx) is not None


def _route_entries(
    table: RuleTable,
    start: FrozenSet[Cell],
    goal: FrozenSet[Cell],
    f: VirtualField,
    tag: str,
    lump_down: Optional[Tuple[str, int]] = None,
    any_dirs: Sequence[str] = (),
    waypoints: Sequence[Cell] = (),
    max_depth: int = 12,
) -> None:
    """Search a route and freeze every step as a rule entry.

    Every direction is pinned exactly as observed (sound for the supported
    minimum field sizes), except: a ``lump_down`` direction gets a one-sided
    condition reaching ``delta`` below the observed distance, so one route
    serves every deeper placement along that axis; ``any_dirs`` directions
    are left unconstrained.
    """

    def prospective(cfg: FrozenSet[Cell]) -> RuleEntry:
        ctx = context_of(cfg, f, BIG)
        conds: Dict[str, frozenset] = {}
        for d, v in ctx.items():
            if d in any_dirs:
                continue
            if lump_down is not None and d == lump_down[0]:
                conds[d] = frozenset(range(max(1, v - lump_down[1]), BIG + 1))
            else:
                conds[d] = frozenset([v])
        return RuleEntry(normalize(cfg), conds, (), tag=tag)

    def state_ok(cfg: FrozenSet[Cell]) -> bool:
        if canonical_rotation(cfg) in PASS_CLASSES or rotation_order(cfg) != 1:
            return False
        return not _owned(table, cfg, f)

    route = bfs_route(start, lambda c: c == goal, f, state_ok,
                      max_depth=max_depth, waypoints=waypoints)
    if route is None:
        raise RuntimeError(f"no route for {tag}")
    for i, (cfg, move) in enumerate(route):
        entry = prospective(cfg)
        x0, y0, _, _ = bounding_box(cfg)
        table.add(RuleEntry(entry.shape, entry.conds,
                            (_frame_move(move, (x0, y0)),), tag=f"{tag}[{i}]"))


@lru_cache(maxsize=1)
def build_table() -> RuleTable:
    """Assemble the rule table: passes, climb, and searched turn routes.

    Insertion order is rule priority: corner-specific routes are registered
    before the spine-generic lumped ones, and route searches refuse to step
    into worlds an earlier entry already owns.
    """
    t = RuleTable(radius=RADIUS, module_count=5, covariant=True)
    c = lambda **kw: make_conds(RADIUS, **kw)

    # --- climb along the east wall, one column off it (advances one row
    # per five steps; the swing through the wall column paints it).
    climb_states = [
        ({(-3, 0), (-3, 1), (-3, 2), (-2, 0), (-2, 1)}, Rotation((-3, 0), (-3, 1), CW)),
        ({(-4, 1), (-3, 1), (-3, 2), (-2, 0), (-2, 1)}, Sliding((-4, 1), (0, 1), 1, -1)),
        ({(-4, 2), (-3, 1), (-3, 2), (-2, 0), (-2, 1)}, Rotation((-4, 2), (-3, 2), CW)),
        ({(-3, 1), (-3, 2), (-3, 3), (-2, 0), (-2, 1)}, Rotation((-2, 0), (-2, 1), CCW)),
        ({(-3, 1), (-3, 2), (-3, 3), (-2, 1), (-1, 1)}, Rotation((-1, 1), (-2, 1), CCW)),
    ]
    f_climb = VirtualField(west=-FAR, east=0, south=-FAR, north=FAR)
    for i, (cells, move) in enumerate(climb_states):
        cfg = frozenset(cells)
        ctx = context_of(cfg, f_climb, BIG)
        x0, y0, _, _ = bounding_box(cfg)
        conds = {"east": frozenset([ctx["east"]]), "west": frozenset([BIG])}
        if i == 2:
            # Pokes one row above the box: needs headroom, and hands over to
            # the exit route at the top.
            conds["north"] = frozenset(range(2, BIG + 1))
        t.add(RuleEntry(normalize(cfg), conds, (_frame_move(move, (x0, y0)),),
                        tag=f"climb[{i}]"))

    # --- southeast corner: enter the climb.  The eastward pass branches at
    # its A phase; a B phase parked in the corner first untucks its tail.
    t.add(RuleEntry(B_PHASE, c(east="adj", south="adj"),
                    (_mv_slide((3, 1), (-1, 0), 3, 1),), tag="B-se-untuck"))
    f_se = VirtualField(west=-FAR, east=0, south=-1, north=FAR)
    _route_entries(
        t,
        start=frozenset({(-4, 1), (-4, 0), (-3, 0), (-2, 0), (-1, 0)}),
        goal=frozenset({(-4, 2), (-3, 1), (-3, 2), (-2, 0), (-2, 1)}),
        f=f_se,
        tag="se-entry",
    )

    # --- climb top: exit into the westward pass along the top band --------
    f_top = VirtualField(west=-FAR, east=0, south=-FAR, north=4)
    _route_entries(
        t,
        start=frozenset({(-4, 3), (-3, 2), (-3, 3), (-2, 1), (-2, 2)}),
        goal=frozenset({(-3, 1), (-2, 0), (-2, 1), (-2, 2), (-2, 3)}),
        f=f_top,
        tag="climb-top",
        waypoints=((-1, 3), (-1, 2), (-2, 3)),
        max_depth=16,
    )

    # --- east-wall turn, one row above the floor (spine r=1): clamp the
    # westward band to rows 0..3.
    f_low = VirtualField(west=-FAR, east=0, south=-1, north=FAR)
    _route_entries(
        t,
        start=frozenset({(-4, 1), (-3, 1), (-2, 1), (-1, 1), (-1, 2)}),
        goal=frozenset({(-2, 0), (-2, 1), (-1, 1), (-1, 2), (-1, 3)}),
        f=f_low,
        tag="eastturn-low",
    )

    # --- east-wall turn, generic: drop two rows into the westward band.
    # Searched at baseline spine 4; the south conditions extend down so the
    # same entries serve every spine from 2 up (the corner entries above
    # take priority below that).
    f_gen = VirtualField(west=-FAR, east=0, south=-1, north=FAR)
    _route_entries(
        t,
        start=frozenset({(-4, 4), (-3, 4), (-2, 4), (-1, 4), (-1, 5)}),
        goal=frozenset({(-2, 2), (-2, 3), (-2, 4), (-2, 5), (-3, 3)}),
        f=f_gen,
        tag="eastturn",
        lump_down=("south", 2),
        any_dirs=("north",),
        max_depth=14,
    )

    # --- west-wall turn: unfold into the eastward pass in the band's two
    # bottom rows; position-independent along the wall.
    f_west = VirtualField(west=-1, east=FAR, south=-FAR, north=FAR)
    _route_entries(
        t,
        start=frozenset({(0, 0), (0, 1), (0, 2), (0, 3), (1, 1)}),
        goal=frozenset({(0, 1), (0, 0), (1, 0), (2, 0), (3, 0)}),
        f=f_west,
        tag="westturn",
        any_dirs=("north", "south"),
    )

    # --- passes last: their broad conditions yield to everything above ----
    tail_slide = (_mv_slide((0, 1), (1, 0), 3, -1),)
    t.add(RuleEntry(A_PHASE, c(east="free"), tail_slide, tag="A-slide"))
    t.add(RuleEntry(A_PHASE, c(east="adj", south="free"), tail_slide, tag="A-slide-wall"))
    t.add(RuleEntry(B_PHASE, c(east="free"),
                    (_mv_rot((0, 0), (1, 0), CW), _mv_rot((3, 1), (3, 0), CW)),
                    tag="B-joint"))
    t.add(RuleEntry(W0, {}, (_mv_slide((1, 0), (-1, 0), 1, -1),), tag="W0"))
    t.add(RuleEntry(W1, {}, (_mv_rot((1, 3), (1, 2), CCW),), tag="W1"))
    t.add(RuleEntry(W2, c(north="free"), (_mv_rot((1, 2), (0, 2), CCW),), tag="W2"))
    t.add(RuleEntry(W3, c(west="free"), (_mv_rot((0, 0), (0, 1), CW),), tag="W3"))
    t.add(RuleEntry(W4, c(south="free"), (_mv_rot((2, 0), (1, 0), CW),), tag="W4"))
    return t


@lru_cache(maxsize=1)
def algorithm() -> CovariantTableAlgorithm:
    return CovariantTableAlgorithm(
        table=build_table(),
        pass_classes=PASS_CLASSES,
        radius=RADIUS,
        module_count=5,
    )


def decide(view: View) -> Action:
    return algorithm().decide(view)


def spec() -> AlgorithmSpec:
    return AlgorithmSpec(
        name="nocompass5",
        radius=RADIUS,
        required_compass="none",
        module_count=5,
        decide=decide,
        forbidden_initial=lambda c: is_forbidden5(c),
    )
