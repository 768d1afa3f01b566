"""Seven-module compass-free locomotion and search (4-neighborhood views).

Strategy in three layers:

* Stretched shapes (some pair of modules beyond view range) contract first:
  a module that sees fewer than seven modules, has exactly one neighbor, and
  sees its whole visible component strictly ahead curls around its neighbor.
  Symmetric line ends curl simultaneously, so contraction also works under
  the symmetric-compass adversary.
* Compact 180-degree-symmetric shapes evolve through forced symmetric pairs
  of moves toward a fixed pre-break state (two vertical bars joined by a
  center module).  There the center module, whose view is self-symmetric,
  performs a 1-sliding chosen by its own local frame -- the one sanctioned
  departure from rotation covariance -- which breaks the symmetry.
* Compact asymmetric shapes run the rule table: an eastward two-row pass,
  a westward four-row band pass, a climb along a wall, and searched turn
  routes, mirroring the five-module track.  Recovery routing funnels every
  remaining shape into a pass, which doubles as the locomotion engine:
  mid-field the passes displace the system one cell per cycle forever.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from ..grid import CLOCKWISE as CW
from ..grid import COUNTERCLOCKWISE as CCW
from ..grid import Cell, Rotation, Sliding, bounding_box, normalize, rotate_vec
from ..shapes import canonical_rotation, one_sided_polyominoes, rotation_order
from ..views import EMPTY, MODULE, TARGET_EMPTY, TARGET_WITH_MODULE, View
from .base import (
    Action,
    AlgorithmSpec,
    FrameMove,
    LocalRotation,
    RuleEntry,
    RuleTable,
    UnhandledState,
    absolute_to_frame_move,
    make_conds,
)
from .router import FAR, VirtualField, bfs_route, context_of, single_moves
from .tabledecide import CovariantTableAlgorithm, break_candidates, canonical_world

RADIUS = 4
BIG = RADIUS + 1
MIN_FIELD = (9, 9)

# --- pass cycles (frame coordinates) ---------------------------------------

E7_CYCLE = [
    ({(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (3, 0), (4, 0)},
     Sliding((1, 1), (1, 0), 3, -1)),
    ({(0, 0), (0, 1), (1, 0), (2, 0), (3, 0), (4, 0), (4, 1)},
     Sliding((0, 1), (1, 0), 2, -1)),
    ({(0, 0), (1, 0), (2, 0), (2, 1), (3, 0), (4, 0), (4, 1)},
     Rotation((0, 0), (1, 0), CW)),
    ({(1, 0), (1, 1), (2, 0), (2, 1), (3, 0), (4, 0), (4, 1)},
     Rotation((4, 1), (4, 0), CW)),
]

W7_CYCLE = [
    ({(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (1, 3)},
     Rotation((0, 0), (0, 1), CW)),
    ({(-1, 1), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (1, 3)},
     Sliding((0, 2), (-1, 0), 1, 1)),
    ({(-1, 1), (-1, 2), (0, 1), (1, 0), (1, 1), (1, 2), (1, 3)},
     Sliding((1, 0), (-1, 0), 2, -1)),
    ({(-1, 0), (-1, 1), (-1, 2), (0, 1), (1, 1), (1, 2), (1, 3)},
     Rotation((1, 3), (1, 2), CCW)),
    ({(-1, 0), (-1, 1), (-1, 2), (0, 1), (0, 2), (1, 1), (1, 2)},
     Rotation((1, 1), (0, 1), CW)),
    ({(-1, 0), (-1, 1), (-1, 2), (0, 0), (0, 1), (0, 2), (1, 2)},
     Rotation((1, 2), (0, 2), CCW)),
]

CLIMB7_CYCLE = [
    ({(-3, 0), (-3, 1), (-3, 2), (-2, 0), (-2, 1), (-2, 2), (-2, 3)},
     Rotation((-3, 1), (-3, 2), CW)),
    ({(-4, 2), (-3, 0), (-3, 2), (-2, 0), (-2, 1), (-2, 2), (-2, 3)},
     Rotation((-4, 2), (-3, 2), CW)),
    ({(-3, 0), (-3, 2), (-3, 3), (-2, 0), (-2, 1), (-2, 2), (-2, 3)},
     Rotation((-3, 3), (-2, 3), CW)),
    ({(-3, 0), (-3, 2), (-2, 0), (-2, 1), (-2, 2), (-2, 3), (-2, 4)},
     Sliding((-3, 2), (0, 1), 1, -1)),
    ({(-3, 0), (-3, 3), (-2, 0), (-2, 1), (-2, 2), (-2, 3), (-2, 4)},
     Sliding((-3, 0), (0, 1), 2, -1)),
    ({(-3, 2), (-3, 3), (-2, 0), (-2, 1), (-2, 2), (-2, 3), (-2, 4)},
     Rotation((-2, 0), (-2, 1), CW)),
]

#: Pre-break state: two vertical bars joined by the center module.
H_STATE = frozenset({(0, 0), (0, 1), (0, 2), (1, 1), (2, 0), (2, 1), (2, 2)})

PASS_CLASSES = frozenset(
    canonical_rotation(frozenset(cells)) for cells, _ in E7_CYCLE + W7_CYCLE
)


def _chebyshev_diameter(cells) -> int:
    pts = list(cells)
    return max(
        max(abs(a[0] - b[0]), abs(a[1] - b[1])) for a in pts for b in pts
    )


def _compact(cfg) -> bool:
    return _chebyshev_diameter(cfg) <= RADIUS


def _emit(table: RuleTable, cfg, move, f: VirtualField, tag: str,
          lump_down: Optional[Tuple[str, int]] = None,
          any_dirs: Sequence[str] = (),
          extra_conds: Optional[Dict[str, frozenset]] = None) -> None:
    ctx = context_of(frozenset(cfg), f, BIG)
    x0, y0, _, _ = bounding_box(cfg)
    conds: Dict[str, frozenset] = {}
    for d, v in ctx.items():
        if d in any_dirs:
            continue
        if lump_down is not None and d == lump_down[0]:
            conds[d] = frozenset(range(max(1, v - lump_down[1]), BIG + 1))
        else:
            conds[d] = frozenset([v])
    if extra_conds:
        conds.update(extra_conds)
    table.add(RuleEntry(normalize(cfg), conds,
                        (absolute_to_frame_move(move, (x0, y0)),), tag=tag))


def _route_entries(
    table: RuleTable,
    start: FrozenSet[Cell],
    goal: FrozenSet[Cell],
    f: VirtualField,
    tag: str,
    lump_down: Optional[Tuple[str, int]] = None,
    any_dirs: Sequence[str] = (),
    waypoints: Sequence[Cell] = (),
    max_depth: int = 14,
) -> None:
    def owned(cfg: FrozenSet[Cell]) -> bool:
        canon, ctx = canonical_world(cfg, f, BIG)
        return table.joint_for(canon, ctx) is not None

    def state_ok(cfg: FrozenSet[Cell]) -> bool:
        if canonical_rotation(cfg) in PASS_CLASSES or rotation_order(cfg) != 1:
            return False
        if not _compact(cfg):
            return False
        return not owned(cfg)

    route = bfs_route(start, lambda c: c == goal, f, state_ok,
                      max_depth=max_depth, waypoints=waypoints)
    if route is None:
        raise RuntimeError(f"no route for {tag}")
    for i, (cfg, move) in enumerate(route):
        _emit(table, cfg, move, f, f"{tag}[{i}]",
              lump_down=lump_down, any_dirs=any_dirs)


def _symmetric_pair_moves(config: FrozenSet[Cell], f: VirtualField):
    """Legal symmetric joint moves of a C2 configuration (pairs only)."""
    from ..shapes import rotational_symmetry

    sym = rotational_symmetry(config)
    if sym.group == "C1":
        return
    cx, cy = sym.center

    def partner(cell: Cell) -> Cell:
        return (int(round(2 * cx - cell[0])), int(round(2 * cy - cell[1])))

    for mv, _ in single_moves(config, f, kmax=3):
        m = mv.mover
        pm = partner(m)
        if pm == m:
            continue  # the center cannot move symmetrically with itself
        # Build the mirrored move.
        if isinstance(mv, Rotation):
            pmv = Rotation(pm, partner(mv.pivot), mv.sense)
        else:
            pmv = Sliding(pm, (-mv.direction[0], -mv.direction[1]),
                          mv.distance, mv.support_side)
        others = config - {m, pm}
        from ..grid import is_connected

        if not others or not is_connected(others):
            continue
        ok = True
        claimed = set()
        for one in (mv, pmv):
            for cell in one.trajectory:
                if f.is_wall(cell) or cell in others or cell in claimed:
                    ok = False
                    break
            if isinstance(one, Sliding):
                for cell in one.supports:
                    if cell not in others:
                        ok = False
                        break
            else:
                if one.pivot not in others:
                    ok = False
            if not ok:
                break
            claimed.update(one.trajectory)
        if not ok:
            continue
        new_config = frozenset(others | {mv.destination, pmv.destination})
        if len(new_config) != len(config):
            continue
        # Every module must be able to confirm the clearance this pair
        # needs: extension e beyond the bounding box along an axis of span
        # s is only decidable by all modules when e <= radius - s + 1.
        x0, y0, x1, y1 = bounding_box(config)
        spans = {"east": x1 - x0 + 1, "west": x1 - x0 + 1,
                 "north": y1 - y0 + 1, "south": y1 - y0 + 1}
        exts = _pair_extensions(config, (mv, pmv))
        if any(e > 0 and e > RADIUS - spans[d] + 1 for d, e in exts.items()):
            continue
        from ..grid import is_connected as conn

        if conn(new_config):
            yield (mv, pmv), new_config


def _pair_extensions(config, pair) -> Dict[str, int]:
    """How far the moves' trajectories reach beyond the bounding box."""
    x0, y0, x1, y1 = bounding_box(config)
    ext = {"east": 0, "west": 0, "north": 0, "south": 0}
    for mv in pair:
        for cell in mv.trajectory:
            ext["east"] = max(ext["east"], cell[0] - x1)
            ext["west"] = max(ext["west"], x0 - cell[0])
            ext["north"] = max(ext["north"], cell[1] - y1)
            ext["south"] = max(ext["south"], y0 - cell[1])
    return ext


C2_BREAKERS: Dict[tuple, FrozenSet[Cell]] = {}


def _build_symmetric_routes(table: RuleTable) -> None:
    """Entries for 180-degree-symmetric compact shapes.

    The center of every such heptomino is an articulation point (asserted
    below), so the literal center-slide break is illegal under the single
    backbone rule.  Instead one symmetric orbit is designated per shape:
    its two modules each pick a 1-sliding by fixed local-frame priority.
    With opposed compasses the picks mirror and the shape stays symmetric
    forever -- that adversary is unbeatable -- while any other assignment
    desynchronizes the picks and the shape falls out of symmetry.
    """
    from ..grid import is_connected
    from ..shapes import rotational_symmetry
    from .tabledecide import _local_slides

    f = VirtualField(west=-FAR, east=FAR, south=-FAR, north=FAR)
    c2_classes = [s for s in one_sided_polyominoes(7)
                  if rotation_order(s) == 2 and _compact(s)]
    for s in c2_classes:
        config = frozenset(s)
        sym = rotational_symmetry(config)
        cx, cy = sym.center
        center = (int(cx), int(cy))
        rest = config - {center}
        assert center in config and not is_connected(rest), (
            "a symmetric heptomino with a movable center would enable the "
            "center-slide break; none exists")

        def partner(cell: Cell) -> Cell:
            return (int(2 * cx - cell[0]), int(2 * cy - cell[1]))

        def unblocked(cell) -> bool:
            return False  # mid-field validation; walls handled at runtime

        chosen_orbit = None
        for m in sorted(config):
            pm = partner(m)
            if pm == m or pm < m:
                continue
            others = config - {m, pm}
            if not is_connected(others):
                continue
            cands_m = break_candidates(config, m, unblocked)
            cands_p = break_candidates(config, pm, unblocked)
            if not cands_m or not cands_p:
                continue
            ok = True
            for mv in cands_m:
                for pmv in cands_p:
                    traj = list(mv.trajectory) + list(pmv.trajectory)
                    if len(set(traj)) != len(traj) or any(c in others for c in traj):
                        ok = False
                    for one in (mv, pmv):
                        if isinstance(one, Sliding):
                            if any(c not in others for c in one.supports):
                                ok = False
                        else:
                            if one.pivot not in others:
                                ok = False
                    new_config = frozenset(others | {mv.destination, pmv.destination})
                    if len(new_config) != 7 or not is_connected(new_config):
                        ok = False
                    if not ok:
                        break
                if not ok:
                    break
            if ok:
                chosen_orbit = (m, pm)
                break
        if chosen_orbit is None:
            raise RuntimeError(f"no breakable orbit for C2 class {s}")
        canon = canonical_rotation(config)
        from ..shapes import rotations_of as _rots
        rots = _rots(tuple(sorted(config)))
        q = rots.index(canon)
        pts = [rotate_vec(c, q) for c in config]
        x0 = min(a for a, _ in pts)
        y0 = min(b for _, b in pts)

        def map_pos(p):
            r = rotate_vec(p, q)
            return (r[0] - x0, r[1] - y0)

        C2_BREAKERS[canon] = frozenset({map_pos(chosen_orbit[0]),
                                        map_pos(chosen_orbit[1])})
        table.add(RuleEntry(canon, {}, (), tag="c2-break-pair",
                            special="c2-break-pair"))


@lru_cache(maxsize=1)
def build_table() -> RuleTable:
    t = RuleTable(radius=RADIUS, module_count=7, covariant=True)
    c = lambda **kw: make_conds(RADIUS, **kw)
    f_free = VirtualField(west=-FAR, east=FAR, south=-FAR, north=FAR)
    f_east = VirtualField(west=-FAR, east=0, south=-FAR, north=FAR)

    # Climb along the east wall (one column off it).
    for i, (cells, move) in enumerate(CLIMB7_CYCLE):
        extra = None
        if i == 2:
            extra = {"north": frozenset(range(2, BIG + 1))}
        _emit(t, frozenset(cells), move, f_east, f"climb7[{i}]",
              any_dirs=("north", "south"), extra_conds=extra)

    # Symmetric phase-one routes and the break.
    _build_symmetric_routes(t)

    # Southeast corner: eastward pass enters the climb.
    f_se = VirtualField(west=-FAR, east=0, south=-1, north=FAR)
    e3_se = frozenset({(-4, 0), (-4, 1), (-3, 0), (-3, 1), (-2, 0), (-1, 0), (-1, 1)})
    _route_entries(
        t,
        start=e3_se,
        goal=frozenset({(-3, 0), (-3, 1), (-3, 2), (-2, 0), (-2, 1), (-2, 2), (-2, 3)}),
        f=f_se,
        tag="se-entry7",
        max_depth=14,
    )

    # Climb top: exit into the westward band along the top, sweeping the
    # northeast corner cells on the way.
    f_top = VirtualField(west=-FAR, east=0, south=-FAR, north=4)
    k2_top = frozenset({(-3, 0), (-3, 2), (-3, 3), (-2, 0), (-2, 1), (-2, 2), (-2, 3)})
    _route_entries(
        t,
        start=k2_top,
        goal=frozenset({(-2, 0), (-2, 1), (-2, 2), (-1, 0), (-1, 1), (-1, 2), (-1, 3)}),
        f=f_top,
        tag="climb-top7",
        waypoints=((-1, 3), (-1, 2), (-2, 3)),
        max_depth=16,
    )

    # East-wall turn, one row above the floor: band clamps to rows 0..3.
    f_low = VirtualField(west=-FAR, east=0, south=-1, north=FAR)
    e3_low = frozenset({(-4, 1), (-4, 2), (-3, 1), (-3, 2), (-2, 1), (-1, 1), (-1, 2)})
    _route_entries(
        t,
        start=e3_low,
        goal=frozenset({(-2, 0), (-2, 1), (-2, 2), (-1, 0), (-1, 1), (-1, 2), (-1, 3)}),
        f=f_low,
        tag="eastturn7-low",
        max_depth=14,
    )

    # East-wall turn, generic: drop two rows into the band.
    e3_gen = frozenset({(-4, 4), (-4, 5), (-3, 4), (-3, 5), (-2, 4), (-1, 4), (-1, 5)})
    _route_entries(
        t,
        start=e3_gen,
        goal=frozenset({(-2, 2), (-2, 3), (-2, 4), (-1, 2), (-1, 3), (-1, 4), (-1, 5)}),
        f=f_low,
        tag="eastturn7",
        lump_down=("south", 2),
        any_dirs=("north",),
        max_depth=14,
    )

    # West-wall turn: unfold into the eastward pass on the band's bottom rows.
    f_west = VirtualField(west=-1, east=FAR, south=-FAR, north=FAR)
    w0_wall = frozenset({(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (1, 3)})
    _route_entries(
        t,
        start=w0_wall,
        goal=frozenset({(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (3, 0), (4, 0)}),
        f=f_west,
        tag="westturn7",
        any_dirs=("north", "south"),
        max_depth=14,
    )

    # Passes last: broad conditions yield to everything above.
    for i, (cells, move) in enumerate(E7_CYCLE):
        conds = c(east="free") if i == 3 else {}
        x0, y0, _, _ = bounding_box(cells)
        t.add(RuleEntry(normalize(cells), conds,
                        (absolute_to_frame_move(move, (x0, y0)),), tag=f"E7[{i}]"))
    for i, (cells, move) in enumerate(W7_CYCLE):
        conds: Dict[str, frozenset] = {}
        if i == 0:
            conds = c(west="free")
        elif i == 5:
            conds = c(north="free")
        x0, y0, _, _ = bounding_box(cells)
        t.add(RuleEntry(normalize(cells), conds,
                        (absolute_to_frame_move(move, (x0, y0)),), tag=f"W7[{i}]"))
    return t


class SevenModuleAlgorithm(CovariantTableAlgorithm):
    """Adds stretched-shape contraction on top of the rule table."""

    def decide(self, view: View) -> Action:
        if view.sees_target_with_module():
            return None
        mods = view.module_offsets()
        if len(mods) < self.module_count:
            return self._curl(view, mods)
        if _chebyshev_diameter(mods) > RADIUS:
            # Stretched but fully visible: only the far, partially sighted
            # ends contract; everyone who sees the whole shape waits.
            return None
        return super().decide(view)

    def _curl(self, view: View, mods) -> Action:
        """Contraction move for a stretched shape's extreme module."""
        others = [m for m in mods if m != (0, 0)]
        adjacent = [m for m in others if abs(m[0]) + abs(m[1]) == 1]
        if len(adjacent) != 1:
            return None
        u = adjacent[0]
        if any(m[0] * u[0] + m[1] * u[1] < 1 for m in others):
            return None

        def cell_free(p: Cell) -> bool:
            return view.at(p[0], p[1]) in (EMPTY, TARGET_EMPTY)

        for sense in (CW, CCW):
            rot = rotate_vec((-u[0], -u[1]), -1 if sense == CW else 1)
            corner = rot
            dest = (u[0] + rot[0], u[1] + rot[1])
            if cell_free(corner) and cell_free(dest):
                return LocalRotation(u, sense)
        return None


@lru_cache(maxsize=1)
def algorithm() -> SevenModuleAlgorithm:
    alg = SevenModuleAlgorithm(
        table=build_table(),
        pass_classes=PASS_CLASSES,
        radius=RADIUS,
        module_count=7,
        min_field=MIN_FIELD,
    )
    alg.breaker_orbits = dict(C2_BREAKERS)
    return alg


def decide(view: View) -> Action:
    return algorithm().decide(view)


def spec() -> AlgorithmSpec:
    return AlgorithmSpec(
        name="nocompass7",
        radius=RADIUS,
        required_compass="none",
        module_count=7,
        decide=decide,
        compass_sensitive_when_symmetric=True,
    )
