"""Algorithm plumbing: local-frame actions, algorithm specs, and the
rule-table machinery shared by the search and locomotion algorithms.

A distributed algorithm is a pure function from a :class:`~metamorph.views.View`
to an action expressed in the observer's local frame.  The table machinery
below implements such functions as lookups keyed on the observed shape plus
wall context, with one crucial twist: a module only commits to an action when
every table row *consistent with what it can see* assigns it the same action.
A module that cannot see a distant wall therefore acts identically in all
states that differ only by that wall, which is exactly the discipline that
makes the synchronous executions well defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..grid import (
    CLOCKWISE,
    COUNTERCLOCKWISE,
    Cell,
    InvalidArgument,
    Move,
    Rotation,
    Sliding,
    normalize,
    rotate_vec,
)
from ..shapes import rotations_of
from ..views import View

DIR_NAMES = ("east", "north", "west", "south")
DIR_VECS = {"east": (1, 0), "north": (0, 1), "west": (-1, 0), "south": (0, -1)}


class UnhandledState(RuntimeError):
    """The algorithm has no consistent rule for an observed view."""


@dataclass(frozen=True)
class LocalRotation:
    """Rotate around the backbone module at ``pivot_offset`` (local frame)."""

    pivot_offset: Cell
    sense: str


@dataclass(frozen=True)
class LocalSlide:
    direction: Cell
    distance: int
    support_side: int


LocalMove = LocalRotation | LocalSlide
Action = Optional[LocalMove]  # None means Stay


def local_to_global(action: LocalMove, mover: Cell, compass_rotation: int) -> Move:
    """Realize a local-frame action as a global move of ``mover``."""
    if isinstance(action, LocalRotation):
        gp = rotate_vec(action.pivot_offset, compass_rotation)
        return Rotation(mover, (mover[0] + gp[0], mover[1] + gp[1]), action.sense)
    gd = rotate_vec(action.direction, compass_rotation)
    return Sliding(mover, gd, action.distance, action.support_side)


@dataclass(frozen=True)
class AlgorithmSpec:
    """A named distributed algorithm: radius, compass requirement, decide."""

    name: str
    radius: int
    required_compass: str  # "global" | "none"
    module_count: int
    decide: Callable[[View], Action]
    forbidden_initial: Optional[Callable[[FrozenSet[Cell]], bool]] = None
    #: True when physical behavior may depend on compasses at rotationally
    #: symmetric configurations (the 7-module symmetry break).
    compass_sensitive_when_symmetric: bool = False


# ---------------------------------------------------------------------------
# In-frame moves for rule tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FrameRotation:
    mover: Cell  # position in the entry's normalized frame
    pivot: Cell
    sense: str

    def translated(self, dx: int, dy: int) -> "FrameRotation":
        return FrameRotation(
            (self.mover[0] + dx, self.mover[1] + dy),
            (self.pivot[0] + dx, self.pivot[1] + dy),
            self.sense,
        )


@dataclass(frozen=True)
class FrameSlide:
    mover: Cell
    direction: Cell
    distance: int
    support_side: int

    def translated(self, dx: int, dy: int) -> "FrameSlide":
        return FrameSlide(
            (self.mover[0] + dx, self.mover[1] + dy),
            self.direction,
            self.distance,
            self.support_side,
        )


FrameMove = FrameRotation | FrameSlide


def rotate_frame_move(mv: FrameMove, q: int, shape_cells: Sequence[Cell]) -> FrameMove:
    """Rotate an in-frame move by ``q`` quarter turns ccw, renormalizing
    positions against the rotated shape's bounding box."""
    pts = [rotate_vec(c, q) for c in shape_cells]
    x0 = min(p[0] for p in pts)
    y0 = min(p[1] for p in pts)

    def map_pos(p: Cell) -> Cell:
        r = rotate_vec(p, q)
        return (r[0] - x0, r[1] - y0)

    if isinstance(mv, FrameRotation):
        return FrameRotation(map_pos(mv.mover), map_pos(mv.pivot), mv.sense)
    return FrameSlide(map_pos(mv.mover), rotate_vec(mv.direction, q), mv.distance, mv.support_side)


def absolute_to_frame_move(move: Move, origin: Cell) -> FrameMove:
    """Express an absolute grid move in frame coordinates relative to origin."""
    ox, oy = origin
    if isinstance(move, Rotation):
        return FrameRotation(
            (move.mover[0] - ox, move.mover[1] - oy),
            (move.pivot[0] - ox, move.pivot[1] - oy),
            move.sense,
        )
    return FrameSlide(
        (move.mover[0] - ox, move.mover[1] - oy),
        move.direction,
        move.distance,
        move.support_side,
    )


def frame_move_to_local(mv: FrameMove, my_pos: Cell) -> LocalMove:
    """Express an in-frame move of the module at ``my_pos`` relative to it."""
    if isinstance(mv, FrameRotation):
        return LocalRotation(
            (mv.pivot[0] - mv.mover[0], mv.pivot[1] - mv.mover[1]), mv.sense
        )
    return LocalSlide(mv.direction, mv.distance, mv.support_side)


# ---------------------------------------------------------------------------
# Wall contexts
# ---------------------------------------------------------------------------
#
# A context assigns each frame direction the distance from the shape's
# bounding-box edge to the wall line, clipped at ``radius + 1`` (``BIG``):
# a wall at clipped distance BIG is invisible to every module.


def clip_distance(d: int, radius: int) -> int:
    big = radius + 1
    return d if d <= radius else big


@dataclass(frozen=True)
class RuleEntry:
    """One row: an oriented shape, wall conditions, and the joint move."""

    shape: Tuple[Cell, ...]  # normalized sorted cells
    conds: Mapping[str, FrozenSet[int]]  # direction -> allowed clipped distances
    joint: Tuple[FrameMove, ...]
    tag: str = ""  # diagnostic label
    special: str = ""  # "" or a special-behavior marker ("break-center")

    def matches_exact(self, ctx: Mapping[str, int]) -> bool:
        return all(ctx[d] in allowed for d, allowed in self.conds.items())


def make_conds(radius: int, **speclets: object) -> Dict[str, FrozenSet[int]]:
    """Convenience cond builder.

    Values: an int (exactly that clipped distance), a tuple of ints, or one
    of the strings ``"adj"`` (=1), ``"free"`` (> 1), ``"far"`` (= BIG).
    """
    big = radius + 1
    out: Dict[str, FrozenSet[int]] = {}
    for d, v in speclets.items():
        if d not in DIR_NAMES:
            raise InvalidArgument(f"bad direction {d}")
        if v == "adj":
            out[d] = frozenset([1])
        elif v == "free":
            out[d] = frozenset(range(2, big + 1))
        elif v == "far":
            out[d] = frozenset([big])
        elif isinstance(v, int):
            out[d] = frozenset([v])
        elif isinstance(v, (tuple, list, set, frozenset)):
            out[d] = frozenset(int(x) for x in v)
        else:
            raise InvalidArgument(f"bad cond {v!r}")
    return out


def canonicalize_entry(entry: RuleEntry) -> RuleEntry:
    """Rotate an entry so its shape is the rotation-canonical orientation."""
    shape = tuple(sorted(entry.shape))
    rots = rotations_of(shape)
    canon = min(rots)
    q = rots.index(canon)
    if q == 0:
        return entry
    joint = tuple(rotate_frame_move(mv, q, shape) for mv in entry.joint)
    conds: Dict[str, FrozenSet[int]] = {}
    for d, allowed in entry.conds.items():
        nv = rotate_vec(DIR_VECS[d], q)
        nd = next(n for n, v in DIR_VECS.items() if v == nv)
        conds[nd] = allowed
    return RuleEntry(canon, conds, joint, tag=entry.tag, special=entry.special)


class RuleTable:
    """A complete view-to-action rule set over oriented shapes and contexts.

    ``covariant`` tables are keyed on rotation-canonical shapes and consulted
    under every minimizing rotation; non-covariant tables (global compass)
    are keyed on the oriented shape as seen.
    """

    def __init__(self, radius: int, module_count: int, covariant: bool):
        self.radius = radius
        self.module_count = module_count
        self.covariant = covariant
        self._entries: Dict[Tuple[Cell, ...], List[RuleEntry]] = {}

    def add(self, entry: RuleEntry) -> None:
        shape = tuple(sorted(entry.shape))
        if len(shape) != self.module_count:
            raise InvalidArgument(
                f"entry shape has {len(shape)} cells, table is for {self.module_count}"
            )
        norm = normalize(shape)
        if norm != shape:
            raise InvalidArgument(f"entry shape not normalized: {entry.tag or shape}")
        if self.covariant:
            entry = canonicalize_entry(entry)
            shape = entry.shape
        self._entries.setdefault(shape, []).append(entry)

    def entries_for(self, shape: Tuple[Cell, ...]) -> List[RuleEntry]:
        return self._entries.get(tuple(sorted(shape)), [])

    def all_entries(self) -> Iterable[RuleEntry]:
        for rows in self._entries.values():
            yield from rows

    # -- exact lookup used by fast simulation paths ------------------------

    def entry_for(self, shape: Tuple[Cell, ...], ctx: Mapping[str, int]) -> Optional[RuleEntry]:
        """First matching entry wins; insertion order is rule priority."""
        for e in self.entries_for(shape):
            if e.matches_exact(ctx):
                return e
        return None

    def joint_for(self, shape: Tuple[Cell, ...], ctx: Mapping[str, int]) -> Optional[Tuple[FrameMove, ...]]:
        e = self.entry_for(shape, ctx)
        return None if e is None else e.joint

    def check_overlaps(self, min_field: Tuple[int, int] = (9, 9)) -> List[str]:
        """Pairs of same-shape entries sharing a feasible context.

        Feasibility accounts for the minimum supported field: opposite wall
        distances below the clip must leave room for the shape.
        """
        big = self.radius + 1
        problems = []
        for shape, rows in self._entries.items():
            xs = [c[0] for c in shape]
            ys = [c[1] for c in shape]
            sw, sh = max(xs) + 1, max(ys) + 1
            for i in range(len(rows)):
                for j in range(i + 1, len(rows)):
                    a, b = rows[i], rows[j]
                    joint_ok = True
                    sets = {}
                    for d in DIR_NAMES:
                        aa = a.conds.get(d, frozenset(range(1, big + 1)))
                        bb = b.conds.get(d, frozenset(range(1, big + 1)))
                        inter = aa & bb
                        if not inter:
                            joint_ok = False
                            break
                        sets[d] = inter
                    if not joint_ok:
                        continue
                    # Some combination must be feasible in a real field.
                    feasible = False
                    for e in sets["east"]:
                        for w in sets["west"]:
                            if e < big and w < big and e + w < min_field[0] + 2 - sw:
                                continue
                            for n in sets["north"]:
                                for s in sets["south"]:
                                    if n < big and s < big and n + s < min_field[1] + 2 - sh:
                                        continue
                                    feasible = True
                                    break
                                if feasible:
                                    break
                            if feasible:
                                break
                        if feasible:
                            break
                    if feasible and a.joint != b.joint:
                        problems.append(f"{a.tag or shape} overlaps {b.tag or shape}")
        return problems


# ---------------------------------------------------------------------------
# View-side evaluation
# ---------------------------------------------------------------------------


def view_knowledge(view: View) -> Tuple[Tuple[Cell, ...], Cell, Dict[str, Tuple[int, bool]]]:
    """Extract (normalized shape, my position, wall knowledge) from a view.

    Wall knowledge maps each local direction to ``(value, exact)``: the
    clipped bbox-edge distance if the wall is visible (exact=True), else a
    lower bound with exact=False.  Requires every module to be visible.
    """
    mods = view.module_offsets()
    xs = [m[0] for m in mods]
    ys = [m[1] for m in mods]
    x0, y0 = min(xs), min(ys)
    shape = tuple(sorted((x - x0, y - y0) for (x, y) in mods))
    me = (-x0, -y0)
    k = view.radius
    big = k + 1
    walls = view.wall_distances()
    maxx = max(xs) - x0
    maxy = max(ys) - y0
    # Offsets of the observer to each bbox edge.
    edge_off = {
        "east": maxx - me[0],
        "north": maxy - me[1],
        "west": me[0],
        "south": me[1],
    }
    knowledge: Dict[str, Tuple[int, bool]] = {}
    for d in DIR_NAMES:
        wd = walls[d]
        if wd is not None:
            bbox_dist = wd - edge_off[d]
            knowledge[d] = (clip_distance(bbox_dist, k), True)
        else:
            # Wall farther than k from me: bbox distance > k - edge_off.
            bound = max(1, k - edge_off[d] + 1)
            knowledge[d] = (min(bound, big), False)
    return shape, me, knowledge


def _consistent(ctx_allowed: FrozenSet[int], know: Tuple[int, bool], big: int) -> bool:
    value, exact = know
    if exact:
        return value in ctx_allowed
    return any(v >= value for v in ctx_allowed)


def table_decide(table: RuleTable, view: View) -> Action:
    """Evaluate a rule table from one module's viewpoint.

    Collects every (rotation, entry) candidate consistent with the module's
    own wall knowledge and returns the unique agreed action for this module.
    Raises :class:`UnhandledState` when no candidate exists or candidates
    disagree.
    """
    if view.sees_target_with_module():
        return None
    shape, me, knowledge = view_knowledge(view)
    if len(shape) != table.module_count:
        raise UnhandledState(
            f"{len(shape)} modules visible, table handles {table.module_count}"
        )
    big = table.radius + 1

    if table.covariant:
        rots = rotations_of(shape)
        canon = min(rots)
        quarter_turns = [q for q in range(4) if rots[q] == canon]
    else:
        canon = shape
        quarter_turns = [0]

    actions: List[Action] = []
    seen_candidate = False
    for q in quarter_turns:
        # Map my position and wall knowledge into the entry frame.
        pts = [rotate_vec(c, q) for c in shape]
        x0 = min(p[0] for p in pts)
        y0 = min(p[1] for p in pts)
        mr = rotate_vec(me, q)
        my_pos = (mr[0] - x0, mr[1] - y0)
        know_q: Dict[str, Tuple[int, bool]] = {}
        for d in DIR_NAMES:
            # Frame direction d corresponds to local direction rotated by -q.
            lv = rotate_vec(DIR_VECS[d], -q)
            local_dir = next(n for n, v in DIR_VECS.items() if v == lv)
            know_q[d] = knowledge[local_dir]
        for entry in table.entries_for(canon):
            ok = True
            for d, allowed in entry.conds.items():
                if not _consistent(allowed, know_q[d], big):
                    ok = False
                    break
            if not ok:
                continue
            seen_candidate = True
            mine: Action = None
            for mv in entry.joint:
                if mv.mover == my_pos:
                    local = frame_move_to_local(mv, my_pos)
                    # Map the move back into my local frame (undo q).
                    if isinstance(local, LocalRotation):
                        mine = LocalRotation(rotate_vec(local.pivot_offset, -q), local.sense)
                    else:
                        mine = LocalSlide(
                            rotate_vec(local.direction, -q), local.distance, local.support_side
                        )
                    break
            actions.append(mine)

    if not seen_candidate:
        raise UnhandledState(f"no rule for shape {canon} (knowledge {knowledge})")
    first = actions[0]
    for a in actions[1:]:
        if a != first:
            raise UnhandledState(
                f"inconsistent candidate actions for shape {canon}: {actions}"
            )
    return first
