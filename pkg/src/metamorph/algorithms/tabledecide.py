"""Shared decide machinery for the compass-free table algorithms.

A module's view yields the (canonicalized) shape, its own position, and
partial wall knowledge: exact distances for walls it can see, lower bounds
for the rest.  The decide map enumerates every wall context consistent with
that knowledge, resolves each one through the rule table (falling back to a
breadth-first recovery route toward the nearest pass state), and returns the
module's action only if all consistent worlds agree.  Disagreement means a
rule depends on a wall the module cannot see -- a table bug surfaced as
:class:`UnhandledState` rather than silently desynchronized modules.
"""

from __future__ import annotations

from itertools import product
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from ..grid import Cell, bounding_box, normalize, rotate_vec
from ..shapes import canonical_rotation, rotation_order, rotations_of
from ..views import View
from .base import (
    Action,
    DIR_NAMES,
    DIR_VECS,
    FrameMove,
    FrameRotation,
    FrameSlide,
    LocalRotation,
    LocalSlide,
    RuleEntry,
    RuleTable,
    UnhandledState,
    absolute_to_frame_move,
    frame_move_to_local,
    view_knowledge,
)
from .router import FAR, VirtualField, bfs_route, context_of

COARSE = 3  # recovery context granularity: 1, 2, or >= 3


def canonical_world(
    cfg: FrozenSet[Cell], f, big: int
) -> Tuple[Tuple[Cell, ...], Dict[str, int]]:
    """(canonical shape, wall context in the canonical frame) of a placed
    configuration inside a (virtual or real) field."""
    from .router import context_of

    shape = normalize(cfg)
    rots = rotations_of(shape)
    canon = min(rots)
    q = rots.index(canon)
    real = context_of(cfg, f, big)
    ctx: Dict[str, int] = {}
    for d in DIR_NAMES:
        lv = rotate_vec(DIR_VECS[d], -q)
        name = next(n for n, v in DIR_VECS.items() if v == lv)
        ctx[d] = real[name]
    return canon, ctx


def context_feasible(
    ctx: Dict[str, int], shape_w: int, shape_h: int, min_w: int, min_h: int, big: int
) -> bool:
    """True iff a wall context can occur in a field at least min_w x min_h.

    Clipped east/west distances satisfy east + west = field_width + 2 - shape
    width when both walls are visible; values at the clip stand for at least
    that much.
    """
    e, w = ctx["east"], ctx["west"]
    if e < big and w < big and e + w < min_w + 2 - shape_w:
        return False
    n, s = ctx["north"], ctx["south"]
    if n < big and s < big and n + s < min_h + 2 - shape_h:
        return False
    return True


def break_candidates(cells, mover, blocked):
    """Single-module moves in the fixed local priority: 1-slides east,
    north, west, south, then rotations by pivot direction and sense.

    ``cells`` holds the other modules (absolute or local coordinates);
    ``blocked`` reports cells that rule out trajectories (walls).  Used both
    when validating a symmetry-break orbit and when a module actually
    chooses its break move, so the two can never disagree.
    """
    from ..grid import CLOCKWISE, COUNTERCLOCKWISE, Rotation, Sliding

    others = frozenset(cells) - {mover}
    out = []
    for u in ((1, 0), (0, 1), (-1, 0), (0, -1)):
        dest = (mover[0] + u[0], mover[1] + u[1])
        if dest in others or blocked(dest):
            continue
        for side in (1, -1):
            mv = Sliding(mover, u, 1, side)
            if all(c in others for c in mv.supports):
                out.append(mv)
                break
    for u in ((1, 0), (0, 1), (-1, 0), (0, -1)):
        pivot = (mover[0] + u[0], mover[1] + u[1])
        if pivot not in others:
            continue
        for sense in (CLOCKWISE, COUNTERCLOCKWISE):
            mv = Rotation(mover, pivot, sense)
            if mv.destination in others or blocked(mv.destination):
                continue
            if mv.corner in others or blocked(mv.corner):
                continue
            out.append(mv)
    return out


def break_choice(cells, mover, blocked) -> Optional[object]:
    cands = break_candidates(cells, mover, blocked)
    return cands[0] if cands else None


def _break_move_from_view(view: View) -> Action:
    """The break move for the observing module, straight from its view."""
    from ..grid import Rotation, Sliding
    from ..views import MODULE, TARGET_WITH_MODULE, WALL

    k = view.radius
    cells = {(dx, dy)
             for dy in range(-k, k + 1) for dx in range(-k, k + 1)
             if view.at(dx, dy) in (MODULE, TARGET_WITH_MODULE)}
    cells.add((0, 0))

    def blocked(cell) -> bool:
        if abs(cell[0]) > k or abs(cell[1]) > k:
            return True
        return view.at(cell[0], cell[1]) == WALL

    mv = break_choice(cells, (0, 0), blocked)
    if mv is None:
        return None
    if isinstance(mv, Rotation):
        return LocalRotation(mv.pivot, mv.sense)
    return LocalSlide(mv.direction, mv.distance, mv.support_side)


class CovariantTableAlgorithm:class CovariantTableAlgorithm:
    """Rotation-covariant rule-table algorithm with recovery routing."""

    def __init__(
        self,
        table: RuleTable,
        pass_classes: FrozenSet[Tuple[Cell, ...]],
        radius: int,
        module_count: int,
        kmax_recovery: int = 1,
        min_field: Tuple[int, int] = (9, 9),
    ):
        self.table = table
        self.pass_classes = pass_classes
        self.radius = radius
        self.module_count = module_count
        self.kmax_recovery = kmax_recovery
        self.min_field = min_field
        self.breaker_orbits: Dict[Tuple[Cell, ...], FrozenSet[Cell]] = {}
        self._resolve_cache: Dict[tuple, RuleEntry] = {}
        self._recovery_cache: Dict[tuple, Optional[Tuple[FrameMove, ...]]] = {}

    # -- world resolution ---------------------------------------------------

    def entry_for_context(
        self, shape: Tuple[Cell, ...], ctx: Dict[str, int]
    ) -> RuleEntry:
        """The rule entry governing an exact world (shape, context)."""
        key = (shape, tuple(sorted(ctx.items())))
        hit = self._resolve_cache.get(key)
        if hit is not None:
            return hit
        entry = self.table.entry_for(shape, ctx)
        if entry is None:
            joint = self._recovery(shape, ctx)
            if joint is None:
                raise UnhandledState(f"no rule or recovery for {shape} at {ctx}")
            entry = RuleEntry(shape, {}, joint, tag="recovery")
        self._resolve_cache[key] = entry
        return entry

    def joint_for_context(
        self, shape: Tuple[Cell, ...], ctx: Dict[str, int]
    ) -> Tuple[FrameMove, ...]:
        return self.entry_for_context(shape, ctx).joint

    def _recovery(
        self, shape: Tuple[Cell, ...], ctx: Dict[str, int]
    ) -> Optional[Tuple[FrameMove, ...]]:
        coarse = {d: min(v, COARSE) for d, v in ctx.items()}
        key = (shape, tuple(sorted(coarse.items())))
        if key in self._recovery_cache:
            return self._recovery_cache[key]
        start = frozenset(shape)
        f = VirtualField(
            west=-(FAR if coarse["west"] >= COARSE else coarse["west"]),
            east=max(c[0] for c in shape) + (FAR if coarse["east"] >= COARSE else coarse["east"]),
            south=-(FAR if coarse["south"] >= COARSE else coarse["south"]),
            north=max(c[1] for c in shape) + (FAR if coarse["north"] >= COARSE else coarse["north"]),
        )

        def is_goal(cfg: FrozenSet[Cell]) -> bool:
            # A goal is any world an existing rule actually serves: a pass
            # phase able to run here, or a turn-route step.  A pass state
            # whose move is walled off does not count.
            canon2, ctx2 = canonical_world(cfg, f, self.radius + 1)
            return self.table.joint_for(canon2, ctx2) is not None

        def state_ok(cfg: FrozenSet[Cell]) -> bool:
            return canonical_rotation(cfg) not in self.pass_classes and rotation_order(cfg) == 1

        route = bfs_route(start, is_goal, f, state_ok, max_depth=10,
                          kmax=self.kmax_recovery)
        result: Optional[Tuple[FrameMove, ...]] = None
        if route:
            cfg, move = route[0]
            x0, y0, _, _ = bounding_box(cfg)
            result = (absolute_to_frame_move(move, (x0, y0)),)
        self._recovery_cache[key] = result
        return result

    # -- view-side decide ---------------------------------------------------

    def decide(self, view: View) -> Action:
        if view.sees_target_with_module():
            return None
        shape, me, knowledge = view_knowledge(view)
        if len(shape) != self.module_count:
            raise UnhandledState(
                f"{len(shape)} modules visible; algorithm drives {self.module_count}"
            )
        big = self.radius + 1

        rots = rotations_of(shape)
        canon = min(rots)
        quarter_turns = [q for q in range(4) if rots[q] == canon]

        # Completion values per local direction.
        completion_space: List[List[int]] = []
        for d in DIR_NAMES:
            value, exact = knowledge[d]
            completion_space.append([value] if exact else list(range(value, big + 1)))

        # Per-rotation frame data.
        frames = []
        for q in quarter_turns:
            pts = [rotate_vec(c, q) for c in shape]
            x0 = min(p[0] for p in pts)
            y0 = min(p[1] for p in pts)
            mr = rotate_vec(me, q)
            my_pos = (mr[0] - x0, mr[1] - y0)
            frame_to_local: Dict[str, int] = {}
            for d in DIR_NAMES:
                lv = rotate_vec(DIR_VECS[d], -q)
                local_name = next(n for n, v in DIR_VECS.items() if v == lv)
                frame_to_local[d] = DIR_NAMES.index(local_name)
            frames.append((q, my_pos, frame_to_local))
        xs = [c[0] for c in canon]
        ys = [c[1] for c in canon]
        shape_w, shape_h = max(xs) + 1, max(ys) + 1

        actions: List[Action] = []
        for combo in product(*completion_space):
            # A symmetric shape admits several canonicalizing rotations; they
            # describe the same physical world, so resolve under the reading
            # with the least context.  Modules at symmetric positions have
            # identical views and hence the same reading, which realizes a
            # table move as the forced symmetric pair.
            readings = []
            for q, my_pos, frame_to_local in frames:
                ctx = {d: combo[frame_to_local[d]] for d in DIR_NAMES}
                readings.append((tuple(sorted(ctx.items())), q, my_pos, ctx))
            readings.sort(key=lambda r: (r[0], r[1]))
            _, q, my_pos, ctx = readings[0]
            if not context_feasible(ctx, shape_w, shape_h,
                                    self.min_field[0], self.min_field[1], big):
                continue
            entry = self.entry_for_context(canon, ctx)
            mine: Action = None
            if entry.special == "c2-break-pair":
                if my_pos in self.breaker_orbits.get(canon, ()):
                    mine = _break_move_from_view(view)
            else:
                for mv in entry.joint:
                    if mv.mover == my_pos:
                        local = frame_move_to_local(mv, my_pos)
                        if isinstance(local, LocalRotation):
                            mine = LocalRotation(
                                rotate_vec(local.pivot_offset, -q), local.sense
                            )
                        else:
                            mine = LocalSlide(
                                rotate_vec(local.direction, -q),
                                local.distance,
                                local.support_side,
                            )
                        break
            actions.append(mine)

        if not actions:
            raise UnhandledState(f"no feasible world for {canon} (knowledge {knowledge})")
        first = actions[0]
        for a in actions[1:]:
            if a != first:
                raise UnhandledState(
                    f"blind-inconsistent actions for {canon}: {set(map(repr, actions))}"
                )
        return first
