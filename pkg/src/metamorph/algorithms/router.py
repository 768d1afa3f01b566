"""Breadth-first route search used to derive turn and recovery moves.

Routes are searched in a virtual field whose walls sit at the distances
given by a wall context; directions marked "far" place the wall well beyond
the reach of any short route.  The search is deterministic: moves are
expanded in a canonical order, so derived tables are stable across runs.
"""

from __future__ import annotations

from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from ..grid import (
    CLOCKWISE,
    COUNTERCLOCKWISE,
    Cell,
    Move,
    Rotation,
    Sliding,
    bounding_box,
    is_connected,
    neighbors4,
    normalize,
)

FAR = 50  # virtual wall distance for "far" directions

Config = FrozenSet[Cell]


class VirtualField:
    """Rectangular interior defined by wall lines, possibly far away."""

    def __init__(self, west: int, east: int, south: int, north: int):
        # wall line coordinates: cells with col <= west or >= east are wall.
        self.west = west
        self.east = east
        self.south = south
        self.north = north

    def is_interior(self, cell: Cell) -> bool:
        return self.west < cell[0] < self.east and self.south < cell[1] < self.north

    def is_wall(self, cell: Cell) -> bool:
        return not self.is_interior(cell)


def field_from_context(cells: Iterable[Cell], ctx: Dict[str, int], big: int) -> VirtualField:
    """Place wall lines around ``cells`` at the context's clipped distances.

    A direction at the clipped maximum is treated as far away.
    """
    x0, y0, x1, y1 = bounding_box(list(cells))
    west = x0 - (FAR if ctx["west"] >= big else ctx["west"])
    east = x1 + (FAR if ctx["east"] >= big else ctx["east"])
    south = y0 - (FAR if ctx["south"] >= big else ctx["south"])
    north = y1 + (FAR if ctx["north"] >= big else ctx["north"])
    return VirtualField(west, east, south, north)


def context_of(cells: Iterable[Cell], f: VirtualField, big: int) -> Dict[str, int]:
    x0, y0, x1, y1 = bounding_box(list(cells))
    return {
        "west": min(x0 - f.west, big),
        "east": min(f.east - x1, big),
        "south": min(y0 - f.south, big),
        "north": min(f.north - y1, big),
    }


def single_moves(config: Config, f: VirtualField, kmax: int = 3) -> List[Tuple[Move, Config]]:
    """All legal single-module moves, in canonical order."""
    out: List[Tuple[Move, Config]] = []
    for m in sorted(config):
        others = config - {m}
        if not is_connected(others):
            continue
        candidates: List[Move] = []
        for pivot in neighbors4(m):
            if pivot in others:
                for sense in (CLOCKWISE, COUNTERCLOCKWISE):
                    candidates.append(Rotation(m, pivot, sense))
        for direction in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            for dist in range(1, kmax + 1):
                for side in (1, -1):
                    candidates.append(Sliding(m, direction, dist, side))
        for mv in candidates:
            ok = True
            if isinstance(mv, Rotation):
                for cell in mv.trajectory:
                    if f.is_wall(cell) or cell in others:
                        ok = False
                        break
            else:
                for cell in mv.supports:
                    if cell not in others:
                        ok = False
                        break
                else:
                    for cell in mv.trajectory:
                        if f.is_wall(cell) or cell in others:
                            ok = False
                            break
            if not ok:
                continue
            new_config = frozenset(others | {mv.destination})
            if is_connected(new_config):
                out.append((mv, new_config))
    return out


def bfs_route(
    start: Config,
    goal: Callable[[Config], bool],
    f: VirtualField,
    state_ok: Callable[[Config], bool],
    max_depth: int = 12,
    waypoints: Sequence[Cell] = (),
    kmax: int = 3,
) -> Optional[List[Tuple[Config, Move]]]:
    """Shortest move sequence from ``start`` to a goal configuration.

    ``state_ok`` filters intermediate configurations (the start and goal are
    exempt).  ``waypoints`` are cells that must be occupied at some point
    along the route (including by start or goal).
    """
    wp = tuple(waypoints)

    def covered(config: Config, mask: int) -> int:
        for i, cell in enumerate(wp):
            if cell in config:
                mask |= 1 << i
        return mask

    full = (1 << len(wp)) - 1
    start_mask = covered(start, 0)
    frontier: List[Tuple[Config, int]] = [(start, start_mask)]
    parents: Dict[Tuple[Config, int], Optional[Tuple[Config, int, Move]]] = {
        (start, start_mask): None
    }
    for _ in range(max_depth):
        next_frontier: List[Tuple[Config, int]] = []
        for config, mask in frontier:
            for mv, nxt in single_moves(config, f, kmax):
                nmask = covered(nxt, mask)
                key = (nxt, nmask)
                if key in parents:
                    continue
                if goal(nxt) and nmask == full:
                    parents[key] = (config, mask, mv)
                    # Reconstruct.
                    path: List[Tuple[Config, Move]] = []
                    cur: Tuple[Config, int] = key
                    while parents[cur] is not None:
                        pconf, pmask, pmv = parents[cur]  # type: ignore[misc]
                        path.append((pconf, pmv))
                        cur = (pconf, pmask)
                    path.reverse()
                    return path
                if not state_ok(nxt):
                    continue
                parents[key] = (config, mask, mv)
                next_frontier.append(key)
        frontier = next_frontier
        if not frontier:
            break
    return None
