"""Lattice model: field geometry, configurations, moves, and the synchronous
step validator.

Cells are plain ``(col, row)`` integer tuples.  A configuration is a frozenset
of cells.  The validator in :func:`apply_synchronous_step` is the single
authority on step legality; everything else in the package funnels moves
through it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Iterator, Mapping, Optional, Tuple

Cell = Tuple[int, int]

CLOCKWISE = "cw"
COUNTERCLOCKWISE = "ccw"

#: Unit vectors, indexed by name.
DIRECTIONS: dict[str, Cell] = {
    "east": (1, 0),
    "north": (0, 1),
    "west": (-1, 0),
    "south": (0, -1),
}


class InvalidArgument(ValueError):
    """Raised when an operation is called outside its precondition."""


class StepRejected(ValueError):
    """A synchronous step violated one of the three execution conditions.

    ``condition`` names the violated rule so harnesses can report it.
    """

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        super().__init__(f"{condition}: {detail}" if detail else condition)


def rot_cw(v: Cell) -> Cell:
    return (v[1], -v[0])


def rot_ccw(v: Cell) -> Cell:
    return (-v[1], v[0])


def rotate_vec(v: Cell, quarter_turns: int) -> Cell:
    """Rotate ``v`` counterclockwise by ``quarter_turns`` quarter turns."""
    x, y = v
    for _ in range(quarter_turns % 4):
        x, y = -y, x
    return (x, y)


@dataclass(frozen=True)
class Field:
    """Finite w x h interior surrounded by walls.

    Interior cells are ``{(i, j): 0 <= i < w, 0 <= j < h}``.  The wall ring is
    column -1, column w, row -1, and row h; views additionally treat every
    cell outside the interior as wall.
    """

    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise InvalidArgument("field dimensions must be positive")

    def is_interior(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def is_wall(self, cell: Cell) -> bool:
        """True for any non-interior cell (walls as seen by modules)."""
        return not self.is_interior(cell)

    def interior_cells(self) -> Iterator[Cell]:
        for j in range(self.height):
            for i in range(self.width):
                yield (i, j)


@dataclass(frozen=True)
class Rotation:
    """pi/2 rotation of ``mover`` around a side-adjacent ``pivot``."""

    mover: Cell
    pivot: Cell
    sense: str  # CLOCKWISE or COUNTERCLOCKWISE

    def __post_init__(self) -> None:
        if not side_adjacent(self.mover, self.pivot):
            raise InvalidArgument("rotation pivot must be side-adjacent to mover")
        if self.sense not in (CLOCKWISE, COUNTERCLOCKWISE):
            raise InvalidArgument(f"bad rotation sense {self.sense!r}")

    @property
    def destination(self) -> Cell:
        u = (self.mover[0] - self.pivot[0], self.mover[1] - self.pivot[1])
        r = rot_cw(u) if self.sense == CLOCKWISE else rot_ccw(u)
        return (self.pivot[0] + r[0], self.pivot[1] + r[1])

    @property
    def corner(self) -> Cell:
        """The diagonal cell swept between origin and destination."""
        u = (self.mover[0] - self.pivot[0], self.mover[1] - self.pivot[1])
        r = rot_cw(u) if self.sense == CLOCKWISE else rot_ccw(u)
        return (self.pivot[0] + u[0] + r[0], self.pivot[1] + u[1] + r[1])

    @property
    def trajectory(self) -> Tuple[Cell, ...]:
        return (self.corner, self.destination)

    def translated(self, dx: int, dy: int) -> "Rotation":
        return Rotation(
            (self.mover[0] + dx, self.mover[1] + dy),
            (self.pivot[0] + dx, self.pivot[1] + dy),
            self.sense,
        )


@dataclass(frozen=True)
class Sliding:
    """Straight k-cell slide of ``mover`` supported by k+1 backbone modules.

    ``support_side`` is +1 for the counterclockwise side of ``direction``
    (left of track) and -1 for the clockwise side (right of track).
    """

    mover: Cell
    direction: Cell  # unit axis vector
    distance: int
    support_side: int  # +1 left of track, -1 right of track

    def __post_init__(self) -> None:
        if self.direction not in DIRECTIONS.values():
            raise InvalidArgument(f"bad slide direction {self.direction!r}")
        if self.distance < 1:
            raise InvalidArgument("slide distance must be >= 1")
        if self.support_side not in (1, -1):
            raise InvalidArgument("support_side must be +1 or -1")

    @property
    def destination(self) -> Cell:
        return (
            self.mover[0] + self.direction[0] * self.distance,
            self.mover[1] + self.direction[1] * self.distance,
        )

    @property
    def trajectory(self) -> Tuple[Cell, ...]:
        return tuple(
            (self.mover[0] + self.direction[0] * i, self.mover[1] + self.direction[1] * i)
            for i in range(1, self.distance + 1)
        )

    @property
    def supports(self) -> Tuple[Cell, ...]:
        """The k+1 cells that must hold backbone modules along the track."""
        perp = rot_ccw(self.direction) if self.support_side == 1 else rot_cw(self.direction)
        return tuple(
            (
                self.mover[0] + self.direction[0] * i + perp[0],
                self.mover[1] + self.direction[1] * i + perp[1],
            )
            for i in range(0, self.distance + 1)
        )

    def translated(self, dx: int, dy: int) -> "Sliding":
        return Sliding(
            (self.mover[0] + dx, self.mover[1] + dy),
            self.direction,
            self.distance,
            self.support_side,
        )


Move = Rotation | Sliding

Configuration = FrozenSet[Cell]
JointMove = Mapping[Cell, Move]


def side_adjacent(a: Cell, b: Cell) -> bool:
    return abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


def neighbors4(cell: Cell) -> Tuple[Cell, Cell, Cell, Cell]:
    x, y = cell
    return ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1))


def is_connected(cells: Iterable[Cell]) -> bool:
    """True iff the side-adjacency graph over ``cells`` has one component."""
    cellset = set(cells)
    if not cellset:
        raise InvalidArgument("empty configuration has no connectivity")
    start = next(iter(cellset))
    seen = {start}
    stack = [start]
    while stack:
        x, y = stack.pop()
        for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if nb in cellset and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(cellset)


def _move_ok_against(move: Move, occupied: frozenset, f: Field) -> bool:
    """Check one move with ``occupied`` as the stationary module set.

    ``occupied`` must not contain the mover.  Trajectory cells (corner and
    destination for rotations, every swept cell for slides) must be empty
    interior cells; pivots and supports must be occupied.
    """
    if isinstance(move, Rotation):
        if move.pivot not in occupied:
            return False
        for cell in move.trajectory:
            if not f.is_interior(cell) or cell in occupied:
                return False
        return True
    for cell in move.supports:
        if cell not in occupied:
            return False
    for cell in move.trajectory:
        if not f.is_interior(cell) or cell in occupied:
            return False
    return True


def legal_moves(c: Configuration, f: Field, m: Cell, kmax: int = 3) -> set:
    """Every individually legal move for ``m``, all other modules stationary."""
    if m not in c:
        raise InvalidArgument(f"mover {m} not in configuration")
    if kmax < 1:
        raise InvalidArgument("kmax must be >= 1")
    others = frozenset(c) - {m}
    out = set()
    for pivot in neighbors4(m):
        if pivot in others:
            for sense in (CLOCKWISE, COUNTERCLOCKWISE):
                rot = Rotation(m, pivot, sense)
                if _move_ok_against(rot, others, f):
                    out.add(rot)
    for direction in DIRECTIONS.values():
        for dist in range(1, kmax + 1):
            for side in (1, -1):
                sl = Sliding(m, direction, dist, side)
                if _move_ok_against(sl, others, f):
                    out.add(sl)
    return out


def apply_synchronous_step(
    c: Configuration,
    joint: JointMove,
    f: Field,
    collect_visited: Optional[set] = None,
) -> Configuration:
    """Validate and apply one synchronous step, returning C_{t+1}.

    Enforces, in order: movers belong to ``c`` and their moves are legal
    against the backbone; the backbone is nonempty and connected; the
    trajectories are pairwise disjoint and disjoint from the backbone; and
    the successor configuration is connected.  Raises :class:`StepRejected`
    naming the violated condition otherwise.

    When ``collect_visited`` is given, the successor's cells and every
    trajectory cell are added to it.
    """
    cset = frozenset(c)
    if not cset:
        raise InvalidArgument("empty configuration")
    movers = frozenset(joint.keys())
    if not movers <= cset:
        raise InvalidArgument(f"movers {movers - cset} not in configuration")
    for src, move in joint.items():
        mover_cell = move.mover
        if mover_cell != src:
            raise InvalidArgument("joint move keyed by a cell other than its mover")

    backbone = cset - movers
    if movers:
        if not backbone:
            raise StepRejected("single-backbone", "backbone is empty")
        if not is_connected(backbone):
            raise StepRejected("single-backbone", "backbone is disconnected")

    # Individual legality against the backbone only: supports and pivots must
    # be non-movers, trajectories must avoid walls and backbone cells.
    for src, move in joint.items():
        if not _move_ok_against(move, backbone, f):
            raise StepRejected("illegal-move", f"move of {src} is not legal against backbone")

    # No interference: trajectories pairwise disjoint (also keeps
    # destinations distinct) and disjoint from the backbone.
    claimed: set = set()
    for src, move in joint.items():
        for cell in move.trajectory:
            if cell in claimed:
                raise StepRejected("no-interference", f"trajectory cell {cell} shared")
            claimed.add(cell)
    # Disjointness from backbone already covered by _move_ok_against.

    destinations = [move.destination for move in joint.values()]
    new_cells = (cset - movers) | set(destinations)
    if len(new_cells) != len(cset):
        raise StepRejected("no-interference", "destination collision")
    if not is_connected(new_cells):
        raise StepRejected("connectivity", "successor configuration is disconnected")
    result = frozenset(new_cells)
    if collect_visited is not None:
        collect_visited.update(result)
        collect_visited.update(claimed)
    return result


def bounding_box(cells: Iterable[Cell]) -> Tuple[int, int, int, int]:
    """(min_col, min_row, max_col, max_row) of a nonempty cell set."""
    xs = [c[0] for c in cells]
    ys = [c[1] for c in cells]
    return (min(xs), min(ys), max(xs), max(ys))


def normalize(cells: Iterable[Cell]) -> Tuple[Cell, ...]:
    """Translate cells so the bounding box corner sits at the origin."""
    cl = list(cells)
    x0 = min(c[0] for c in cl)
    y0 = min(c[1] for c in cl)
    return tuple(sorted((c[0] - x0, c[1] - y0) for c in cl))
