"""Egocentric k-neighborhood views under global or local compasses.

A view is a (2k+1) x (2k+1) window in the observer's local frame.  A local
compass is a rotation only; modules share a handedness, so no reflections
ever occur.  ``compass.rotation`` counts quarter turns counterclockwise that
map local axes onto global axes: local vector v corresponds to global vector
``rotate_vec(v, rotation)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .grid import Cell, Configuration, Field, InvalidArgument, rotate_vec

EMPTY = "."
MODULE = "#"
WALL = "W"
TARGET_EMPTY = "T"
TARGET_WITH_MODULE = "@"


@dataclass(frozen=True)
class LocalCompass:
    """Rotation of a module's frame: 0..3 quarter turns counterclockwise."""

    rotation: int = 0

    def __post_init__(self) -> None:
        if self.rotation not in (0, 1, 2, 3):
            raise InvalidArgument("compass rotation must be 0..3 quarter turns")

    def to_global(self, v: Cell) -> Cell:
        return rotate_vec(v, self.rotation)

    def to_local(self, v: Cell) -> Cell:
        return rotate_vec(v, -self.rotation)


GLOBAL_COMPASS = LocalCompass(0)


@dataclass(frozen=True)
class View:
    """Observation window; ``cells[dy + k][dx + k]`` is the content at local
    offset (dx, dy).  The center is always the observer."""

    radius: int
    cells: Tuple[Tuple[str, ...], ...]

    def at(self, dx: int, dy: int) -> str:
        k = self.radius
        if abs(dx) > k or abs(dy) > k:
            raise InvalidArgument(f"offset ({dx},{dy}) outside view radius {k}")
        return self.cells[dy + k][dx + k]

    def module_offsets(self) -> List[Cell]:
        """Local offsets of all visible modules, observer included."""
        k = self.radius
        out = []
        for j, row in enumerate(self.cells):
            for i, content in enumerate(row):
                if content in (MODULE, TARGET_WITH_MODULE):
                    out.append((i - k, j - k))
        return out

    def sees_target_with_module(self) -> bool:
        return any(TARGET_WITH_MODULE in row for row in self.cells)

    def wall_distances(self) -> Dict[str, Optional[int]]:
        """Nearest wall distance along each local axis direction, or None.

        Walls are full lines, so the nearest wall in direction +x is the
        smallest d with the whole column at dx=+d marked wall.
        """
        k = self.radius
        out: Dict[str, Optional[int]] = {}
        for name, (ux, uy) in (("east", (1, 0)), ("west", (-1, 0)),
                               ("north", (0, 1)), ("south", (0, -1))):
            found = None
            for d in range(1, k + 1):
                if self.at(ux * d, uy * d) == WALL:
                    # Confirm it is a wall line, not a stray marker.
                    found = d
                    break
            out[name] = found
        return out

    def rotated(self, quarter_turns: int) -> "View":
        """The same physical scene observed with a frame rotated ccw."""
        k = self.radius
        size = 2 * k + 1
        grid = [[EMPTY] * size for _ in range(size)]
        for j in range(size):
            for i in range(size):
                dx, dy = i - k, j - k
                rx, ry = rotate_vec((dx, dy), quarter_turns)
                grid[ry + k][rx + k] = self.cells[j][i]
        return View(k, tuple(tuple(row) for row in grid))


def observe(
    c: Configuration,
    f: Field,
    m: Cell,
    k: int,
    compass: LocalCompass = GLOBAL_COMPASS,
    target: Optional[Cell] = None,
) -> View:
    """The (2k+1)^2 window centered on ``m`` in its local frame.

    Every non-interior cell is marked wall.  The target cell carries a marker
    whether or not a module currently occupies it.
    """
    if m not in c:
        raise InvalidArgument(f"observer {m} not in configuration")
    size = 2 * k + 1
    rows: List[Tuple[str, ...]] = []
    for dy in range(-k, k + 1):
        row: List[str] = []
        for dx in range(-k, k + 1):
            gx, gy = compass.to_global((dx, dy))
            cell = (m[0] + gx, m[1] + gy)
            if not f.is_interior(cell):
                row.append(WALL)
            elif cell in c:
                row.append(TARGET_WITH_MODULE if cell == target else MODULE)
            else:
                row.append(TARGET_EMPTY if cell == target else EMPTY)
        rows.append(tuple(row))
    return View(k, tuple(rows))
