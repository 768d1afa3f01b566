"""Shape taxonomy: polyomino enumeration, canonical state ids, and rotational
symmetry groups.

State ids follow a stable house ordering: for each module count the canonical
shapes are sorted with rotationally symmetric shapes first (C4 before C2,
then lexicographic), then the asymmetric ones lexicographically.  For five
modules this puts the four deadlock-prone shapes at indices 1..4, so the
forbidden set is exactly ``S5_1 .. S5_4``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .grid import Cell, Field, InvalidArgument, is_connected, normalize

Shape = Tuple[Cell, ...]  # normalized, sorted cell tuple


def rotations_of(cells: Iterable[Cell]) -> List[Shape]:
    """The four rotation images of a cell set, each normalized."""
    pts = list(cells)
    out = []
    for _ in range(4):
        out.append(normalize(pts))
        pts = [(-y, x) for (x, y) in pts]
    return out


def canonical_rotation(cells: Iterable[Cell]) -> Shape:
    """Lexicographically minimal normalized rotation image."""
    return min(rotations_of(cells))


@lru_cache(maxsize=16)
def fixed_polyominoes(n: int) -> Tuple[Shape, ...]:
    """All distinct n-cell polyominoes modulo translation, sorted."""
    if n < 1:
        raise InvalidArgument("polyomino size must be >= 1")
    if n == 1:
        return (((0, 0),),)
    smaller = fixed_polyominoes(n - 1)
    seen = set()
    for shape in smaller:
        cellset = set(shape)
        for (x, y) in shape:
            for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if nb not in cellset:
                    seen.add(normalize(cellset | {nb}))
    return tuple(sorted(seen))


@lru_cache(maxsize=16)
def one_sided_polyominoes(n: int) -> Tuple[Shape, ...]:
    """Polyominoes modulo translation and rotation (not reflection), in the
    house order: symmetric shapes first (C4 before C2), then asymmetric."""
    classes = sorted({canonical_rotation(s) for s in fixed_polyominoes(n)})

    def sort_key(shape: Shape):
        order = rotation_order(shape)
        return (-order, shape)

    return tuple(sorted(classes, key=sort_key))


def rotation_order(cells: Iterable[Cell]) -> int:
    """4 if the shape is C4 symmetric, 2 if C2, else 1."""
    base = normalize(cells)
    pts = list(base)
    images = []
    for _ in range(3):
        pts = [(-y, x) for (x, y) in pts]
        images.append(normalize(pts))
    if all(img == base for img in images):
        return 4
    if images[1] == base:  # 180 degrees
        return 2
    return 1


@dataclass(frozen=True)
class SymmetryGroup:
    group: str  # "C1" | "C2" | "C4"
    center: Tuple[float, float]


def rotational_symmetry(c: Iterable[Cell]) -> SymmetryGroup:
    """Maximal cyclic rotation group fixing the cell set, with its center.

    Any rotation fixing the set maps the bounding box to itself, so the only
    candidate center is the bounding-box center.  C1 shapes report their
    centroid, which is informational only.
    """
    cells = frozenset(c)
    if not cells:
        raise InvalidArgument("empty configuration")
    xs = [p[0] for p in cells]
    ys = [p[1] for p in cells]
    cx = (min(xs) + max(xs)) / 2.0
    cy = (min(ys) + max(ys)) / 2.0

    fcells = {(float(a), float(b)) for (a, b) in cells}
    is_c2 = all((2 * cx - x, 2 * cy - y) in fcells for (x, y) in fcells)
    if is_c2:
        # 90-degree rotation about (cx, cy): (x,y) -> (cx + (y-cy), cy - (x-cx))
        is_c4 = all((cx + (y - cy), cy - (x - cx)) in fcells for (x, y) in fcells)
        if is_c4:
            return SymmetryGroup("C4", (cx, cy))
        return SymmetryGroup("C2", (cx, cy))
    n = len(cells)
    centroid = (sum(xs) / n, sum(ys) / n)
    return SymmetryGroup("C1", centroid)


@dataclass(frozen=True)
class StateId:
    family: str  # "S3" | "S4" | "S5" | "other"
    index: int
    shape: Shape

    def __str__(self) -> str:
        return f"{self.family}_{self.index}"


_FAMILIES = {3: "S3", 4: "S4", 5: "S5"}


@lru_cache(maxsize=16)
def _fixed_index(n: int) -> Dict[Shape, int]:
    return {s: i + 1 for i, s in enumerate(fixed_polyominoes(n))}


@lru_cache(maxsize=16)
def _onesided_index(n: int) -> Dict[Shape, int]:
    return {s: i + 1 for i, s in enumerate(one_sided_polyominoes(n))}


def canonical_state(c: Iterable[Cell], modulo_rotation: bool = True) -> StateId:
    """Translation-normalized shape id, optionally minimized over rotations.

    Never minimizes over reflections: modules share a handedness, so mirror
    shapes are distinct states.
    """
    cells = frozenset(c)
    if not cells:
        raise InvalidArgument("empty configuration")
    if not is_connected(cells):
        raise InvalidArgument("disconnected configuration has no state")
    n = len(cells)
    family = _FAMILIES.get(n, "other")
    if modulo_rotation:
        shape = canonical_rotation(cells)
        if family == "other":
            return StateId(family, 0, shape)
        return StateId(family, _onesided_index(n)[shape], shape)
    shape = normalize(cells)
    if family == "other":
        return StateId(family, 0, shape)
    return StateId(family, _fixed_index(n)[shape], shape)


def is_forbidden5(c: Iterable[Cell]) -> bool:
    """True iff a 5-module configuration is one of the four deadlock states.

    The deadlock-prone pentominoes are exactly those with a nontrivial
    rotational symmetry: the plus (C4), the two S/Z shapes and the line (C2).
    """
    cells = frozenset(c)
    if len(cells) != 5:
        raise InvalidArgument("is_forbidden5 requires exactly 5 modules")
    if not is_connected(cells):
        raise InvalidArgument("disconnected configuration")
    return rotation_order(cells) > 1


def shape_catalog(n: int) -> List[Tuple[str, Shape, str]]:
    """(state id, shape, symmetry) rows for the one-sided catalog of size n."""
    family = _FAMILIES.get(n, "other")
    rows = []
    for i, shape in enumerate(one_sided_polyominoes(n), start=1):
        name = f"{family}_{i}" if family != "other" else f"omino{n}_{i}"
        rows.append((name, shape, rotational_symmetry(shape).group))
    return rows


#: Named shapes used by the command line and tests.
NAMED_SHAPES: Dict[str, Shape] = {
    "domino": ((0, 0), (1, 0)),
    "line3": ((0, 0), (1, 0), (2, 0)),
    "vline3": ((0, 0), (0, 1), (0, 2)),
    "L": ((0, 0), (0, 1), (1, 0)),
    "square4": ((0, 0), (0, 1), (1, 0), (1, 1)),
    "line4": ((0, 0), (1, 0), (2, 0), (3, 0)),
    "line5": ((0, 0), (1, 0), (2, 0), (3, 0), (4, 0)),
    "plus5": ((0, 1), (1, 0), (1, 1), (1, 2), (2, 1)),
    "P5": ((0, 0), (0, 1), (1, 0), (1, 1), (2, 0)),
    "L5": ((0, 0), (0, 1), (1, 0), (2, 0), (3, 0)),
    "rect6": ((0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)),
    "H7": ((0, 0), (0, 1), (0, 2), (1, 1), (2, 0), (2, 1), (2, 2)),
    "line7": tuple((i, 0) for i in range(7)),
}


def lookup_shape(name: str) -> Shape:
    """Resolve a shape by catalog name (``S5_7``), named alias, or cell list."""
    if name in NAMED_SHAPES:
        return NAMED_SHAPES[name]
    for n, family in _FAMILIES.items():
        prefix = family + "_"
        if name.startswith(prefix):
            idx = int(name[len(prefix):])
            shapes = one_sided_polyominoes(n)
            if not 1 <= idx <= len(shapes):
                raise InvalidArgument(f"{name}: index out of range")
            return shapes[idx - 1]
    raise InvalidArgument(f"unknown shape {name!r}")


def place(shape: Shape, at: Cell) -> FrozenSet[Cell]:
    return frozenset((x + at[0], y + at[1]) for (x, y) in shape)


def placements_in(shape: Shape, f: Field) -> Iterable[FrozenSet[Cell]]:
    """All translates of ``shape`` inside the field interior."""
    w = max(x for x, _ in shape) + 1
    h = max(y for _, y in shape) + 1
    for ox in range(f.width - w + 1):
        for oy in range(f.height - h + 1):
            yield place(shape, (ox, oy))
