"""Three-module search with the global compass (2-neighborhood views).

The system explores via a perpetual cycle built from ten kinds of basic
moves: an eastward pass along a two-row band, a westward pass as a vertical
three-cell column sweep, turns on both walls, corner turns, and a climb up
the east wall back to the top band.  Exactly one module moves per step, and
the deciding wall bits of every branch are visible to every module whose
action depends on them.

Shape legend (normalized):

    HLINE  # # #      VLINE  #      LNE  #     LNW    #   LSW  #*#   LSE  #*#
                             #           #*         #*#          #        #
                             #

The starred cell marks the "poke" module named in the rules.
"""

from __future__ import annotations

from functools import lru_cache

from ..grid import CLOCKWISE as CW
from ..grid import COUNTERCLOCKWISE as CCW
from ..views import View
from .base import (
    Action,
    AlgorithmSpec,
    FrameRotation,
    FrameSlide,
    RuleEntry,
    RuleTable,
    make_conds,
    table_decide,
)

RADIUS = 2

HLINE = ((0, 0), (1, 0), (2, 0))
VLINE = ((0, 0), (0, 1), (0, 2))
LNE = ((0, 0), (0, 1), (1, 0))  # column + east poke at bottom
LNW = ((0, 0), (1, 0), (1, 1))  # column at x=1 + west poke at bottom
LSW = ((0, 1), (1, 0), (1, 1))  # column at x=1 + west poke at top
LSE = ((0, 0), (0, 1), (1, 1))  # column + east poke at top


@lru_cache(maxsize=1)
def build_table() -> RuleTable:
    t = RuleTable(radius=RADIUS, module_count=3, covariant=False)
    c = lambda **kw: make_conds(RADIUS, **kw)

    # HLINE: the east-pass line.  Rear rotates over the line; on the top row
    # the front drops forward instead, driving the westward top-row gait.
    t.add(RuleEntry(HLINE, c(north="free"),
                    (FrameRotation((0, 0), (1, 0), CW),), tag="hline-east"))
    t.add(RuleEntry(HLINE, c(north="adj"),
                    (FrameRotation((2, 0), (1, 0), CW),), tag="hline-top-west"))

    # VLINE: west-pass column (generic), climb seed on the east wall,
    # eastward recovery on the west wall.
    t.add(RuleEntry(VLINE, c(east="free", west="free"),
                    (FrameRotation((0, 2), (0, 1), CCW),), tag="vline-west"))
    t.add(RuleEntry(VLINE, c(east="adj"),
                    (FrameRotation((0, 0), (0, 1), CW),), tag="vline-climb"))
    t.add(RuleEntry(VLINE, c(west="adj"),
                    (FrameRotation((0, 0), (0, 1), CCW),), tag="vline-westwall"))

    # LNE: east-pass step 2 (top slides east); on the east wall it turns
    # into the west pass, or enters the climb at the southeast corner.
    t.add(RuleEntry(LNE, c(east="free"),
                    (FrameSlide((0, 1), (1, 0), 1, -1),), tag="lne-east"))
    t.add(RuleEntry(LNE, c(east="adj", south="free"),
                    (FrameRotation((1, 0), (0, 0), CW),), tag="lne-eastwall-turn"))
    t.add(RuleEntry(LNE, c(east="adj", south="adj"),
                    (FrameSlide((1, 0), (0, 1), 1, 1),), tag="lne-se-climb"))

    # LNW: east-pass step 3 (top rotates forward) at any wall distance >= 2;
    # climb step 2 when pinned to the east wall.
    t.add(RuleEntry(LNW, c(east="free"),
                    (FrameRotation((1, 1), (1, 0), CW),), tag="lnw-east"))
    t.add(RuleEntry(LNW, c(east="adj"),
                    (FrameSlide((0, 0), (0, 1), 1, -1),), tag="lnw-climb"))

    # LSW: west-pass step 2 (bottom slides west); climb step 3 on the east
    # wall, exiting at the northeast corner.
    t.add(RuleEntry(LSW, c(east="adj", north="free"),
                    (FrameRotation((0, 1), (1, 1), CW),), tag="lsw-climb"))
    t.add(RuleEntry(LSW, c(east="free"),
                    (FrameSlide((1, 0), (-1, 0), 1, -1),), tag="lsw-west"))
    t.add(RuleEntry(LSW, c(east="adj", north="adj"),
                    (FrameSlide((1, 0), (-1, 0), 1, -1),), tag="lsw-ne-exit"))

    # LSE: west-pass step 3 (poke rotates up) with wall variants; on the top
    # row it drives the westward top gait instead.
    t.add(RuleEntry(LSE, c(east="adj", south="adj"),
                    (FrameSlide((0, 0), (1, 0), 1, 1),), tag="lse-se-climb"))
    t.add(RuleEntry(LSE, c(north="adj", west="adj"),
                    (FrameSlide((1, 1), (0, -1), 1, -1),), tag="lse-nw-drop"))
    t.add(RuleEntry(LSE, c(north="adj", west="free"),
                    (FrameRotation((0, 0), (0, 1), CW),), tag="lse-top-west"))
    t.add(RuleEntry(LSE, c(west="adj", north="free"),
                    (FrameSlide((1, 1), (0, -1), 1, -1),), tag="lse-westwall-drop"))
    t.add(RuleEntry(LSE, c(north="free", west="free", east="free"),
                    (FrameRotation((1, 1), (0, 1), CCW),), tag="lse-west"))
    t.add(RuleEntry(LSE, c(north="free", west="free", east="adj", south="free"),
                    (FrameRotation((1, 1), (0, 1), CCW),), tag="lse-eastwall-up"))
    return t


def decide(view: View) -> Action:
    """Decide map of the 3-module global-compass search algorithm."""
    return table_decide(build_table(), view)


def spec() -> AlgorithmSpec:
    return AlgorithmSpec(
        name="compass3",
        radius=RADIUS,
        required_compass="global",
        module_count=3,
        decide=decide,
    )
