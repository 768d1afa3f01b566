"""Synchronous execution engine with compass-assignment policies.

Each module carries a fixed local compass for the whole execution; module
identity exists only inside the engine to keep compasses attached across
moves and is never exposed to the algorithms.  Steps are memoized on the
translation-invariant context (relative configuration, clipped wall
distances, relative target, and compasses where they can matter), which
makes the exhaustive sweeps tractable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .grid import (
    Cell,
    Configuration,
    Field,
    InvalidArgument,
    Move,
    Rotation,
    Sliding,
    StepRejected,
    apply_synchronous_step,
    bounding_box,
    is_connected,
)
from .shapes import rotation_order
from .algorithms.base import AlgorithmSpec, UnhandledState, local_to_global
from .views import GLOBAL_COMPASS, LocalCompass, observe

OUTCOME_FOUND = "found"
OUTCOME_DEADLOCK = "deadlock"
OUTCOME_LIVELOCK = "livelock"
OUTCOME_STEP_LIMIT = "stepLimit"
OUTCOME_INVALID_STEP = "invalidStep"
OUTCOME_FORBIDDEN_INITIAL = "forbiddenInitial"


# ---------------------------------------------------------------------------
# Compass policies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GlobalAligned:
    name: str = "global-aligned"

    def assign(self, cells: Sequence[Cell]) -> List[LocalCompass]:
        return [GLOBAL_COMPASS] * len(cells)


@dataclass(frozen=True)
class FixedAssignment:
    rotations: Tuple[int, ...]
    name: str = "fixed"

    def assign(self, cells: Sequence[Cell]) -> List[LocalCompass]:
        if len(self.rotations) != len(cells):
            raise InvalidArgument("fixed assignment length mismatch")
        return [LocalCompass(r % 4) for r in self.rotations]


@dataclass(frozen=True)
class RandomFixed:
    seed: int
    name: str = "random-fixed"

    def assign(self, cells: Sequence[Cell]) -> List[LocalCompass]:
        rng = random.Random(self.seed)
        return [LocalCompass(rng.randrange(4)) for _ in cells]


@dataclass(frozen=True)
class SymmetricAdversary:
    """Give rotation-related modules correspondingly rotated compasses.

    For a C2 (C4) initial configuration, modules at symmetric positions
    receive compasses differing by the symmetry rotation, so their views are
    identical and they are forced to move simultaneously and symmetrically.
    """

    base_rotation: int = 0
    name: str = "symmetric-adversary"

    def assign(self, cells: Sequence[Cell]) -> List[LocalCompass]:
        from .shapes import rotational_symmetry

        sym = rotational_symmetry(frozenset(cells))
        out: List[LocalCompass] = []
        if sym.group == "C1":
            return [LocalCompass(self.base_rotation % 4)] * len(cells)
        cx, cy = sym.center
        order = 4 if sym.group == "C4" else 2
        step = 4 // order  # quarter turns per generator application
        # Orbit representatives: assign the base rotation to the lexicographic
        # leader of each orbit and rotated compasses to its images.
        cell_list = list(cells)
        cellset = {(float(x), float(y)) for (x, y) in cell_list}
        assigned: Dict[Cell, int] = {}
        for start in sorted(cell_list):
            if start in assigned:
                continue
            # Walk the rotation orbit of `start`.
            rot = self.base_rotation % 4
            px, py = float(start[0]), float(start[1])
            for _ in range(order):
                cell = (int(round(px)), int(round(py)))
                if cell not in assigned:
                    assigned[cell] = rot % 4
                # rotate (px,py) about (cx,cy) by -90*step degrees (clockwise
                # generator) and bump the compass by the same amount.
                for _ in range(step):
                    px, py = cx + (py - cy), cy - (px - cx)
                rot += step
        return [LocalCompass(assigned[c]) for c in cell_list]


CompassPolicy = GlobalAligned | FixedAssignment | RandomFixed | SymmetricAdversary


def policy_from_name(name: str, seed: int = 0) -> CompassPolicy:
    if name in ("global", "global-aligned", "aligned"):
        return GlobalAligned()
    if name in ("symmetric", "symmetric-adversary", "adversary"):
        return SymmetricAdversary()
    if name in ("random", "random-fixed"):
        return RandomFixed(seed)
    raise InvalidArgument(f"unknown policy {name!r}")


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


@dataclass
class TraceStep:
    configuration: Configuration
    joint: Dict[Cell, Move]  # moves applied to reach the *next* configuration


@dataclass
class ExecutionTrace:
    field: Field
    algorithm: str
    policy: str
    target: Optional[Cell]
    initial: Configuration
    steps: List[TraceStep] = field(default_factory=list)
    final: Optional[Configuration] = None
    visited: set = field(default_factory=set)
    outcome: str = OUTCOME_STEP_LIMIT
    rejected_condition: Optional[str] = None

    def configurations(self) -> List[Configuration]:
        confs = [s.configuration for s in self.steps]
        if self.final is not None:
            confs.append(self.final)
        return confs


def default_max_steps(f: Field) -> int:
    return 64 * f.width * f.height


# ---------------------------------------------------------------------------
# The runner
# ---------------------------------------------------------------------------


def _canonical_key(
    cells: Tuple[Cell, ...],
    f: Field,
    radius: int,
    target: Optional[Cell],
    compasses: Optional[Tuple[int, ...]],
) -> tuple:
    x0, y0, x1, y1 = bounding_box(cells)
    rel = tuple(sorted((c[0] - x0, c[1] - y0) for c in cells))
    big = radius + 1
    walls = (
        min(x0 + 1, big),            # west distance from bbox edge
        min(f.width - x1, big),      # east
        min(y0 + 1, big),            # south
        min(f.height - y1, big),     # north
    )
    if target is not None:
        tdx, tdy = target[0] - x0, target[1] - y0
        span = max(x1 - x0, y1 - y0)
        reach = radius + span
        trel = (tdx, tdy) if (-reach <= tdx <= reach and -reach <= tdy <= reach) else None
    else:
        trel = None
    return (rel, walls, trel, compasses)


class Runner:
    """Reusable executor for one algorithm on one field (caches steps)."""

    def __init__(self, alg: AlgorithmSpec, f: Field):
        self.alg = alg
        self.f = f
        self._joint_cache: Dict[tuple, Tuple[Move, ...]] = {}

    def _compute_joint(
        self,
        cells_sorted: Tuple[Cell, ...],
        compasses: Mapping[Cell, LocalCompass],
        target: Optional[Cell],
    ) -> Tuple[Tuple[Cell, Move], ...]:
        config = frozenset(cells_sorted)
        joint: List[Tuple[Cell, Move]] = []
        for cell in cells_sorted:
            compass = compasses[cell]
            view = observe(config, self.f, cell, self.alg.radius, compass, target)
            action = self.alg.decide(view)
            if action is not None:
                joint.append((cell, local_to_global(action, cell, compass.rotation)))
        return tuple(joint)

    def joint_move(
        self,
        config: Configuration,
        compasses: Mapping[Cell, LocalCompass],
        target: Optional[Cell],
    ) -> Tuple[Tuple[Cell, Move], ...]:
        cells_sorted = tuple(sorted(config))
        include_compasses: Optional[Tuple[int, ...]] = None
        if self.alg.required_compass != "global":
            rots = tuple(compasses[c].rotation for c in cells_sorted)
            if any(rots):
                # Covariant decide maps are compass-independent on
                # rotationally asymmetric configurations: the canonical frame
                # absorbs the local rotation.  Only symmetric configurations
                # (where a tiebreak may consult the local compass) need
                # distinct cache keys.
                if (
                    self.alg.compass_sensitive_when_symmetric
                    and rotation_order(cells_sorted) > 1
                ):
                    include_compasses = rots
        key = _canonical_key(cells_sorted, self.f, self.alg.radius, target, include_compasses)
        x0, y0, _, _ = bounding_box(cells_sorted)
        rel_joint = self._joint_cache.get(key)
        if rel_joint is None:
            abs_joint = self._compute_joint(cells_sorted, compasses, target)
            rel_joint = tuple(move.translated(-x0, -y0) for (_, move) in abs_joint)
            self._joint_cache[key] = rel_joint
        return tuple((mv.mover, mv) for mv in (m.translated(x0, y0) for m in rel_joint))


def run_execution(
    alg: AlgorithmSpec,
    f: Field,
    c0: Configuration,
    policy: CompassPolicy,
    target: Optional[Cell] = None,
    max_steps: Optional[int] = None,
    record_steps: bool = True,
    runner: Optional[Runner] = None,
) -> ExecutionTrace:
    """Run a synchronous execution and classify its outcome.

    The trace is replayable: every recorded step re-validates through
    :func:`apply_synchronous_step`.  A validator rejection is reported as
    outcome ``invalidStep`` rather than an exception.
    """
    c0 = frozenset(c0)
    if not c0:
        raise InvalidArgument("empty initial configuration")
    if not is_connected(c0):
        raise InvalidArgument("initial configuration must be connected")
    if any(not f.is_interior(c) for c in c0):
        raise InvalidArgument("initial configuration must lie inside the field")
    if alg.module_count != len(c0):
        raise InvalidArgument(
            f"{alg.name} drives {alg.module_count} modules, got {len(c0)}"
        )
    if max_steps is None:
        max_steps = default_max_steps(f)
    if max_steps < 1:
        raise InvalidArgument("max_steps must be >= 1")

    trace = ExecutionTrace(
        field=f, algorithm=alg.name, policy=policy.name, target=target, initial=c0
    )
    trace.visited.update(c0)

    if alg.forbidden_initial is not None and alg.forbidden_initial(c0):
        trace.outcome = OUTCOME_FORBIDDEN_INITIAL
        trace.final = c0
        return trace

    cells_sorted = sorted(c0)
    compass_list = policy.assign(cells_sorted)
    compasses: Dict[Cell, LocalCompass] = dict(zip(cells_sorted, compass_list))

    if runner is None:
        runner = Runner(alg, f)

    config = c0
    if target is not None and target in config:
        trace.outcome = OUTCOME_FOUND
        trace.final = config
        return trace

    seen_states: Dict[tuple, Tuple[int, int, Cell]] = {}

    for step_index in range(max_steps):
        try:
            joint_pairs = runner.joint_move(config, compasses, target)
        except UnhandledState as exc:
            raise UnhandledState(f"{alg.name} step {step_index}: {exc}") from exc
        joint = dict(joint_pairs)

        if not joint:
            if target is not None and target in config:
                trace.outcome = OUTCOME_FOUND
            else:
                trace.outcome = OUTCOME_DEADLOCK
            trace.final = config
            return trace

        try:
            new_config = apply_synchronous_step(config, joint, f, collect_visited=trace.visited)
        except StepRejected as rej:
            trace.outcome = OUTCOME_INVALID_STEP
            trace.rejected_condition = rej.condition
            trace.final = config
            if record_steps:
                trace.steps.append(TraceStep(config, joint))
            return trace

        # Move compasses along with their modules.
        for src, move in joint.items():
            compasses[move.destination] = compasses.pop(src)

        if record_steps:
            trace.steps.append(TraceStep(config, joint))
        config = new_config

        if target is not None and target in config:
            trace.outcome = OUTCOME_FOUND
            trace.final = config
            return trace

        # Livelock: same translated state and same coverage seen before with
        # zero net displacement over the repeat period.
        x0, y0, _, _ = bounding_box(config)
        rel = tuple(sorted((c[0] - x0, c[1] - y0) for c in config))
        state_key = (rel, len(trace.visited))
        prev = seen_states.get(state_key)
        if prev is not None and (x0, y0) == (prev[1], prev[2]):
            trace.outcome = OUTCOME_LIVELOCK
            trace.final = config
            return trace
        if prev is None:
            seen_states[state_key] = (step_index, x0, y0)

    trace.outcome = OUTCOME_STEP_LIMIT
    trace.final = config
    return trace
