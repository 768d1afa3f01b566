"""Coverage and self-stabilization sweeps over initial configurations,
targets, and compass policies, with machine-checkable reports.

A sweep exploits determinism: for a fixed (initial configuration, policy)
the execution prefix is independent of the target until the target is found,
so one exploration run yields the found-step for every target cell via its
first-occupancy time.  Halting semantics are additionally spot-checked
through real target runs by the test suite.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .algorithms.base import AlgorithmSpec
from .engine import (
    CompassPolicy,
    ExecutionTrace,
    GlobalAligned,
    RandomFixed,
    Runner,
    SymmetricAdversary,
    default_max_steps,
    run_execution,
)
from .grid import Cell, Configuration, Field, InvalidArgument, is_connected
from .shapes import (
    Shape,
    fixed_polyominoes,
    is_forbidden5,
    one_sided_polyominoes,
    placements_in,
    rotation_order,
)


def enumerate_initial_configurations(
    n: int,
    f: Field,
    modulo_rotation: bool = False,
    exclude_forbidden: bool = False,
) -> List[FrozenSet[Cell]]:
    """All connected n-cell placements inside ``f``.

    Shapes are deduplicated by translation always; ``modulo_rotation``
    additionally keeps one representative orientation per rotation class
    (sound for the square acceptance fields, where a global rotation maps
    the sweep onto itself).  ``exclude_forbidden`` drops the four deadlock
    pentomino shapes.
    """
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    shapes: Iterable[Shape]
    shapes = one_sided_polyominoes(n) if modulo_rotation else fixed_polyominoes(n)
    out: List[FrozenSet[Cell]] = []
    for shape in shapes:
        if exclude_forbidden and n == 5 and rotation_order(shape) > 1:
            continue
        out.extend(placements_in(shape, f))
    return out


def coverage_check(trace: ExecutionTrace, f: Field) -> Tuple[bool, List[Cell]]:
    """True iff the trace visited every interior cell; returns missing cells."""
    missing = [c for c in f.interior_cells() if c not in trace.visited]
    return (not missing, missing)


@dataclass
class SweepReport:
    algorithm: str
    field: Tuple[int, int]
    policies: List[str]
    totals: int = 0
    dedup_factor: int = 1
    outcome_counts: Dict[str, int] = field(default_factory=dict)
    worst_steps: int = 0
    failures: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def merge(self, other: "SweepReport") -> "SweepReport":
        self.totals += other.totals
        self.worst_steps = max(self.worst_steps, other.worst_steps)
        for k, v in other.outcome_counts.items():
            self.outcome_counts[k] = self.outcome_counts.get(k, 0) + v
        self.failures.extend(other.failures)
        return self

    def summary(self) -> str:
        lines = [
            f"algorithm={self.algorithm} field={self.field[0]}x{self.field[1]}",
            f"tuples={self.totals} worst_steps={self.worst_steps}",
            "outcomes: " + ", ".join(f"{k}={v}" for k, v in sorted(self.outcome_counts.items())),
            ("OK" if self.ok else f"FAILURES: {len(self.failures)}"),
        ]
        return "\n".join(lines)


def occupancy_times(
    alg: AlgorithmSpec,
    f: Field,
    c0: Configuration,
    policy: CompassPolicy,
    max_steps: Optional[int] = None,
    runner: Optional[Runner] = None,
) -> Tuple[ExecutionTrace, Dict[Cell, int]]:
    """Run without a target and record each cell's first occupancy step."""
    trace = run_execution(
        alg, f, c0, policy, target=None,
        max_steps=max_steps or default_max_steps(f),
        record_steps=True, runner=runner,
    )
    first: Dict[Cell, int] = {}
    for t, step in enumerate(trace.steps):
        for cell in step.configuration:
            if cell not in first:
                first[cell] = t
    if trace.final is not None:
        t = len(trace.steps)
        for cell in trace.final:
            if cell not in first:
                first[cell] = t
    return trace, first


def standard_policies(algorithm: AlgorithmSpec, random_seeds: int = 32) -> List[CompassPolicy]:
    if algorithm.required_compass == "global":
        return [GlobalAligned()]
    out: List[CompassPolicy] = [GlobalAligned(), SymmetricAdversary()]
    out.extend(RandomFixed(seed) for seed in range(random_seeds))
    return out


def _search_success(
    alg: AlgorithmSpec,
    f: Field,
    c0: Configuration,
    policy: CompassPolicy,
    max_steps: int,
    runner: Runner,
) -> Tuple[Optional[dict], int, str]:
    """One sweep point: exploration run, then target coverage via occupancy."""
    trace, first = occupancy_times(alg, f, c0, policy, max_steps, runner)
    steps = len(trace.steps)
    if trace.outcome == "forbiddenInitial":
        return None, 0, trace.outcome
    missing = [c for c in f.interior_cells() if c not in first]
    if missing:
        return (
            {
                "initial": sorted(c0),
                "policy": policy.name,
                "outcome": trace.outcome,
                "unreached_targets": [list(c) for c in missing[:16]],
            },
            steps,
            trace.outcome,
        )
    return None, steps, trace.outcome


def self_stabilization_sweep(
    alg: AlgorithmSpec,
    f: Field,
    policies: Optional[Sequence[CompassPolicy]] = None,
    initials: Optional[Sequence[Configuration]] = None,
    modulo_rotation: bool = True,
    exclude_forbidden: Optional[bool] = None,
    max_steps: Optional[int] = None,
) -> SweepReport:
    """Run every (initial configuration, policy) tuple and check that every
    target cell would be found.

    Forbidden 5-module initial states are reported informationally as
    ``forbiddenInitial`` and are not failures.
    """
    if policies is None:
        policies = standard_policies(alg)
    if initials is None:
        initials = enumerate_initial_configurations(
            alg.module_count, f, modulo_rotation=modulo_rotation, exclude_forbidden=False
        )
    cap = max_steps or default_max_steps(f)
    report = SweepReport(alg.name, (f.width, f.height), [p.name for p in policies])
    runner = Runner(alg, f)
    for c0 in initials:
        for policy in policies:
            report.totals += 1
            failure, steps, outcome = _search_success(alg, f, c0, policy, cap, runner)
            report.worst_steps = max(report.worst_steps, steps)
            report.outcome_counts[outcome] = report.outcome_counts.get(outcome, 0) + 1
            if failure is not None:
                report.failures.append(failure)
    return report


def worker_count() -> int:
    env = os.environ.get("METAMORPH_WORKERS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)
