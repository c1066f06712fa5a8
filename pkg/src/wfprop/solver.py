"""Chronological backtracking search over configurable propagator stacks."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .flowgraph import dominator_propagate
from .oracle import failed_literal_bl
from .program import Program
from .propagation import Assignment, Conflict, Literal, NogoodStore, T, F, completion_nogoods, unit_propagate
from .unfounded import UnfoundedSet, forward_loop, greatest_unfounded_subset

PROPAGATORS = ("up", "fl", "dom", "blprobe")


@dataclass(frozen=True)
class SolverConfig:
    fl: bool = True
    dom: bool = False
    blprobe: bool = False
    heuristic: str = "lowest"
    seed: int = 0
    enum_limit: int = 0  # 0 enumerates everything
    time_budget: Optional[float] = None  # seconds

    def __post_init__(self):
        if self.dom and not self.fl:
            raise ValueError("dom requires fl")
        if self.heuristic not in ("lowest", "random"):
            raise ValueError(f"unknown heuristic {self.heuristic!r}")

    @classmethod
    def parse(cls, props: str, **kw) -> "SolverConfig":
        names = [p.strip().lower() for p in props.split(",") if p.strip()]
        unknown = set(names) - set(PROPAGATORS)
        if unknown:
            raise ValueError(f"unknown propagator(s): {', '.join(sorted(unknown))}")
        return cls(fl="fl" in names, dom="dom" in names, blprobe="blprobe" in names, **kw)

    @property
    def props(self) -> str:
        return ",".join(p for p, on in zip(PROPAGATORS, (True, self.fl, self.dom, self.blprobe)) if on)


@dataclass
class SolverStats:
    branches: int = 0
    conflicts: int = 0
    time: float = 0.0
    answer_sets_found: int = 0
    inferences: dict[str, int] = field(default_factory=lambda: dict.fromkeys(PROPAGATORS, 0))


@dataclass
class SolveResult:
    answer_sets: list[frozenset[int]]
    stats: SolverStats
    complete: bool
    reason: str = ""  # why the search stopped early


def propagate_fixpoint(program: Program, store: NogoodStore, a: Assignment, config: SolverConfig,
                       stats: Optional[SolverStats] = None) -> Optional[Conflict]:
    """Run UP, FL, DOM and BLPROBE (enabled subset) round-robin to a joint fixpoint.

    Cheaper propagators are re-run to quiescence before a more expensive one
    gets a turn.
    """
    inf = stats.inferences if stats is not None else dict.fromkeys(PROPAGATORS, 0)
    while True:
        before = len(a.trail)
        conflict = unit_propagate(store, a)
        inf["up"] += len(a.trail) - before
        if conflict:
            return conflict
        if config.fl:
            added, conflict = forward_loop(program, a)
            inf["fl"] += added
            if conflict:
                return conflict
            if added:
                continue
        if config.dom:
            added, conflict = dominator_propagate(program, a)
            inf["dom"] += added
            if conflict:
                return conflict
            if added:
                continue
        if config.blprobe:
            found = failed_literal_bl(program, store, a)
            for lit in sorted(found):
                a.assign(lit, "failed literal probe", "blprobe")
            inf["blprobe"] += len(found)
            if found:
                continue
        return None


def assign_assumptions(a: Assignment, lits: Iterable[Literal]) -> Optional[Conflict]:
    for lit in lits:
        if a.holds(lit ^ 1):
            return Conflict("assume", f"assumption on variable {lit >> 1} contradicts the assignment")
        if not a.is_assigned(lit >> 1):
            a.assign(lit, None, "assume")
    return None


def model_check(program: Program, store: NogoodStore, a: Assignment) -> Optional[Conflict]:
    """Validate a total assignment: conflict-free, no violated nogood, unfounded-free."""
    ng = store.violated(a)
    if ng is not None:
        return Conflict("up", ng)
    u = greatest_unfounded_subset(program, a, [p for p in range(program.num_atoms) if a.is_true(p)])
    if u:
        return Conflict("model", UnfoundedSet(frozenset(u), -1))
    return None


class Solver:
    def __init__(self, program: Program, config: SolverConfig = SolverConfig(),
                 assumptions: Iterable[Literal] = ()):
        self.program = program
        self.config = config
        self.assumptions = list(assumptions)
        self.store = completion_nogoods(program)
        self.rng = random.Random(config.seed)

    def _pick(self, a: Assignment) -> Optional[Literal]:
        free = [p for p in range(self.program.num_atoms) if not a.is_assigned(p)]
        if not free:
            return None
        if self.config.heuristic == "random":
            p = self.rng.choice(free)
            return T(p) if self.rng.random() < 0.5 else F(p)
        return T(free[0])

    def solve(self) -> SolveResult:
        program, store, config = self.program, self.store, self.config
        stats = SolverStats()
        start = time.perf_counter()
        a = Assignment(program.num_vars)
        answer_sets: list[frozenset[int]] = []
        flipped: list[bool] = []
        complete = True
        reason = ""

        conflict = assign_assumptions(a, self.assumptions)
        if conflict is None:
            conflict = propagate_fixpoint(program, store, a, config, stats)
        if conflict is not None:
            stats.conflicts += 1
            stats.time = time.perf_counter() - start
            return SolveResult([], stats, True)

        while True:
            if config.time_budget is not None and time.perf_counter() - start > config.time_budget:
                complete, reason = False, "time budget exhausted"
                break
            if conflict is None:
                lit = self._pick(a)
                if lit is not None:
                    stats.branches += 1
                    a.assume(lit)
                    flipped.append(False)
                    conflict = propagate_fixpoint(program, store, a, config, stats)
                    continue
                conflict = model_check(program, store, a)
                if conflict is not None:
                    stats.conflicts += 1
                else:
                    answer_sets.append(frozenset(p for p in range(program.num_atoms) if a.is_true(p)))
                    stats.answer_sets_found += 1
                    if config.enum_limit and len(answer_sets) >= config.enum_limit:
                        complete = not self._has_open_branch(flipped)
                        if not complete:
                            reason = "enumeration limit reached"
                        break
            else:
                stats.conflicts += 1
            # chronological backtracking: flip the most recent unflipped decision
            while flipped and flipped[-1]:
                flipped.pop()
            if not flipped:
                break
            level = len(flipped)
            decision = a.trail[a.level_marks[level - 1]]
            a.backtrack(level - 1)
            flipped.pop()
            stats.branches += 1
            a.assume(decision ^ 1)
            flipped.append(True)
            conflict = propagate_fixpoint(program, store, a, config, stats)
        stats.time = time.perf_counter() - start
        return SolveResult(answer_sets, stats, complete, reason)

    @staticmethod
    def _has_open_branch(flipped: list[bool]) -> bool:
        return not all(flipped)


def solve(program: Program, config: SolverConfig = SolverConfig(), assumptions: Iterable[Literal] = ()) -> SolveResult:
    return Solver(program, config, assumptions).solve()
