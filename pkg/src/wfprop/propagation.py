"""Assignments over atom/body variables, completion nogoods and unit propagation.

Literals are plain ints: ``2*v`` is ``Tv`` and ``2*v + 1`` is ``Fv``, so the
complement of ``lit`` is ``lit ^ 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

from .program import Program

Literal = int
Nogood = tuple[Literal, ...]


def T(var: int) -> Literal:
    return var << 1


def F(var: int) -> Literal:
    return (var << 1) | 1


def lit_var(lit: Literal) -> int:
    return lit >> 1


def lit_sign(lit: Literal) -> bool:
    """True for a ``T`` literal."""
    return not lit & 1


def complement(lit: Literal) -> Literal:
    return lit ^ 1


def format_literal(program: Program, lit: Literal) -> str:
    return ("T" if lit_sign(lit) else "F") + program.var_name(lit_var(lit))


@dataclass
class Conflict:
    """A propagation failure; ``reason`` is whatever the ``source`` propagator blames."""
    source: str
    reason: Any

    def describe(self, program: Program) -> str:
        r = self.reason
        if self.source == "up" and isinstance(r, tuple):
            return "violated nogood {" + ", ".join(format_literal(program, l) for l in r) + "}"
        if hasattr(r, "describe"):
            return r.describe(program)
        return str(r)


class Assignment:
    """Trail of literals with decision levels.

    Every trail entry carries the propagator that set it and its reason.
    """

    def __init__(self, num_vars: int):
        self.value: list[Optional[bool]] = [None] * num_vars
        self.position = [-1] * num_vars
        self.trail: list[Literal] = []
        self.reasons: list[Any] = []
        self.sources: list[str] = []
        self.level_marks: list[int] = []
        self.qhead = 0

    @property
    def num_vars(self) -> int:
        return len(self.value)

    @property
    def level(self) -> int:
        return len(self.level_marks)

    def holds(self, lit: Literal) -> bool:
        return self.value[lit >> 1] == (not lit & 1)

    def is_true(self, var: int) -> bool:
        return self.value[var] is True

    def is_false(self, var: int) -> bool:
        return self.value[var] is False

    def is_assigned(self, var: int) -> bool:
        return self.value[var] is not None

    def assign(self, lit: Literal, reason: Any = None, source: str = "assume") -> None:
        var = lit >> 1
        if self.value[var] is not None:
            raise ValueError(f"variable {var} already assigned")
        self.value[var] = not lit & 1
        self.position[var] = len(self.trail)
        self.trail.append(lit)
        self.reasons.append(reason)
        self.sources.append(source)

    def assume(self, lit: Literal) -> None:
        """Open a new decision level with ``lit`` as its decision."""
        if self.value[lit >> 1] is not None:
            raise ValueError(f"variable {lit >> 1} already assigned")
        self.level_marks.append(len(self.trail))
        self.assign(lit, None, "assume")

    def backtrack(self, level: int) -> None:
        if level >= self.level:
            return
        mark = self.level_marks[level]
        for lit in self.trail[mark:]:
            self.value[lit >> 1] = None
            self.position[lit >> 1] = -1
        del self.trail[mark:]
        del self.reasons[mark:]
        del self.sources[mark:]
        del self.level_marks[level:]
        self.qhead = min(self.qhead, mark)

    def true_vars(self) -> set[int]:
        return {l >> 1 for l in self.trail if not l & 1}

    def false_vars(self) -> set[int]:
        return {l >> 1 for l in self.trail if l & 1}

    def literals(self) -> set[Literal]:
        return set(self.trail)

    def snapshot(self) -> tuple:
        return (tuple(self.trail), tuple(self.level_marks), tuple(self.value), self.qhead)

    def copy(self) -> "Assignment":
        a = Assignment(self.num_vars)
        a.value = list(self.value)
        a.position = list(self.position)
        a.trail = list(self.trail)
        a.reasons = list(self.reasons)
        a.sources = list(self.sources)
        a.level_marks = list(self.level_marks)
        a.qhead = self.qhead
        return a

    @classmethod
    def from_literals(cls, num_vars: int, lits: Iterable[Literal]) -> "Assignment":
        a = cls(num_vars)
        for lit in lits:
            a.assign(lit)
        return a


@dataclass
class NogoodStore:
    """Completion nogoods with an occurrence index.

    ``occurs[lit]`` lists the nogoods containing ``lit``; a nogood is
    revisited whenever one of its literals enters the assignment. The store
    holds no per-assignment state, so one store can serve many assignments.
    """
    nogoods: list[Nogood]
    num_vars: int
    occurs: list[list[int]] = field(default_factory=list)
    unary: list[Nogood] = field(default_factory=list)

    def __post_init__(self):
        self.occurs = [[] for _ in range(2 * self.num_vars)]
        self.unary = []
        for i, ng in enumerate(self.nogoods):
            if len(ng) == 1:
                self.unary.append(ng)
            for lit in ng:
                self.occurs[lit].append(i)

    def __len__(self) -> int:
        return len(self.nogoods)

    def violated(self, a: Assignment) -> Optional[Nogood]:
        for ng in self.nogoods:
            if all(a.holds(l) for l in ng):
                return ng
        return None


def _simplify(lits: Iterable[Literal]) -> Optional[Nogood]:
    ng = tuple(dict.fromkeys(lits))
    s = set(ng)
    if any(l ^ 1 in s for l in ng):
        return None  # contains Tx and Fx: can never be violated
    return ng


def completion_nogoods(program: Program) -> NogoodStore:
    nogoods: list[Nogood] = []

    def add(lits):
        ng = _simplify(lits)
        if ng is not None:
            nogoods.append(ng)

    for b in program.bodies:
        add([T(p) for p in b.positive] + [F(p) for p in b.negative] + [F(b.var)])
        for p in b.positive:
            add([F(p), T(b.var)])
        for p in b.negative:
            add([T(p), T(b.var)])
    for p in range(program.num_atoms):
        bodies = program.bodies_of[p]
        for bv in bodies:
            add([T(bv), F(p)])
        add([F(bv) for bv in bodies] + [T(p)])
    return NogoodStore(nogoods, program.num_vars)


def unit_propagate(store: NogoodStore, a: Assignment) -> Optional[Conflict]:
    """Extend ``a`` with unit-resulting literals until fixpoint.

    Returns ``None`` at a conflict-free fixpoint, otherwise a Conflict
    holding a nogood contained in the assignment.
    """
    value = a.value
    for ng in store.unary:
        lit = ng[0]
        v = value[lit >> 1]
        if v is None:
            a.assign(lit ^ 1, ng, "up")
        elif v == (not lit & 1):
            return Conflict("up", ng)
    trail = a.trail
    nogoods = store.nogoods
    occurs = store.occurs
    while a.qhead < len(trail):
        lit = trail[a.qhead]
        a.qhead += 1
        for ni in occurs[lit]:
            ng = nogoods[ni]
            free = -1
            for l in ng:
                v = value[l >> 1]
                if v is None:
                    if free >= 0:
                        break
                    free = l
                elif v != (not l & 1):
                    break
            else:
                if free < 0:
                    return Conflict("up", ng)
                a.assign(free ^ 1, ng, "up")
    return None
