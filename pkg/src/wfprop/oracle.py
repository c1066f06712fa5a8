"""Brute-force ground truth for small programs.

Everything here enumerates subsets directly from the definitions and is
only meant for desk-scale inputs; guards raise :class:`GuardExceeded`.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Optional

import numpy as np

from .program import Program
from .propagation import Assignment, F, Literal, NogoodStore, T
from .unfounded import forward_loop_fixpoint

ANSWER_SET_GUARD = 20
SCC_GUARD = 15
ALL_SUBSETS_LIMIT = 12

ALL = "all"
LOOPS = "loops"


class GuardExceeded(RuntimeError):
    pass


def reduct(program: Program, x: Iterable[int]) -> Program:
    """Positive program of rules whose negative body misses ``x``; atom ids are kept."""
    x = set(x)
    bodies: dict[tuple[int, ...], int] = {}
    body_literals = []
    rules = []
    for r in program.rules:
        b = program.body(r.body)
        if x.intersection(b.negative):
            continue
        key = tuple(sorted(b.positive))
        j = bodies.get(key)
        if j is None:
            j = bodies[key] = len(body_literals)
            body_literals.append((b.positive, ()))
        if (r.head, j) not in rules:
            rules.append((r.head, j))
    return Program(program.atom_names, body_literals, rules)


def least_model(program: Program) -> set[int]:
    if any(b.negative for b in program.bodies):
        raise ValueError("least_model needs a positive program")
    model: set[int] = set()
    changed = True
    while changed:
        changed = False
        for r in program.rules:
            if r.head not in model and all(p in model for p in program.body(r.body).positive):
                model.add(r.head)
                changed = True
    return model


def _bits(mask: int) -> set[int]:
    out = set()
    i = 0
    while mask:
        if mask & 1:
            out.add(i)
        mask >>= 1
        i += 1
    return out


def enumerate_answer_sets(program: Program, guard: int = ANSWER_SET_GUARD) -> list[frozenset[int]]:
    """All X with least_model(reduct(P, X)) == X, sorted by bitmask.

    Subsets that are not supported models are discarded first in bulk;
    every answer set is supported, so the filter loses nothing.
    """
    n = program.num_atoms
    if n > guard:
        raise GuardExceeded(f"{n} atoms exceeds answer-set guard {guard}")
    masks = np.arange(1 << n, dtype=np.int64)
    supported = np.zeros_like(masks)
    for r in program.rules:
        b = program.body(r.body)
        pm = sum(1 << p for p in b.positive)
        nm = sum(1 << p for p in b.negative)
        sat = ((masks & pm) == pm) & ((masks & nm) == 0)
        supported |= np.where(sat, np.int64(1) << r.head, 0)
    out = []
    for m in masks[supported == masks].tolist():
        x = _bits(m)
        if least_model(reduct(program, x)) == x:
            out.append(frozenset(x))
    return out


def _atom_successors(program: Program) -> list[int]:
    """Bitmask of atoms q with an edge p -> body -> q in dg(P), per atom p."""
    succ = [0] * program.num_atoms
    for r in program.rules:
        for p in program.body(r.body).positive:
            succ[p] |= 1 << r.head
    return succ


def _closure(start: int, succ: list[int], within: int) -> int:
    seen = 1 << start
    todo = [start]
    while todo:
        p = todo.pop()
        nxt = succ[p] & within & ~seen
        seen |= nxt
        while nxt:
            low = nxt & -nxt
            todo.append(low.bit_length() - 1)
            nxt ^= low
    return seen


def _subset_masks(atoms: list[int]) -> np.ndarray:
    k = len(atoms)
    idx = np.arange(1, 1 << k, dtype=np.int64)
    masks = np.zeros_like(idx)
    for j, p in enumerate(atoms):
        masks |= ((idx >> j) & 1) << p
    return masks


def enumerate_loops(program: Program, guard: int = SCC_GUARD) -> list[frozenset[int]]:
    cached = getattr(program, "_loops_cache", None)
    if cached is not None:
        return cached
    succ = _atom_successors(program)
    pred = [0] * program.num_atoms
    for p, m in enumerate(succ):
        for q in _bits(m):
            pred[q] |= 1 << p
    loops = []
    for atoms in program.atom_sccs():
        if len(atoms) > guard:
            raise GuardExceeded(f"component of {len(atoms)} atoms exceeds guard {guard}")
        if len(atoms) == 1 and not succ[atoms[0]] >> atoms[0] & 1:
            continue
        for m in _subset_masks(atoms).tolist():
            p0 = (m & -m).bit_length() - 1
            if m == 1 << p0:
                if succ[p0] >> p0 & 1:
                    loops.append(frozenset([p0]))
                continue
            if _closure(p0, succ, m) == m and _closure(p0, pred, m) == m:
                loops.append(frozenset(_bits(m)))
    program._loops_cache = loops
    return loops


def candidate_sets(program: Program, omega: str) -> np.ndarray:
    """Bitmasks of the sets U in Omega."""
    if omega == LOOPS:
        return np.array([sum(1 << p for p in u) for u in enumerate_loops(program)], dtype=np.int64)
    if omega != ALL:
        raise ValueError(f"unknown omega {omega!r}")
    n = program.num_atoms
    if n <= ALL_SUBSETS_LIMIT:
        return np.arange(1, 1 << n, dtype=np.int64)
    parts = []
    for atoms in program.atom_sccs():
        if len(atoms) > SCC_GUARD:
            raise GuardExceeded(f"component of {len(atoms)} atoms exceeds guard {SCC_GUARD}")
        parts.append(_subset_masks(atoms))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


class _Support:
    """Per-set external support of every U in a candidate array."""

    def __init__(self, program: Program, a: Assignment, masks: np.ndarray):
        self.masks = masks
        ext: dict[int, np.ndarray] = {}
        for r in program.rules:
            if a.is_false(r.body):
                continue
            pm = sum(1 << p for p in program.body(r.body).positive)
            e = (((masks >> r.head) & 1) == 1) & ((masks & pm) == 0)
            ext[r.body] = ext[r.body] | e if r.body in ext else e
        self.bodies = sorted(ext)
        self.matrix = np.array([ext[b] for b in self.bodies], dtype=bool).reshape(len(self.bodies), len(masks))
        self.count = self.matrix.sum(axis=0)
        tmask = sum(1 << p for p in range(program.num_atoms) if a.is_true(p))
        self.triggered = (masks & tmask) != 0


def wfn_oracle(program: Program, a: Assignment, omega: str = ALL) -> set[Literal]:
    masks = candidate_sets(program, omega)
    if not len(masks):
        return set()
    s = _Support(program, a, masks)
    union = int(np.bitwise_or.reduce(masks[s.count == 0])) if (s.count == 0).any() else 0
    return {F(p) for p in _bits(union)}


def wfj_oracle(program: Program, a: Assignment, omega: str = ALL) -> set[Literal]:
    masks = candidate_sets(program, omega)
    if not len(masks):
        return set()
    s = _Support(program, a, masks)
    sel = (s.count == 1) & s.triggered
    return {T(b) for i, b in enumerate(s.bodies) if (s.matrix[i] & sel).any()}


def wfd_oracle(program: Program, a: Assignment, omega: str = ALL) -> set[Literal]:
    masks = candidate_sets(program, omega)
    if not len(masks):
        return set()
    s = _Support(program, a, masks)
    out = set()
    for p in range(program.num_atoms):
        rows = [i for i, b in enumerate(s.bodies) if p not in program.body(b).positive]
        others = s.matrix[rows].sum(axis=0) if rows else np.zeros(len(masks), dtype=np.int64)
        sel = s.triggered & (((masks >> p) & 1) == 0) & (others == 0)
        if sel.any():
            out.add(T(p))
    return out


def failed_literal_bl(program: Program, store: NogoodStore, a: Assignment) -> set[Literal]:
    """Bodies whose falsity fails under UP+FL; ``a`` is restored afterwards."""
    found = set()
    level = a.level
    for b in program.bodies:
        if a.is_assigned(b.var):
            continue
        a.assume(F(b.var))
        conflict = forward_loop_fixpoint(program, store, a)
        a.backtrack(level)
        if conflict:
            found.add(T(b.var))
    return found


def _reach(succs: list[list[int]], root: int, removed: Optional[int] = None) -> set[int]:
    if root == removed:
        return set()
    seen = {root}
    todo = deque([root])
    while todo:
        u = todo.popleft()
        for v in succs[u]:
            if v != removed and v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def naive_dominators(succs: list[list[int]], root: int) -> list[int]:
    """Immediate dominators by deleting each node and re-testing reachability."""
    n = len(succs)
    reachable = _reach(succs, root)
    doms = {v: {root, v} for v in reachable}
    for d in reachable:
        if d == root:
            continue
        cut = reachable - _reach(succs, root, removed=d)
        for v in cut:
            doms[v].add(d)
    idom = [-1] * n
    for v in reachable:
        if v == root:
            continue
        strict = doms[v] - {v}
        idom[v] = max(strict, key=lambda d: len(doms[d]))
    return idom
