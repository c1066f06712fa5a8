"""Forward-loop propagation: falsify unfounded sets confined to one SCC."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .program import Program
from .propagation import Assignment, Conflict, F, NogoodStore, unit_propagate


@dataclass(frozen=True)
class UnfoundedSet:
    atoms: frozenset[int]
    component: int  # scc id the set lies in; -1 when found across components

    def describe(self, program: Program) -> str:
        names = sorted(program.atom_names[p] for p in self.atoms)
        return "unfounded set {" + ", ".join(names) + "}"


def greatest_unfounded_subset(program: Program, a: Assignment, candidates: Iterable[int]) -> set[int]:
    """Largest unfounded subset of ``candidates`` (non-false atoms assumed).

    Repeatedly drops every atom that still has a non-false body whose
    positive part avoids the remaining set; what survives has no external
    support left.
    """
    u = set(candidates)
    if not u:
        return u
    count: dict[int, int] = {}
    queue: deque[int] = deque()
    queued: set[int] = set()
    for p in u:
        for bv in program.bodies_of[p]:
            if bv not in count:
                count[bv] = sum(1 for q in program.body(bv).positive if q in u)
            if count[bv] == 0 and not a.is_false(bv) and p not in queued:
                queued.add(p)
                queue.append(p)
    while queue:
        p = queue.popleft()
        u.discard(p)
        for bv in program.pos_occ[p]:
            c = count.get(bv)
            if c is None:
                continue
            count[bv] = c - 1
            if c == 1 and not a.is_false(bv):
                for h in program.heads_of[bv]:
                    if h in u and h not in queued:
                        queued.add(h)
                        queue.append(h)
    return u


def unfounded_sets(program: Program, a: Assignment) -> list[UnfoundedSet]:
    """Greatest unfounded subset of every SCC, skipping already-false atoms."""
    out = []
    for atoms in program.atom_sccs():
        cand = [p for p in atoms if not a.is_false(p)]
        if not cand:
            continue
        u = greatest_unfounded_subset(program, a, cand)
        if u:
            out.append(UnfoundedSet(frozenset(u), program.scc_id[atoms[0]]))
    return out


def forward_loop(program: Program, a: Assignment) -> tuple[int, Optional[Conflict]]:
    """One FL round. Returns (literals added, conflict)."""
    added = 0
    for us in unfounded_sets(program, a):
        for p in sorted(us.atoms):
            if a.is_true(p):
                return added, Conflict("fl", us)
            if not a.is_assigned(p):
                a.assign(F(p), us, "fl")
                added += 1
    return added, None


def forward_loop_fixpoint(program: Program, store: NogoodStore, a: Assignment) -> Optional[Conflict]:
    """Alternate UP and FL until neither adds anything."""
    while True:
        conflict = unit_propagate(store, a)
        if conflict:
            return conflict
        added, conflict = forward_loop(program, a)
        if conflict:
            return conflict
        if not added:
            return None


def is_unfounded_free(program: Program, a: Assignment) -> bool:
    """True if no unfounded set contains a non-false atom."""
    cand = [p for p in range(program.num_atoms) if not a.is_false(p)]
    return not greatest_unfounded_subset(program, a, cand)
