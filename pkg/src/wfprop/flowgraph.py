"""Support flowgraph, dominator trees and the consequences they license.

A body that dominates a true atom is the only remaining external support
of everything it dominates, so it must be true. An atom that strictly
dominates a true atom occurs positively in all remaining external support
of the atoms below it, so it must be true as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .program import Program
from .propagation import Assignment, Conflict, Literal, T

TOP_LABEL = "TOP"


@dataclass
class SupportFlowgraph:
    """F(P, A) over node ids ``0 .. num_vars``; node ``num_vars`` is the source.

    A node assigned false keeps its incoming edges but feeds nothing.
    """
    program: Program
    preds: list[list[int]]
    succs: list[list[int]]
    false: frozenset[int]

    @property
    def top(self) -> int:
        return self.program.num_vars

    @property
    def num_nodes(self) -> int:
        return len(self.preds)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.num_nodes) for v in self.succs[u]]

    def node_name(self, v: int) -> str:
        return TOP_LABEL if v == self.top else self.program.var_name(v)

    def phi(self, body: int) -> tuple[int, ...]:
        return self.program.phi[body]


def build_flowgraph(program: Program, a: Optional[Assignment] = None) -> SupportFlowgraph:
    n = program.num_vars
    top = n
    false = frozenset() if a is None else frozenset(v for v in range(n) if a.is_false(v))
    preds: list[list[int]] = [[] for _ in range(n + 1)]
    succs: list[list[int]] = [[] for _ in range(n + 1)]
    for b in program.bodies:
        phi = program.phi[b.var]
        if not phi:
            preds[b.var].append(top)
            succs[top].append(b.var)
        for x in phi:
            if x not in false:
                preds[b.var].append(x)
                succs[x].append(b.var)
    for r in program.rules:
        if r.body not in false:
            preds[r.head].append(r.body)
            succs[r.body].append(r.head)
    return SupportFlowgraph(program, preds, succs, false)


def immediate_dominators(preds: list[list[int]], succs: list[list[int]], root: int) -> list[int]:
    """Lengauer-Tarjan (simple version, path compression only).

    Returns ``idom`` per node; -1 for the root and for unreachable nodes.
    """
    n = len(succs)
    dfnum = [-1] * n
    vertex: list[int] = []
    parent: list[int] = []
    stack = [(root, -1)]
    while stack:
        v, par = stack.pop()
        if dfnum[v] >= 0:
            continue
        dfnum[v] = len(vertex)
        vertex.append(v)
        parent.append(par)
        for w in reversed(succs[v]):
            if dfnum[w] < 0:
                stack.append((w, dfnum[v]))
    size = len(vertex)
    semi = list(range(size))
    label = list(range(size))
    ancestor = [-1] * size
    idom = [0] * size
    bucket: list[list[int]] = [[] for _ in range(size)]

    def evaluate(v: int) -> int:
        if ancestor[v] < 0:
            return v
        path = []
        u = v
        while ancestor[ancestor[u]] >= 0:
            path.append(u)
            u = ancestor[u]
        while path:
            u = path.pop()
            anc = ancestor[u]
            if semi[label[anc]] < semi[label[u]]:
                label[u] = label[anc]
            ancestor[u] = ancestor[anc]
        return label[v]

    for i in range(size - 1, 0, -1):
        for pv in preds[vertex[i]]:
            j = dfnum[pv]
            if j < 0:
                continue
            u = evaluate(j)
            if semi[u] < semi[i]:
                semi[i] = semi[u]
        bucket[semi[i]].append(i)
        p = parent[i]
        ancestor[i] = p
        for v in bucket[p]:
            u = evaluate(v)
            idom[v] = u if semi[u] < semi[v] else p
        bucket[p] = []
    for i in range(1, size):
        if idom[i] != semi[i]:
            idom[i] = idom[idom[i]]
    out = [-1] * n
    for i in range(1, size):
        out[vertex[i]] = vertex[idom[i]]
    return out


@dataclass
class DominatorTree:
    root: int
    idom: list[int]
    reachable: frozenset[int]
    _children: Optional[list[list[int]]] = field(default=None, repr=False)

    def dominators(self, v: int) -> list[int]:
        """Strict dominators of ``v``, nearest first, ending at the root."""
        out = []
        d = self.idom[v]
        while d >= 0:
            out.append(d)
            d = self.idom[d]
        return out

    def dominates(self, u: int, v: int) -> bool:
        if v not in self.reachable:
            return False
        return u == v or u in self.dominators(v)

    def children(self, v: int) -> list[int]:
        if self._children is None:
            self._children = [[] for _ in self.idom]
            for w, d in enumerate(self.idom):
                if d >= 0:
                    self._children[d].append(w)
        return self._children[v]

    def subtree(self, v: int) -> set[int]:
        out = {v}
        todo = [v]
        while todo:
            for w in self.children(todo.pop()):
                out.add(w)
                todo.append(w)
        return out


def compute_dominators(g: SupportFlowgraph) -> DominatorTree:
    idom = immediate_dominators(g.preds, g.succs, g.top)
    reachable = frozenset([g.top] + [v for v, d in enumerate(idom) if d >= 0])
    return DominatorTree(g.top, idom, reachable)


@dataclass(frozen=True)
class DomReason:
    """Why a dominator consequence holds: ``dominator`` dominates true atom ``trigger``."""
    dominator: int
    trigger: int
    tree: DominatorTree = field(compare=False, hash=False, repr=False)

    def dominated_atoms(self, program: Program) -> list[int]:
        atoms = [v for v in self.tree.subtree(self.dominator) if v < program.num_atoms]
        if self.dominator < program.num_atoms:
            atoms.remove(self.dominator)
        return sorted(atoms)

    def describe(self, program: Program) -> str:
        dom = program.var_name(self.dominator)
        names = ", ".join(program.atom_names[p] for p in self.dominated_atoms(program))
        return f"{dom} dominates true atom {program.atom_names[self.trigger]}; dominated atoms {{{names}}}"


@dataclass(frozen=True)
class Consequence:
    literal: Literal
    reason: DomReason


def dominator_consequences(program: Program, a: Assignment, tree: DominatorTree) -> list[Consequence]:
    """T-literals for every strict dominator (other than the source) of a true atom.

    Consequences for already-true variables are skipped; a consequence whose
    variable is already false is returned as-is and signals a conflict.
    Meaningful when ``a`` is a UP+FL fixpoint.
    """
    out = []
    seen: set[int] = set()
    for q in range(program.num_atoms):
        if not a.is_true(q) or q not in tree.reachable:
            continue
        d = tree.idom[q]
        while d >= 0 and d != tree.root and d not in seen:
            seen.add(d)
            if not a.is_true(d):
                out.append(Consequence(T(d), DomReason(d, q, tree)))
            d = tree.idom[d]
    return out


@dataclass(frozen=True)
class UnreachableAtom:
    atom: int

    def describe(self, program: Program) -> str:
        return f"true atom {program.atom_names[self.atom]} has no path from {TOP_LABEL}"


def dominator_propagate(program: Program, a: Assignment) -> tuple[int, Optional[Conflict]]:
    """Rebuild F(P, A), recompute dominators and assert their consequences."""
    g = build_flowgraph(program, a)
    tree = compute_dominators(g)
    for q in range(program.num_atoms):
        if a.is_true(q) and q not in tree.reachable:
            return 0, Conflict("dom", UnreachableAtom(q))
    added = 0
    for c in dominator_consequences(program, a, tree):
        var = c.literal >> 1
        if a.is_false(var):
            return added, Conflict("dom", c.reason)
        if not a.is_assigned(var):
            a.assign(c.literal, c.reason, "dom")
            added += 1
    return added, None


@dataclass
class CutCheck:
    support: bool
    atom: bool
    front: frozenset[int]
    back: frozenset[int]
    reason: str = ""

    @property
    def valid(self) -> bool:
        return self.support or self.atom


def validate_cut(g: SupportFlowgraph, source_side: Iterable[int], sink_side: Iterable[int]) -> CutCheck:
    """Classify the cut ``(S, W)`` as a support cut and/or an atom cut."""
    s = set(source_side)
    w = set(sink_side)
    if s & w:
        return CutCheck(False, False, frozenset(), frozenset(), "sides overlap")
    if s | w != set(range(g.num_nodes)):
        return CutCheck(False, False, frozenset(), frozenset(), "sides do not cover the graph")
    if g.top not in s:
        return CutCheck(False, False, frozenset(), frozenset(), "source not on the source side")
    front = frozenset(u for u in s if any(v in w for v in g.succs[u]))
    back = frozenset(u for u in w if any(v in s for v in g.succs[u]))
    n = g.program.num_atoms
    is_body = lambda v: n <= v < g.top  # noqa: E731
    is_atom = lambda v: v < n  # noqa: E731
    back_ok = all(is_body(v) for v in back)
    support = back_ok and all(is_body(v) for v in front)
    atom = back_ok and all(is_atom(v) for v in front)
    reason = ""
    if not back_ok:
        reason = "back contains a non-body node"
    elif not (support or atom):
        reason = "front mixes atoms and bodies"
    return CutCheck(support, atom, front, back, reason)


def to_dot(g: SupportFlowgraph, tree: Optional[DominatorTree] = None, a: Optional[Assignment] = None) -> str:
    def q(s: str) -> str:
        return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'

    lines = ["digraph support {", "  rankdir=LR;"]
    for v in range(g.num_nodes):
        label = g.node_name(v)
        shape = "diamond" if v == g.top else ("ellipse" if v < g.program.num_atoms else "box")
        attrs = [f"label={q(label)}", f"shape={shape}"]
        if a is not None and v < g.top and a.is_assigned(v):
            attrs.append('style=filled, fillcolor="%s"' % ("palegreen" if a.is_true(v) else "lightpink"))
        lines.append(f"  n{v} [{', '.join(attrs)}];")
    for u, v in g.edges():
        lines.append(f"  n{u} -> n{v};")
    if tree is not None:
        for v, d in enumerate(tree.idom):
            if d >= 0:
                lines.append(f"  n{d} -> n{v} [style=dashed, color=blue, constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"
