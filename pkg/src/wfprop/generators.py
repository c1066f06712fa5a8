"""Seeded random programs, closed assignments and flowgraphs for property suites."""

from __future__ import annotations

import random
from typing import Optional

from .program import GENERAL, UNARY, Program, build_program, classify
from .propagation import Assignment, F, T, completion_nogoods
from .unfounded import forward_loop_fixpoint

KINDS = ("general", "unary", "component-unary")


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_rules(rng: random.Random, n_atoms: int, n_rules: int, max_body: int,
                 max_positive: Optional[int] = None, p_negative: float = 0.25):
    names = [f"p{i}" for i in range(n_atoms)]
    rules = []
    for _ in range(n_rules):
        head = rng.choice(names)
        size = rng.randint(0, max_body)
        body = rng.sample(names, min(size, n_atoms))
        pos, neg = [], []
        for x in body:
            if rng.random() < p_negative or (max_positive is not None and len(pos) >= max_positive):
                neg.append(x)
            else:
                pos.append(x)
        rules.append((head, pos, neg))
    return names, rules


def _repair_component_unary(names, rules):
    """Drop positive atoms inside the head's SCC until at most one is left per rule."""
    rules = [(h, list(p), list(n)) for h, p, n in rules]
    while True:
        prog = build_program(rules, extra_atoms=names)
        if classify(prog) != GENERAL:
            return rules
        for i, (h, pos, neg) in enumerate(rules):
            comp = prog.scc_id[prog.atom_index[h]]
            inside = [x for x in pos if prog.scc_id[prog.atom_index[x]] == comp]
            if len(inside) > 1:
                pos.remove(inside[-1])
                break


def layered_rules(rng: random.Random, n_atoms: int, max_body: int, kind: str):
    """Positive cycles per layer, entered from earlier layers by a few rules.

    Uniform random programs almost never leave a loop with a single
    remaining support; this shape does so routinely.
    """
    names = [f"p{i}" for i in range(n_atoms)]
    order = names[:]
    rng.shuffle(order)
    groups = []
    while order:
        k = min(len(order), rng.randint(1, 4))
        groups.append(order[:k])
        order = order[k:]
    max_pos = 1 if kind == UNARY else 2
    rules = []

    def decorate(pos: list[str], earlier: list[str]):
        neg = []
        while len(pos) + len(neg) < max_body and rng.random() < 0.4:
            if earlier and len(pos) < max_pos and rng.random() < 0.5:
                x = rng.choice(earlier)
                if x not in pos:
                    pos.append(x)
            else:
                x = rng.choice(names)
                if x not in neg and x not in pos:
                    neg.append(x)
        return pos, neg

    for gi, group in enumerate(groups):
        earlier = [x for g in groups[:gi] for x in g]
        if len(group) > 1:
            for i, h in enumerate(group):
                rules.append((h, *decorate([group[i - 1]], earlier)))
            for _ in range(rng.randint(0, len(group))):
                h, x = rng.sample(group, 2)
                pos = [x]
                if kind == GENERAL and rng.random() < 0.4:
                    y = rng.choice(group)
                    if y != x:
                        pos.append(y)
                rules.append((h, *decorate(pos, earlier)))
        for _ in range(rng.randint(1, 2)):
            h = rng.choice(group)
            k = rng.randint(0, min(max_pos, len(earlier)))
            rules.append((h, *decorate(rng.sample(earlier, k), earlier)))
    return names, rules


def random_program(seed, n_atoms: int = 6, n_rules: Optional[int] = None, max_body: int = 3,
                   kind: str = "general", style: str = "layered") -> Program:
    """Random ground program; ``kind`` restricts the class (unary, component-unary).

    ``style`` is ``layered`` (see :func:`layered_rules`) or ``uniform``.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    rng = _rng(seed)
    if style == "layered":
        names, rules = layered_rules(rng, n_atoms, max_body, kind)
        if kind == "component-unary":
            rules = _repair_component_unary(names, rules)
        return build_program(rules, extra_atoms=names)
    if style != "uniform":
        raise ValueError(f"unknown style {style!r}")
    if n_rules is None:
        n_rules = rng.randint(n_atoms, 2 * n_atoms + 2)
    names, rules = random_rules(rng, n_atoms, n_rules, max_body,
                                max_positive=1 if kind == UNARY else None)
    if kind == "component-unary":
        rules = _repair_component_unary(names, rules)
    return build_program(rules, extra_atoms=names)


def random_closed_assignment(program: Program, seed, max_decisions: Optional[int] = None) -> Assignment:
    """Conflict-free UP+FL fixpoint reached from random decisions on atoms and bodies."""
    rng = _rng(seed)
    store = completion_nogoods(program)
    a = Assignment(program.num_vars)
    if forward_loop_fixpoint(program, store, a) is not None:
        # no conflict-free extension exists; hand back the bare assignment
        return Assignment(program.num_vars)
    if max_decisions is None:
        max_decisions = rng.randint(1, 4)
    for _ in range(max_decisions):
        free = [v for v in range(program.num_vars) if not a.is_assigned(v)]
        if not free:
            break
        # true atoms and false bodies are what make dominators bite
        atoms = [v for v in free if program.is_atom(v)]
        bodies = [v for v in free if not program.is_atom(v)]
        if atoms and (not bodies or rng.random() < 0.5):
            v = rng.choice(atoms)
            first = T(v) if rng.random() < 0.8 else F(v)
        else:
            v = rng.choice(bodies)
            first = F(v) if rng.random() < 0.8 else T(v)
        for lit in (first, first ^ 1):
            level = a.level
            a.assume(lit)
            if forward_loop_fixpoint(program, store, a) is None:
                break
            a.backtrack(level)
        else:
            break
    # keep the assignment itself but forget decision levels
    out = a.copy()
    out.level_marks = []
    return out


def random_flowgraph(seed, n_nodes: int, density: float = 0.1) -> tuple[list[list[int]], list[list[int]]]:
    """Random digraph rooted at node 0: a random spanning tree plus extra edges."""
    rng = _rng(seed)
    succs: list[list[int]] = [[] for _ in range(n_nodes)]
    order = list(range(1, n_nodes))
    rng.shuffle(order)
    placed = [0]
    for v in order:
        if rng.random() < 0.9:  # a few nodes stay unreachable
            succs[rng.choice(placed)].append(v)
        placed.append(v)
    for u in range(n_nodes):
        for v in range(n_nodes):
            if u != v and v not in succs[u] and rng.random() < density:
                succs[u].append(v)
    preds: list[list[int]] = [[] for _ in range(n_nodes)]
    for u in range(n_nodes):
        for v in succs[u]:
            preds[v].append(u)
    return preds, succs
