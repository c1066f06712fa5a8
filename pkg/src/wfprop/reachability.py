"""reach(G, S) encodings and domain-consistency checking of reachable(G, S, N).

Edge and start memberships that are still open are encoded with the
even-negation choice idiom; fixed ``reached`` values become assumptions.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .oracle import GuardExceeded
from .program import Program, build_program
from .propagation import Assignment, F, Literal, T, completion_nogoods
from .solver import SolverConfig, assign_assumptions, propagate_fixpoint

NODE_GUARD = 8
OPEN_GUARD = 18

Edge = tuple[str, str]


@dataclass(frozen=True)
class ReachInstance:
    nodes: tuple[str, ...]
    edge_lb: frozenset[Edge]
    edge_ub: frozenset[Edge]
    start_lb: frozenset[str]
    start_ub: frozenset[str]
    reached_lb: frozenset[str]
    reached_ub: frozenset[str]

    def __post_init__(self):
        for lb, ub, what in ((self.edge_lb, self.edge_ub, "edge"), (self.start_lb, self.start_ub, "start"),
                             (self.reached_lb, self.reached_ub, "reached")):
            if not lb <= ub:
                raise ValueError(f"{what} lower bound is not within the upper bound")
        known = set(self.nodes)
        if any(u not in known or v not in known for u, v in self.edge_ub) or not self.start_ub <= known \
                or not self.reached_ub <= known:
            raise ValueError("bounds mention unknown nodes")

    @classmethod
    def create(cls, nodes: Iterable[str], edge_lb=(), edge_ub=(), start_lb=(), start_ub=(),
               reached_lb=(), reached_ub=None) -> "ReachInstance":
        nodes = tuple(nodes)
        return cls(nodes, frozenset(edge_lb), frozenset(edge_ub) | frozenset(edge_lb), frozenset(start_lb),
                   frozenset(start_ub) | frozenset(start_lb), frozenset(reached_lb),
                   frozenset(nodes if reached_ub is None else reached_ub))

    def ordered_edges(self, edges: Iterable[Edge]) -> list[Edge]:
        pos = {v: i for i, v in enumerate(self.nodes)}
        return sorted(edges, key=lambda e: (pos[e[0]], pos[e[1]]))

    def ordered_nodes(self, nodes: Iterable[str]) -> list[str]:
        s = set(nodes)
        return [v for v in self.nodes if v in s]

    @property
    def graph_fixed(self) -> bool:
        return self.edge_lb == self.edge_ub

    @property
    def start_fixed(self) -> bool:
        return self.start_lb == self.start_ub

    @property
    def reached_fixed(self) -> bool:
        return self.reached_lb == self.reached_ub

    def open_edges(self) -> list[Edge]:
        return self.ordered_edges(self.edge_ub - self.edge_lb)

    def open_starts(self) -> list[str]:
        return self.ordered_nodes(self.start_ub - self.start_lb)

    def open_reached(self) -> list[str]:
        return self.ordered_nodes(self.reached_ub - self.reached_lb)


def edge_atom(u: str, v: str) -> str:
    return f"edge({u},{v})"


def start_atom(v: str) -> str:
    return f"start({v})"


def reached_atom(v: str) -> str:
    return f"reached({v})"


def encode_reach(inst: ReachInstance) -> tuple[Program, list[Literal]]:
    rules: list[tuple[str, list[str], list[str]]] = []
    for x in inst.ordered_nodes(inst.start_ub):
        rules.append((reached_atom(x), [start_atom(x)], []))
    for y, x in inst.ordered_edges(inst.edge_ub):
        rules.append((reached_atom(x), [reached_atom(y), edge_atom(y, x)], []))
    for x in inst.ordered_nodes(inst.start_ub):
        if x in inst.start_lb:
            rules.append((start_atom(x), [], []))
        else:
            rules.append((start_atom(x), [], [f"nstart({x})"]))
            rules.append((f"nstart({x})", [], [start_atom(x)]))
    for y, x in inst.ordered_edges(inst.edge_ub):
        if (y, x) in inst.edge_lb:
            rules.append((edge_atom(y, x), [], []))
        else:
            rules.append((edge_atom(y, x), [], [f"nedge({y},{x})"]))
            rules.append((f"nedge({y},{x})", [], [edge_atom(y, x)]))
    program = build_program(rules, extra_atoms=[reached_atom(v) for v in inst.nodes])
    assumptions = []
    for v in inst.nodes:
        p = program.atom_index[reached_atom(v)]
        if v in inst.reached_lb:
            assumptions.append(T(p))
        elif v not in inst.reached_ub:
            assumptions.append(F(p))
    return program, assumptions


def reachable_set(nodes: Iterable[str], edges: Iterable[Edge], starts: Iterable[str]) -> set[str]:
    succ: dict[str, list[str]] = {v: [] for v in nodes}
    for u, v in edges:
        succ[u].append(v)
    seen = set(starts)
    todo = deque(seen)
    while todo:
        u = todo.popleft()
        for v in succ[u]:
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def completions(inst: ReachInstance):
    """Yield every ``(edges, starts, reached)`` completion that satisfies the bounds on N."""
    open_edges = inst.open_edges()
    open_starts = inst.open_starts()
    for echoice in itertools.product((False, True), repeat=len(open_edges)):
        edges = set(inst.edge_lb) | {e for e, on in zip(open_edges, echoice) if on}
        for schoice in itertools.product((False, True), repeat=len(open_starts)):
            starts = set(inst.start_lb) | {v for v, on in zip(open_starts, schoice) if on}
            r = reachable_set(inst.nodes, edges, starts)
            if inst.reached_lb <= r <= inst.reached_ub:
                yield edges, starts, r


@dataclass
class DCEntry:
    variable: str
    value: str  # "in" or "out"
    supported: bool
    pruned: bool

    @property
    def verdict(self) -> str:
        if self.supported and self.pruned:
            return "unsound_pruning"
        if not self.supported and not self.pruned:
            return "missed_pruning"
        return "consistent"


@dataclass
class DCReport:
    props: str
    entries: list[DCEntry] = field(default_factory=list)
    root_conflict: bool = False

    def of(self, verdict: str) -> list[DCEntry]:
        return [e for e in self.entries if e.verdict == verdict]

    @property
    def missed(self) -> list[DCEntry]:
        return self.of("missed_pruning")

    @property
    def unsound(self) -> list[DCEntry]:
        return self.of("unsound_pruning")

    @property
    def domain_consistent(self) -> bool:
        return not self.missed and not self.unsound

    def counts(self) -> dict[str, int]:
        out = {"consistent": 0, "missed_pruning": 0, "unsound_pruning": 0}
        for e in self.entries:
            out[e.verdict] += 1
        return out

    def to_dict(self) -> dict:
        return {
            "props": self.props,
            "root_conflict": self.root_conflict,
            "counts": self.counts(),
            "entries": [{"variable": e.variable, "value": e.value, "supported": e.supported,
                         "pruned": e.pruned, "verdict": e.verdict} for e in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def check_domain_consistency(inst: ReachInstance, config: SolverConfig,
                             node_guard: int = NODE_GUARD, open_guard: int = OPEN_GUARD) -> DCReport:
    if len(inst.nodes) > node_guard:
        raise GuardExceeded(f"{len(inst.nodes)} nodes exceeds guard {node_guard}")
    n_open = len(inst.open_edges()) + len(inst.open_starts())
    if n_open > open_guard:
        raise GuardExceeded(f"{n_open} open edge/start memberships exceed guard {open_guard}")

    variables = [(edge_atom(*e), lambda c, e=e: e in c[0]) for e in inst.open_edges()]
    variables += [(start_atom(v), lambda c, v=v: v in c[1]) for v in inst.open_starts()]
    variables += [(reached_atom(v), lambda c, v=v: v in c[2]) for v in inst.open_reached()]
    supported = {(name, val): False for name, _ in variables for val in ("in", "out")}
    for c in completions(inst):
        for name, member in variables:
            supported[(name, "in" if member(c) else "out")] = True

    program, assumptions = encode_reach(inst)
    store = completion_nogoods(program)
    a = Assignment(program.num_vars)
    conflict = assign_assumptions(a, assumptions)
    if conflict is None:
        conflict = propagate_fixpoint(program, store, a, config)
    report = DCReport(config.props, root_conflict=conflict is not None)
    for name, _ in variables:
        p = program.atom_index[name]
        for val in ("in", "out"):
            if conflict is not None:
                pruned = True
            else:
                pruned = a.is_false(p) if val == "in" else a.is_true(p)
            report.entries.append(DCEntry(name, val, supported[(name, val)], pruned))
    return report


def _split(rng: random.Random, items: list, witness: set, fixed_fraction: float):
    """Fix a random share of ``items`` to their witness membership; returns (lb, ub)."""
    lb, ub = set(), set()
    for x in items:
        if rng.random() < fixed_fraction:
            if x in witness:
                lb.add(x)
                ub.add(x)
        else:
            ub.add(x)
    return lb, ub


def random_instance(seed: int, n_nodes: int, edge_density: float = 0.4, fixed_fraction: float = 0.5,
                    fix_mode: str = "none") -> ReachInstance:
    """Seeded instance generator with a satisfying witness built in.

    ``fix_mode``: ``GS`` fixes graph and start set, ``N`` fixes the reached
    set, ``none`` fixes no variable completely but narrows all three.
    """
    if n_nodes < 1:
        raise ValueError("need at least one node")
    if fix_mode not in ("GS", "N", "none"):
        raise ValueError(f"unknown fix_mode {fix_mode!r}")
    rng = random.Random(seed)
    nodes = [f"n{i}" for i in range(n_nodes)]
    candidates = [(u, v) for u in nodes for v in nodes if u != v and rng.random() < edge_density]
    start_ub = [v for v in nodes if rng.random() < 0.5] or [rng.choice(nodes)]
    g0 = {e for e in candidates if rng.random() < 0.5}
    s0 = {v for v in start_ub if rng.random() < 0.5}
    n0 = reachable_set(nodes, g0, s0)
    if fix_mode == "GS":
        return ReachInstance.create(nodes, g0, g0, s0, s0)
    edge_lb, edge_ub = _split(rng, candidates, g0, fixed_fraction)
    start_lb, start_ub = _split(rng, start_ub, s0, fixed_fraction)
    if fix_mode == "N":
        return ReachInstance.create(nodes, edge_lb, edge_ub, start_lb, start_ub, n0, n0)
    reached_lb, reached_ub = _split(rng, nodes, n0, fixed_fraction)
    return ReachInstance.create(nodes, edge_lb, edge_ub, start_lb, start_ub, reached_lb, reached_ub)


def parse_instance(text: str) -> ReachInstance:
    nodes: list[str] = []
    edges: dict[Edge, str] = {}
    starts: dict[str, str] = {}
    reached: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "nodes":
                if len(parts) == 2 and parts[1].isdigit():
                    nodes = [f"n{i}" for i in range(int(parts[1]))]
                else:
                    nodes = parts[1:]
            elif kind == "edge" and len(parts) == 4 and parts[3] in ("in", "maybe"):
                edges[(parts[1], parts[2])] = parts[3]
            elif kind == "start" and len(parts) == 3 and parts[2] in ("in", "maybe"):
                starts[parts[1]] = parts[2]
            elif kind == "reached" and len(parts) == 3 and parts[2] in ("in", "out", "maybe"):
                reached[parts[1]] = parts[2]
            else:
                raise ValueError(f"bad record {line!r}")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return ReachInstance.create(
        nodes,
        edge_lb=[e for e, s in edges.items() if s == "in"], edge_ub=edges,
        start_lb=[v for v, s in starts.items() if s == "in"], start_ub=starts,
        reached_lb=[v for v, s in reached.items() if s == "in"],
        reached_ub=[v for v in nodes if reached.get(v) != "out"])


def format_instance(inst: ReachInstance) -> str:
    lines = ["nodes " + " ".join(inst.nodes)]
    for e in inst.ordered_edges(inst.edge_ub):
        lines.append(f"edge {e[0]} {e[1]} {'in' if e in inst.edge_lb else 'maybe'}")
    for v in inst.ordered_nodes(inst.start_ub):
        lines.append(f"start {v} {'in' if v in inst.start_lb else 'maybe'}")
    for v in inst.nodes:
        if v in inst.reached_lb:
            lines.append(f"reached {v} in")
        elif v not in inst.reached_ub:
            lines.append(f"reached {v} out")
    return "\n".join(lines) + "\n"


def counterexample_instance() -> ReachInstance:
    """Fixed N = {s, u, v}; the loop u <-> v can only be entered through (s, u)."""
    return ReachInstance.create(
        ["s", "u", "v"],
        edge_lb=[("u", "v"), ("v", "u")], edge_ub=[("u", "v"), ("v", "u"), ("s", "u")],
        start_lb=["s"], start_ub=["s"],
        reached_lb=["s", "u", "v"], reached_ub=["s", "u", "v"])


def loop_chain_instance(seed: int, n_loops: int = 4, loop_size: int = 2, entries: int = 2) -> ReachInstance:
    """Search instance made of fixed cycles joined by open entry edges.

    Every node must be reached from the first node of cycle 0; each later
    cycle gets ``entries`` random candidate edges from earlier cycles. A
    cycle left with a single open entry needs that edge, which unfounded-set
    falsification alone does not infer.
    """
    if n_loops < 1 or loop_size < 1:
        raise ValueError("need at least one cycle of at least one node")
    rng = random.Random(seed)
    cycles = [[f"c{i}n{j}" for j in range(loop_size)] for i in range(n_loops)]
    nodes = [v for c in cycles for v in c]
    fixed = {(c[j], c[(j + 1) % loop_size]) for c in cycles for j in range(loop_size) if loop_size > 1}
    candidates = set()
    for i in range(1, n_loops):
        sources = [v for c in cycles[:i] for v in c]
        for _ in range(entries):
            candidates.add((rng.choice(sources), rng.choice(cycles[i])))
    root = cycles[0][0]
    return ReachInstance.create(nodes, fixed, fixed | candidates, [root], [root], nodes, nodes)
