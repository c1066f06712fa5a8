"""Ground normal logic programs: parsing, indexing and structural analysis.

Atoms and bodies share one node/variable numbering: atoms occupy
``0 .. n-1`` and bodies ``n .. n+m-1``, both in first-occurrence order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

UNARY = "unary"
COMPONENT_UNARY = "component-unary"
GENERAL = "general"


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Body:
    var: int
    positive: tuple[int, ...]
    negative: tuple[int, ...]

    @property
    def pos_set(self) -> frozenset[int]:
        return frozenset(self.positive)

    @property
    def neg_set(self) -> frozenset[int]:
        return frozenset(self.negative)


@dataclass(frozen=True)
class Rule:
    head: int
    body: int  # body variable id


class Program:
    """An immutable, fully indexed ground normal program.

    Build one with :func:`parse_program` or :func:`build_program`.
    """

    def __init__(self, atom_names: list[str], body_literals: list[tuple[tuple[int, ...], tuple[int, ...]]],
                 rules: list[tuple[int, int]]):
        self.atom_names = list(atom_names)
        self.atom_index = {name: i for i, name in enumerate(self.atom_names)}
        n = self.num_atoms = len(self.atom_names)
        self.num_bodies = len(body_literals)
        self.num_vars = n + self.num_bodies
        self.bodies = [Body(n + j, pos, neg) for j, (pos, neg) in enumerate(body_literals)]
        self.body_index = {(frozenset(b.positive), frozenset(b.negative)): b.var for b in self.bodies}
        self.rules = [Rule(h, n + j) for h, j in rules]

        self.bodies_of: list[list[int]] = [[] for _ in range(n)]
        self.heads_of: dict[int, list[int]] = {b.var: [] for b in self.bodies}
        for r in self.rules:
            self.bodies_of[r.head].append(r.body)
            self.heads_of[r.body].append(r.head)
        self.pos_occ: list[list[int]] = [[] for _ in range(n)]
        self.neg_occ: list[list[int]] = [[] for _ in range(n)]
        for b in self.bodies:
            for p in b.positive:
                self.pos_occ[p].append(b.var)
            for p in b.negative:
                self.neg_occ[p].append(b.var)

        self.scc_id = scc_decompose(self)
        members: dict[int, list[int]] = {}
        for v, c in enumerate(self.scc_id):
            members.setdefault(c, []).append(v)
        self.scc_members = members
        # phi(beta): positive atoms of beta inside beta's component, or all of beta+ if none are
        self.phi: dict[int, tuple[int, ...]] = {}
        for b in self.bodies:
            inside = tuple(p for p in b.positive if self.scc_id[p] == self.scc_id[b.var])
            self.phi[b.var] = inside if inside else b.positive
        self.classification = classify(self)

    def is_atom(self, v: int) -> bool:
        return v < self.num_atoms

    def body(self, v: int) -> Body:
        return self.bodies[v - self.num_atoms]

    def scc_atoms(self, v: int) -> list[int]:
        """Atoms sharing ``v``'s strongly connected component (``scc(beta)`` for a body)."""
        return [u for u in self.scc_members[self.scc_id[v]] if u < self.num_atoms]

    def atom_sccs(self) -> list[list[int]]:
        out = []
        for members in self.scc_members.values():
            atoms = [u for u in members if u < self.num_atoms]
            if atoms:
                out.append(atoms)
        return out

    def body_name(self, v: int) -> str:
        b = self.body(v)
        parts = [self.atom_names[p] for p in b.positive] + ["not " + self.atom_names[p] for p in b.negative]
        return "{" + ",".join(parts) + "}"

    def var_name(self, v: int) -> str:
        return self.atom_names[v] if v < self.num_atoms else self.body_name(v)

    def find_body(self, positive: Iterable[str], negative: Iterable[str]) -> Optional[int]:
        try:
            key = (frozenset(self.atom_index[a] for a in positive), frozenset(self.atom_index[a] for a in negative))
        except KeyError:
            return None
        return self.body_index.get(key)

    def rule_triples(self) -> list[tuple[str, list[str], list[str]]]:
        out = []
        for r in self.rules:
            b = self.body(r.body)
            out.append((self.atom_names[r.head], [self.atom_names[p] for p in b.positive],
                        [self.atom_names[p] for p in b.negative]))
        return out

    def __repr__(self) -> str:
        return f"<Program atoms={self.num_atoms} bodies={self.num_bodies} rules={len(self.rules)}>"

    def __str__(self) -> str:
        return format_program(self)


def build_program(rules: Iterable[tuple[str, Sequence[str], Sequence[str]]],
                  extra_atoms: Iterable[str] = ()) -> Program:
    """Build a program from ``(head, positive, negative)`` name triples.

    Duplicate rules collapse. ``extra_atoms`` declares atoms that occur in no
    rule; they are always false.
    """
    atom_index: dict[str, int] = {}
    names: list[str] = []

    def atom(name: str) -> int:
        i = atom_index.get(name)
        if i is None:
            i = atom_index[name] = len(names)
            names.append(name)
        return i

    body_index: dict[tuple[frozenset[int], frozenset[int]], int] = {}
    body_literals: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    rule_list: list[tuple[int, int]] = []
    seen_rules: set[tuple[int, int]] = set()
    for head, pos, neg in rules:
        h = atom(head)
        p = tuple(dict.fromkeys(atom(x) for x in pos))
        q = tuple(dict.fromkeys(atom(x) for x in neg))
        key = (frozenset(p), frozenset(q))
        j = body_index.get(key)
        if j is None:
            j = body_index[key] = len(body_literals)
            body_literals.append((p, q))
        if (h, j) not in seen_rules:
            seen_rules.add((h, j))
            rule_list.append((h, j))
    for name in extra_atoms:
        atom(name)
    return Program(names, body_literals, rule_list)


_IDENT = re.compile(r"[a-z][A-Za-z0-9_']*")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def position(self, i: Optional[int] = None) -> tuple[int, int]:
        i = self.i if i is None else i
        line = self.text.count("\n", 0, i) + 1
        col = i - (self.text.rfind("\n", 0, i) + 1) + 1
        return line, col

    def error(self, message: str, i: Optional[int] = None) -> ParseError:
        return ParseError(message, *self.position(i))

    def skip(self) -> None:
        text = self.text
        while self.i < len(text):
            ch = text[self.i]
            if ch.isspace():
                self.i += 1
            elif ch == "%":
                nl = text.find("\n", self.i)
                self.i = len(text) if nl < 0 else nl + 1
            else:
                break

    def at_end(self) -> bool:
        self.skip()
        return self.i >= len(self.text)

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.i)

    def expect(self, s: str) -> None:
        if not self.peek(s):
            raise self.error(f"expected {s!r}")
        self.i += len(s)

    def atom(self) -> str:
        self.skip()
        m = _IDENT.match(self.text, self.i)
        if not m:
            raise self.error("expected atom")
        if m.group() == "not":
            raise self.error("'not' is reserved and cannot name an atom")
        self.i = m.end()
        name = m.group()
        if self.i < len(self.text) and self.text[self.i] == "(":
            start = self.i
            depth = 0
            while self.i < len(self.text):
                ch = self.text[self.i]
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    depth -= 1
                    if depth == 0:
                        break
                self.i += 1
            if depth != 0:
                raise self.error("unbalanced parenthesis", start)
            self.i += 1
            args = "".join(self.text[start:self.i].split())
            name += args
        return name

    def literal(self) -> tuple[bool, str]:
        self.skip()
        m = re.compile(r"not\s+(?=[a-z])").match(self.text, self.i)
        if m:
            self.i = m.end()
            return False, self.atom()
        return True, self.atom()


def parse_rules(text: str) -> list[tuple[str, list[str], list[str]]]:
    sc = _Scanner(text)
    rules = []
    while not sc.at_end():
        head = sc.atom()
        pos: list[str] = []
        neg: list[str] = []
        if sc.peek(":-"):
            sc.expect(":-")
            while True:
                positive, name = sc.literal()
                (pos if positive else neg).append(name)
                if sc.peek(","):
                    sc.expect(",")
                    continue
                break
        sc.expect(".")
        rules.append((head, pos, neg))
    return rules


def parse_program(text: str) -> Program:
    """Parse the flat ground rule format.

    >>> parse_program("a :- not b. b :- not a.").num_bodies
    2
    """
    return build_program(parse_rules(text))


def format_program(program: Program) -> str:
    lines = []
    for head, pos, neg in program.rule_triples():
        lits = pos + ["not " + a for a in neg]
        lines.append(f"{head} :- {', '.join(lits)}." if lits else f"{head}.")
    return "\n".join(lines) + ("\n" if lines else "")


def dependency_graph(program: Program) -> list[list[int]]:
    """Successor lists of dg(P) over atom and body nodes.

    Edges run body(r) -> head(r) and q -> body(r) for every q in pbody(r).
    """
    succ: list[list[int]] = [[] for _ in range(program.num_vars)]
    for r in program.rules:
        succ[r.body].append(r.head)
    for b in program.bodies:
        for p in b.positive:
            succ[p].append(b.var)
    return succ


def scc_decompose(program: Program) -> list[int]:
    """Component id per node of the dependency graph (iterative Tarjan)."""
    succ = dependency_graph(program)
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


def classify(program: Program) -> str:
    unary = True
    for r in program.rules:
        b = program.body(r.body)
        if len(b.positive) > 1:
            unary = False
            inside = sum(1 for p in b.positive if program.scc_id[p] == program.scc_id[r.body])
            if inside > 1:
                return GENERAL
    return UNARY if unary else COMPONENT_UNARY


def external_support(program: Program, atoms: Iterable[int], assignment=None) -> set[int]:
    """Body ids of ``es(U)``, minus bodies false in ``assignment`` if given."""
    u = set(atoms)
    out = set()
    for r in program.rules:
        if r.head in u and not (program.body(r.body).pos_set & u):
            if assignment is None or not assignment.is_false(r.body):
                out.add(r.body)
    return out
