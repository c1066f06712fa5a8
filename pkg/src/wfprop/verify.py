"""Randomized cross-checks of the propagators against the brute-force oracle.

Each ``check_*`` function returns a list of :class:`Violation`; empty means
the property held. :func:`run_suites` drives them over seeded inputs and
shrinks the first failure of every suite to a small reproducer.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .flowgraph import build_flowgraph, compute_dominators, dominator_consequences
from .generators import random_closed_assignment, random_program
from .oracle import ALL, LOOPS, enumerate_answer_sets, wfd_oracle, wfj_oracle
from .program import COMPONENT_UNARY, UNARY, Program, build_program, format_program
from .propagation import Assignment, Literal, completion_nogoods, format_literal
from .reachability import ReachInstance, check_domain_consistency, format_instance, random_instance
from .solver import SolverConfig, solve
from .unfounded import forward_loop_fixpoint

RuleTriple = tuple[str, list[str], list[str]]

ANSWER_SET_CONFIGS = ("up", "up,fl", "up,fl,dom", "up,blprobe", "up,fl,blprobe", "up,fl,dom,blprobe")

# (suite name, fix_mode, props expected to reach domain consistency)
DC_SUITES = (
    ("dc-fixed-graph", "GS", ("up,fl",)),
    ("dc-fixed-reached", "N", ("up,blprobe", "up,fl,dom")),
    ("dc-open", "none", ("up,fl,dom",)),
)


@dataclass
class Violation:
    suite: str
    message: str
    reproducer: str = ""

    def __str__(self) -> str:
        text = f"[{self.suite}] {self.message}"
        return text + ("\n" + self.reproducer if self.reproducer else "")


def dom_consequences(program: Program, a: Assignment) -> set[Literal]:
    tree = compute_dominators(build_flowgraph(program, a))
    return {c.literal for c in dominator_consequences(program, a, tree)}


def _open(a: Assignment, lits: Iterable[Literal]) -> set[Literal]:
    """Drop literals whose variable is already true (nothing left to infer)."""
    return {l for l in lits if not a.is_true(l >> 1)}


def _names(program: Program, lits: Iterable[Literal]) -> str:
    return "{" + ", ".join(sorted(format_literal(program, l) for l in lits)) + "}"


def check_soundness(program: Program, a: Assignment) -> list[Violation]:
    cons = dom_consequences(program, a)
    oracle = wfj_oracle(program, a, ALL) | wfd_oracle(program, a, ALL)
    extra = cons - oracle
    if extra:
        return [Violation("soundness", f"not justified by the oracle: {_names(program, extra)}")]
    return []


def check_exactness(program: Program, a: Assignment, parts: Sequence[str] = ("bl", "ld", "wfj", "wfd")) -> list[Violation]:
    """Completeness on component-unary programs, equality on unary ones."""
    out = []
    cons = dom_consequences(program, a)
    bodies = {l for l in cons if not program.is_atom(l >> 1)}
    atoms = cons - bodies
    if program.classification in (UNARY, COMPONENT_UNARY):
        for part, oracle in (("bl", wfj_oracle), ("ld", wfd_oracle)):
            if part not in parts:
                continue
            missing = _open(a, oracle(program, a, LOOPS)) - cons
            if missing:
                out.append(Violation(f"exactness-{part}", f"missed {_names(program, missing)}"))
    if program.classification == UNARY:
        for part, oracle, got in (("wfj", wfj_oracle, bodies), ("wfd", wfd_oracle, atoms)):
            if part not in parts:
                continue
            want = _open(a, oracle(program, a, ALL))
            if want != got:
                out.append(Violation(f"exactness-{part}", f"oracle {_names(program, want)} vs dominators "
                                                          f"{_names(program, got)}"))
    return out


def check_answer_sets(program: Program, configs: Sequence[str] = ANSWER_SET_CONFIGS) -> list[Violation]:
    truth = sorted(sorted(s) for s in enumerate_answer_sets(program))
    out = []
    for props in configs:
        got = sorted(sorted(s) for s in solve(program, SolverConfig.parse(props)).answer_sets)
        if got != truth:
            out.append(Violation("answer-sets", f"props={props}: solver {got} vs oracle {truth}"))
    return out


def check_dc(inst: ReachInstance, props: str, expect_dc: bool = True) -> list[Violation]:
    report = check_domain_consistency(inst, SolverConfig.parse(props))
    out = []
    for e in report.unsound:
        out.append(Violation("dc-unsound", f"props={props}: pruned supported {e.variable} {e.value}"))
    if expect_dc:
        for e in report.missed:
            out.append(Violation("dc-missed", f"props={props}: kept unsupported {e.variable} {e.value}"))
    return out


# -- shrinking -------------------------------------------------------------

def literal_names(program: Program, a: Assignment) -> list[tuple[bool, str]]:
    return [(not l & 1, program.var_name(l >> 1)) for l in a.trail]


def rebuild_assignment(program: Program, named: Sequence[tuple[bool, str]]) -> Optional[Assignment]:
    """Re-apply named literals that still exist, then close under UP+FL."""
    a = Assignment(program.num_vars)
    for sign, name in named:
        v = program.atom_index.get(name)
        if v is None and name.startswith("{"):
            parts = [x for x in name[1:-1].split(",") if x]
            v = program.find_body([x for x in parts if not x.startswith("not ")],
                                  [x[4:] for x in parts if x.startswith("not ")])
        if v is None or a.is_assigned(v):
            continue
        a.assign(2 * v + (0 if sign else 1))
    if forward_loop_fixpoint(program, completion_nogoods(program), a) is not None:
        return None
    return a


def minimize_rules(rules: list[RuleTriple], failing: Callable[[list[RuleTriple]], bool]) -> list[RuleTriple]:
    """Greedy one-rule-at-a-time removal while ``failing`` keeps holding."""
    rules = list(rules)
    changed = True
    while changed:
        changed = False
        for i in range(len(rules)):
            trial = rules[:i] + rules[i + 1:]
            if failing(trial):
                rules = trial
                changed = True
                break
    return rules


def _reproduce_program(program: Program, a: Optional[Assignment],
                       check: Callable[[Program, Optional[Assignment]], list[Violation]]) -> str:
    named = literal_names(program, a) if a is not None else []

    def failing(rules: list[RuleTriple]) -> bool:
        p = build_program(rules)
        b = rebuild_assignment(p, named) if a is not None else None
        if a is not None and b is None:
            return False
        return bool(check(p, b))

    small = build_program(minimize_rules(program.rule_triples(), failing))
    text = format_program(small)
    if a is not None:
        b = rebuild_assignment(small, named)
        text += "% assignment: " + _names(small, b.trail if b else []) + "\n"
    return text


# -- suite driver ----------------------------------------------------------

@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def run_suites(seed: int = 0, count: int = 100, suites: Optional[Sequence[str]] = None,
               minimize: bool = True) -> list[SuiteResult]:
    """Run the randomized suites; ``count`` cases each."""
    names = ["soundness", "exactness-component-unary", "exactness-unary", "answer-sets"] + [s[0] for s in DC_SUITES]
    if suites is not None:
        names = [n for n in names if n in suites]
    results = []
    for name in names:
        res = SuiteResult(name)
        rng = random.Random(f"{seed}:{name}")
        for _ in range(count):
            case_seed = rng.randrange(1 << 30)
            res.cases += 1
            found = _run_case(name, case_seed, minimize and not res.violations)
            res.violations.extend(found)
        results.append(res)
    return results


def _run_case(name: str, seed: int, minimize: bool) -> list[Violation]:
    rng = random.Random(seed)
    if name.startswith("dc-"):
        _, mode, configs = next(s for s in DC_SUITES if s[0] == name)
        inst = random_instance(seed, rng.randint(1, 6), rng.choice((0.2, 0.3, 0.4)), rng.choice((0.3, 0.5, 0.7)), mode)
        found = [v for props in configs for v in check_dc(inst, props)]
        for v in found:
            v.reproducer = format_instance(inst)
        return found
    if name == "answer-sets":
        program = random_program(rng, n_atoms=rng.randint(1, 10), style=rng.choice(("layered", "uniform")))
        found = check_answer_sets(program)
        if found and minimize:
            found[0].reproducer = _reproduce_program(program, None, lambda p, _a: check_answer_sets(p))
        return found
    kind = {"soundness": "general", "exactness-component-unary": "component-unary",
            "exactness-unary": "unary"}[name]
    program = random_program(rng, n_atoms=rng.randint(2, 12), kind=kind, style=rng.choice(("layered", "layered", "uniform")))
    a = random_closed_assignment(program, rng)
    check = check_soundness if name == "soundness" else check_exactness
    found = check(program, a)
    if found and minimize:
        found[0].reproducer = _reproduce_program(program, a, check)
    return found
