"""Command-line frontend: parse, solve, propagate, check-dc, bench, verify, dump."""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .flowgraph import DomReason, build_flowgraph, compute_dominators, to_dot
from .oracle import GuardExceeded
from .program import ParseError, Program, parse_program
from .propagation import Assignment, F, Literal, T, completion_nogoods
from .reachability import (ReachInstance, check_domain_consistency, encode_reach, loop_chain_instance,
                           parse_instance)
from .solver import PROPAGATORS, SolverConfig, assign_assumptions, propagate_fixpoint, solve
from .verify import run_suites

EXIT_SAT = 0
EXIT_ERROR = 1
EXIT_GUARD = 2
EXIT_UNSAT = 20


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def default_seed() -> int:
    raw = os.environ.get("WFPROP_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"WFPROP_SEED must be an integer, got {raw!r}") from None


def read_program(path: str) -> Program:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        return parse_program(text)
    except ParseError as exc:
        raise UsageError(f"{path}:{exc}") from None


def split_assumptions(spec: str) -> list[str]:
    """Split ``t:a,f:{b,not c}`` at commas outside braces."""
    items, depth, cur = [], 0, []
    for ch in spec:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "," and depth == 0:
            items.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    items.append("".join(cur))
    return [s.strip() for s in items if s.strip()]


def parse_assumption(program: Program, item: str) -> Literal:
    sign, sep, ref = item.partition(":")
    if not sep or sign.lower() not in ("t", "f"):
        raise UsageError(f"bad assumption {item!r}; expected t:ref or f:ref")
    ref = ref.strip()
    if ref.startswith("{") and ref.endswith("}"):
        pos, neg = [], []
        for part in (x.strip() for x in ref[1:-1].split(",") if x.strip()):
            if part.startswith("not "):
                neg.append(part[4:].strip())
            else:
                pos.append(part)
        v = program.find_body(pos, neg)
        if v is None:
            raise UsageError(f"no body {ref} in the program")
    else:
        v = program.atom_index.get(ref)
        if v is None:
            raise UsageError(f"unknown atom {ref!r}")
    return T(v) if sign.lower() == "t" else F(v)


def parse_assumptions(program: Program, specs: Optional[Sequence[str]]) -> list[Literal]:
    out = []
    for spec in specs or ():
        out.extend(parse_assumption(program, item) for item in split_assumptions(spec))
    return out


def make_config(args, **kw) -> SolverConfig:
    try:
        return SolverConfig.parse(args.props, **kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def format_answer(program: Program, s) -> str:
    return " ".join(sorted(program.atom_names[p] for p in s))


# -- commands ---------------------------------------------------------------

def cmd_parse(args) -> int:
    program = read_program(args.file)
    if args.json:
        print(json.dumps({
            "atoms": program.atom_names,
            "bodies": [program.body_name(b.var) for b in program.bodies],
            "rules": [{"head": h, "positive": p, "negative": n} for h, p, n in program.rule_triples()],
            "class": program.classification,
            "sccs": sorted(sorted(program.atom_names[p] for p in c) for c in program.atom_sccs()),
        }, indent=2))
        return EXIT_SAT
    sys.stdout.write(str(program))
    print(f"% atoms: {program.num_atoms}  bodies: {program.num_bodies}  rules: {len(program.rules)}")
    print(f"% class: {program.classification}")
    for comp in program.atom_sccs():
        if len(comp) > 1:
            print("% component: " + " ".join(sorted(program.atom_names[p] for p in comp)))
    return EXIT_SAT


def solve_record(name: str, program: Program, config: SolverConfig, assumptions=()) -> dict:
    result = solve(program, config, assumptions)
    st = result.stats
    return {
        "instance": name,
        "props": config.props,
        "answer_sets": [sorted(program.atom_names[p] for p in s) for s in result.answer_sets],
        "branches": st.branches,
        "conflicts": st.conflicts,
        "time_ms": int(round(st.time * 1000)),
        "inferences": {k: st.inferences[k] for k in PROPAGATORS},
        "complete": result.complete,
    }


def cmd_solve(args) -> int:
    program = read_program(args.file)
    config = make_config(args, heuristic=args.heuristic, seed=args.seed if args.seed is not None else default_seed(),
                         enum_limit=args.enum, time_budget=args.time_budget)
    assumptions = parse_assumptions(program, args.assume)
    rec = solve_record(args.file, program, config, assumptions)
    if args.json:
        print(json.dumps(rec, indent=2))
    else:
        for i, s in enumerate(rec["answer_sets"], 1):
            print(f"Answer {i}: {' '.join(s)}")
        status = "SATISFIABLE" if rec["answer_sets"] else ("UNSATISFIABLE" if rec["complete"] else "UNKNOWN")
        print(status)
        print(f"Models     : {len(rec['answer_sets'])}{'' if rec['complete'] else '+'}")
        print(f"Branches   : {rec['branches']}")
        print(f"Conflicts  : {rec['conflicts']}")
        print(f"Time       : {rec['time_ms']} ms")
        print("Inferences : " + " ".join(f"{k}={v}" for k, v in rec["inferences"].items()))
    if rec["answer_sets"]:
        return EXIT_SAT
    return EXIT_UNSAT if rec["complete"] else EXIT_GUARD


def explain(program: Program, reason) -> str:
    if reason is None:
        return ""
    if isinstance(reason, tuple):
        return "nogood {" + ", ".join(("T" if not l & 1 else "F") + program.var_name(l >> 1) for l in reason) + "}"
    if hasattr(reason, "describe"):
        return reason.describe(program)
    return str(reason)


def cmd_propagate(args) -> int:
    program = read_program(args.file)
    config = make_config(args)
    store = completion_nogoods(program)
    a = Assignment(program.num_vars)
    conflict = assign_assumptions(a, parse_assumptions(program, args.assume))
    if conflict is None:
        conflict = propagate_fixpoint(program, store, a, config)
    for lit, reason, source in zip(a.trail, a.reasons, a.sources):
        line = f"{program.var_name(lit >> 1)}={'F' if lit & 1 else 'T'} ({source})"
        if args.explain and source != "assume":
            line += "  because " + explain(program, reason)
        print(line)
    if conflict is not None:
        print(f"CONFLICT ({conflict.source}): {conflict.describe(program)}")
        return EXIT_UNSAT
    return EXIT_SAT


def read_instance(path: str) -> ReachInstance:
    try:
        return parse_instance(Path(path).read_text())
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_check_dc(args) -> int:
    inst = read_instance(args.file)
    report = check_domain_consistency(inst, make_config(args))
    if args.json:
        print(report.to_json())
    else:
        print(f"props: {report.props}")
        if report.root_conflict:
            print("root propagation conflict: every value pruned")
        for e in report.entries:
            print(f"{e.variable} {e.value:<3} supported={'yes' if e.supported else 'no ':<3} "
                  f"pruned={'yes' if e.pruned else 'no ':<3} {e.verdict}")
        counts = report.counts()
        print("counts: " + " ".join(f"{k}={v}" for k, v in counts.items()))
        print("domain consistent" if report.domain_consistent else "NOT domain consistent")
    return EXIT_SAT if not report.unsound else EXIT_ERROR


def _bench_job(job):
    name, kind, payload, props, enum = job
    if kind == "program":
        program, assumptions = parse_program(payload), []
    else:
        program, assumptions = encode_reach(payload)
    return solve_record(name, program, SolverConfig.parse(props, enum_limit=enum), assumptions)


def bench_inputs(args) -> list[tuple[str, str, object]]:
    items = []
    for path in args.paths:
        p = Path(path)
        files = sorted(p.iterdir()) if p.is_dir() else [p]
        for f in files:
            if f.suffix == ".reach":
                items.append((str(f), "reach", read_instance(str(f))))
            elif f.suffix in (".lp", ".asp"):
                items.append((str(f), "program", f.read_text()))
    seed = args.seed if args.seed is not None else default_seed()
    for i in range(args.generate):
        s = seed + i
        items.append((f"loop-chain-{s}", "reach", loop_chain_instance(s, n_loops=3 + s % 3)))
    if not items:
        raise UsageError("bench: no instances (give paths or --generate N)")
    return items


def cmd_bench(args) -> int:
    items = bench_inputs(args)
    configs = args.configs
    for c in configs:
        try:
            SolverConfig.parse(c)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    jobs = [(name, kind, payload, props, args.enum) for name, kind, payload in items for props in configs]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            records = list(pool.map(_bench_job, jobs))
    else:
        records = [_bench_job(j) for j in jobs]
    if args.json:
        print(json.dumps(records, indent=2))
        return EXIT_SAT
    print(f"{'instance':<28} {'props':<18} {'#S':>6} {'time_ms':>8} {'#B':>8} {'#C':>8}")
    for r in records:
        print(f"{r['instance']:<28} {r['props']:<18} {len(r['answer_sets']):>6} {r['time_ms']:>8} "
              f"{r['branches']:>8} {r['conflicts']:>8}")
    print("# aggregate")
    base = None
    for props in configs:
        rs = [r for r in records if r["props"] == SolverConfig.parse(props).props]
        b = sum(r["branches"] for r in rs)
        base = b if base is None else base
        ratio = f"{b / base:.3f}" if base else "-"
        print(f"{'TOTAL':<28} {SolverConfig.parse(props).props:<18} {sum(len(r['answer_sets']) for r in rs):>6} "
              f"{sum(r['time_ms'] for r in rs):>8} {b:>8} {sum(r['conflicts'] for r in rs):>8}  B/B0={ratio}")
    print("# conflicts count chronological-backtracking failures, not learned clauses")
    return EXIT_SAT


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else default_seed()
    results = run_suites(seed, args.count, suites=args.suite)
    bad = False
    for r in results:
        print(f"{r.name:<28} cases={r.cases:<5} violations={len(r.violations)}")
    for r in results:
        if r.violations:
            bad = True
            print(f"\nfirst violation in {r.name}:")
            print(r.violations[0])
    return EXIT_ERROR if bad else EXIT_SAT


def cmd_dump(args) -> int:
    program = read_program(args.file)
    a = Assignment(program.num_vars)
    conflict = assign_assumptions(a, parse_assumptions(program, args.assume))
    if conflict is not None:
        raise UsageError(conflict.describe(program))
    g = build_flowgraph(program, a)
    tree = None if args.no_tree else compute_dominators(g)
    sys.stdout.write(to_dot(g, tree, a if a.trail else None))
    return EXIT_SAT


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wfprop", description="Dominator-based unfounded-set reasoning for ground logic programs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    props_help = "comma-separated propagators from up,fl,dom,blprobe (up is always on)"

    p = sub.add_parser("parse", help="parse and summarize a program")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("solve", help="enumerate answer sets")
    p.add_argument("file")
    p.add_argument("--props", default="up,fl", help=props_help)
    p.add_argument("--enum", type=int, default=0, help="stop after N answer sets (0 = all)")
    p.add_argument("--assume", action="append", help="e.g. t:a,f:b,t:{b,not c}")
    p.add_argument("--heuristic", choices=("lowest", "random"), default="lowest")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--time-budget", type=float, default=None, help="seconds")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("propagate", help="show the root propagation fixpoint")
    p.add_argument("file")
    p.add_argument("--assume", action="append", help="e.g. t:a,f:b,t:{b,not c}")
    p.add_argument("--props", default="up,fl", help=props_help)
    p.add_argument("--explain", action="store_true", help="print the reason of every inferred literal")
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("check-dc", help="domain consistency of a reachability instance")
    p.add_argument("file")
    p.add_argument("--props", default="up,fl", help=props_help)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check_dc)

    p = sub.add_parser("bench", help="compare propagator configurations")
    p.add_argument("paths", nargs="*", help=".lp/.reach files or directories of them")
    p.add_argument("--configs", nargs="+", default=["up,fl", "up,fl,dom"])
    p.add_argument("--generate", type=int, default=0, help="add N generated loop-chain instances")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--enum", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="randomized cross-check against the oracle")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--suite", action="append", help="restrict to the named suite (repeatable)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dump", help="DOT of the support flowgraph and its dominator tree")
    p.add_argument("file")
    p.add_argument("--assume", action="append")
    p.add_argument("--no-tree", action="store_true")
    p.set_defaults(func=cmd_dump)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"wfprop: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except GuardExceeded as exc:
        print(f"wfprop: guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except OSError as exc:
        print(f"wfprop: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
