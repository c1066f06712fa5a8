import pytest
from hypothesis import given, settings, strategies as st

from wfprop.program import COMPONENT_UNARY, UNARY
from wfprop.reachability import (ReachInstance, check_domain_consistency, completions, counterexample_instance,
                                 encode_reach, format_instance, loop_chain_instance, parse_instance,
                                 random_instance, reachable_set)
from wfprop.solver import SolverConfig, solve


def test_encoding_of_single_edge():
    inst = ReachInstance.create(["s", "v"], edge_ub=[("s", "v")], start_lb=["s"])
    p, assumptions = encode_reach(inst)
    rules = {(h, tuple(pos), tuple(neg)) for h, pos, neg in p.rule_triples()}
    assert ("reached(v)", ("reached(s)", "edge(s,v)"), ()) in rules
    assert ("edge(s,v)", (), ("nedge(s,v)",)) in rules
    assert ("nedge(s,v)", (), ("edge(s,v)",)) in rules
    assert ("start(s)", (), ()) in rules
    assert assumptions == []


def test_fixed_graph_has_no_choices():
    inst = ReachInstance.create(["a", "b"], edge_lb=[("a", "b")], start_lb=["a"])
    p, _ = encode_reach(inst)
    assert not any(n.startswith(("nedge", "nstart")) for n in p.atom_names)
    assert p.classification == COMPONENT_UNARY
    assert [sorted(p.atom_names[q] for q in s) for s in solve(p).answer_sets] == [
        ["edge(a,b)", "reached(a)", "reached(b)", "start(a)"]]


def test_fixed_reached_values_become_assumptions():
    inst = ReachInstance.create(["a", "b"], edge_ub=[("a", "b")], start_lb=["a"], reached_lb=["b"])
    p, assumptions = encode_reach(inst)
    assert assumptions == [2 * p.atom_index["reached(b)"]]
    inst = ReachInstance.create(["a", "b"], edge_ub=[("a", "b")], start_lb=["a"], reached_ub=["a"])
    p, assumptions = encode_reach(inst)
    assert assumptions == [2 * p.atom_index["reached(b)"] + 1]


def test_bounds_are_validated():
    with pytest.raises(ValueError):
        ReachInstance(("a",), frozenset(), frozenset(), frozenset({"a"}), frozenset(), frozenset(), frozenset({"a"}))
    with pytest.raises(ValueError):
        ReachInstance.create(["a"], edge_ub=[("a", "z")])


def test_instance_file_roundtrip():
    inst = random_instance(3, 5, 0.5, 0.5, "none")
    assert parse_instance(format_instance(inst)) == inst
    assert parse_instance("nodes 2\nedge n0 n1 maybe\nstart n0 in\nreached n1 out\n") == ReachInstance.create(
        ["n0", "n1"], edge_ub=[("n0", "n1")], start_lb=["n0"], reached_ub=["n0"])
    with pytest.raises(ValueError, match="line 2"):
        parse_instance("nodes a b\nedge a b sometimes\n")


def test_generator_basics():
    inst = random_instance(0, 1, 0.0, 0.5, "none")
    assert inst.nodes == ("n0",) and inst.start_ub <= {"n0"} and not inst.edge_ub
    assert check_domain_consistency(inst, SolverConfig.parse("up,fl")).domain_consistent
    assert random_instance(11, 5, 0.4, 0.5, "N") == random_instance(11, 5, 0.4, 0.5, "N")
    gs = random_instance(4, 5, 0.4, 0.5, "GS")
    assert gs.graph_fixed and gs.start_fixed and not gs.reached_fixed
    assert random_instance(4, 5, 0.4, 0.5, "N").reached_fixed
    with pytest.raises(ValueError):
        random_instance(0, 0)


def test_counterexample():
    inst = counterexample_instance()
    weak = check_domain_consistency(inst, SolverConfig.parse("up,fl"))
    assert [(e.variable, e.value) for e in weak.missed] == [("edge(s,u)", "out")]
    assert check_domain_consistency(inst, SolverConfig.parse("up,fl,dom")).domain_consistent
    assert check_domain_consistency(inst, SolverConfig.parse("up,blprobe")).domain_consistent


def test_report_serializes():
    report = check_domain_consistency(counterexample_instance(), SolverConfig.parse("up,fl"))
    d = report.to_dict()
    assert d["counts"] == {"consistent": 1, "missed_pruning": 1, "unsound_pruning": 0}
    assert '"missed_pruning"' in report.to_json()


def test_loop_chain_instances_are_satisfiable():
    for seed in range(5):
        inst = loop_chain_instance(seed)
        assert inst.reached_fixed and set(inst.reached_lb) == set(inst.nodes)
        assert any(True for _ in completions(inst))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 5), st.sampled_from(["GS", "N", "none"]))
def test_encoding_is_component_unary(seed, n, mode):
    p, _ = encode_reach(random_instance(seed, n, 0.5, 0.5, mode))
    assert p.classification in (UNARY, COMPONENT_UNARY)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_answer_sets_are_completions(seed, n):
    """A node is in N exactly when reached(node) is true in the matching answer set."""
    inst = random_instance(seed, n, 0.5, 0.5, "none")
    p, assumptions = encode_reach(inst)
    got = set()
    for s in solve(p, SolverConfig.parse("up,fl"), assumptions).answer_sets:
        names = {p.atom_names[q] for q in s}
        edges = frozenset(e for e in inst.edge_ub if f"edge({e[0]},{e[1]})" in names)
        starts = frozenset(v for v in inst.nodes if f"start({v})" in names)
        reached = frozenset(v for v in inst.nodes if f"reached({v})" in names)
        assert reached == reachable_set(inst.nodes, edges, starts)
        got.add((edges, starts, reached))
    want = {(frozenset(e), frozenset(s), frozenset(r)) for e, s, r in completions(inst)}
    assert got == want


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 5), st.sampled_from(["GS", "N", "none"]),
       st.sampled_from(["up", "up,fl", "up,fl,dom", "up,blprobe"]))
def test_pruning_is_always_sound(seed, n, mode, props):
    report = check_domain_consistency(random_instance(seed, n, 0.5, 0.5, mode), SolverConfig.parse(props))
    assert not report.unsound
