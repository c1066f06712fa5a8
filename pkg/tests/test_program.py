import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from wfprop.generators import random_program
from wfprop.program import (COMPONENT_UNARY, GENERAL, UNARY, ParseError, build_program, classify,
                            dependency_graph, external_support, format_program, parse_program)
from wfprop.propagation import Assignment, F


def test_parse_indexes_atoms_then_bodies(choice_loops):
    p = choice_loops
    assert p.atom_names == ["a", "b", "c", "d", "e", "f"]
    assert p.num_bodies == 7
    assert p.num_vars == 13
    assert [p.body_name(v) for v in p.bodies_of[p.atom_index["e"]]] == ["{f}", "{not a}"]


def test_duplicate_bodies_are_shared():
    p = parse_program("a :- b, not c. d :- not c, b. b. c :- b, b.")
    assert p.num_bodies == 3
    assert p.find_body(["b"], ["c"]) == p.bodies_of[p.atom_index["a"]][0] == p.bodies_of[p.atom_index["d"]][0]


def test_duplicate_rules_collapse():
    p = parse_program("a :- b. a :- b. b.")
    assert len(p.rules) == 2


def test_facts_and_args():
    p = parse_program("edge(s, u).\nreached(u) :- edge(s,u).  % comment\n")
    assert p.atom_names == ["edge(s,u)", "reached(u)"]
    assert p.body_name(p.bodies_of[p.atom_index["edge(s,u)"]][0]) == "{}"


@pytest.mark.parametrize("text, line, col", [
    ("a :- b,, c.", 1, 8),
    ("a :- b.\nb :- not .", 2, 6),
    ("a :- b", 1, 7),
    ("A :- b.", 1, 1),
])
def test_parse_errors_carry_location(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_program(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_classification(choice_loops, body_dominator, atom_dominator):
    assert classify(choice_loops) == UNARY
    assert body_dominator.classification == COMPONENT_UNARY
    assert atom_dominator.classification == UNARY
    assert parse_program("a :- b, c. b :- a. c :- a.").classification == GENERAL


def test_phi_prefers_atoms_of_own_component(body_dominator):
    p = body_dominator
    bc = p.find_body(["b", "c"], [])
    assert p.phi[bc] == (p.atom_index["b"],)
    q = parse_program("a :- b, c. b. c.")
    bc = q.find_body(["b", "c"], [])
    assert set(q.phi[bc]) == {q.atom_index["b"], q.atom_index["c"]}


def test_body_shares_component_of_its_heads(choice_loops):
    p = choice_loops
    assert p.scc_id[p.find_body(["d"], [])] == p.scc_id[p.atom_index["c"]]
    assert p.scc_id[p.find_body([], ["b"])] != p.scc_id[p.atom_index["a"]]


def test_external_support(choice_loops):
    p = choice_loops
    cd = [p.atom_index["c"], p.atom_index["d"]]
    assert external_support(p, cd) == {p.find_body(["a"], [])}
    a = Assignment(p.num_vars)
    a.assign(F(p.find_body(["a"], [])))
    assert external_support(p, cd, a) == set()


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["general", "unary", "component-unary"]))
def test_components_match_networkx(seed, kind):
    p = random_program(seed, n_atoms=8, kind=kind)
    g = nx.DiGraph()
    g.add_nodes_from(range(p.num_vars))
    for u, succ in enumerate(dependency_graph(p)):
        g.add_edges_from((u, v) for v in succ)
    expected = {frozenset(c) for c in nx.strongly_connected_components(g)}
    got = {frozenset(m) for m in p.scc_members.values()}
    assert got == expected


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_format_parse_roundtrip(seed):
    p = random_program(seed, n_atoms=7, style="uniform")
    q = parse_program(format_program(p))
    assert sorted(map(str, q.rule_triples())) == sorted(map(str, p.rule_triples()))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_generated_classes_hold(seed):
    assert random_program(seed, n_atoms=9, kind="unary").classification == UNARY
    assert random_program(seed, n_atoms=9, kind="component-unary").classification in (UNARY, COMPONENT_UNARY)


def test_build_program_extra_atoms():
    p = build_program([("a", ["b"], [])], extra_atoms=["z", "a"])
    assert p.atom_names == ["a", "b", "z"]
    assert p.bodies_of[p.atom_index["z"]] == []
