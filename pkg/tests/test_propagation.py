import itertools

import pytest
from hypothesis import given, settings, strategies as st

from wfprop.generators import random_closed_assignment, random_program
from wfprop.oracle import enumerate_answer_sets
from wfprop.program import parse_program
from wfprop.propagation import (Assignment, F, T, complement, completion_nogoods, format_literal, lit_sign,
                                lit_var, unit_propagate)


def names(p, a):
    return {format_literal(p, l) for l in a.trail}


def test_literal_encoding():
    assert T(3) == 6 and F(3) == 7
    assert complement(T(3)) == F(3)
    assert lit_var(F(5)) == 5 and lit_sign(T(5)) and not lit_sign(F(5))


def test_atom_without_rules_is_false():
    p = parse_program("a :- b.")
    store = completion_nogoods(p)
    assert (T(p.atom_index["b"]),) in store.nogoods
    a = Assignment(p.num_vars)
    assert unit_propagate(store, a) is None
    assert names(p, a) == {"Fb", "F{b}", "Fa"}


def test_fact_body_is_true():
    p = parse_program("a. b :- not a.")
    a = Assignment(p.num_vars)
    assert unit_propagate(completion_nogoods(p), a) is None
    assert names(p, a) == {"T{}", "Ta", "F{not a}", "Fb"}


def test_tautologies_are_dropped():
    p = parse_program("a :- a, not a.")
    store = completion_nogoods(p)
    assert all(not any(l ^ 1 in ng for l in ng) for ng in store.nogoods)


def test_choice_loops_up_from_c(choice_loops):
    p = choice_loops
    a = Assignment(p.num_vars)
    a.assign(T(p.atom_index["c"]))
    assert unit_propagate(completion_nogoods(p), a) is None
    assert names(p, a) == {"Tc", "T{c}", "Td", "T{d}"}


def test_conflict_returns_violated_nogood():
    p = parse_program("a :- not b. b.")
    a = Assignment(p.num_vars)
    a.assign(T(p.atom_index["a"]))
    c = unit_propagate(completion_nogoods(p), a)
    assert c is not None and c.source == "up"
    assert all(a.holds(l) for l in c.reason)


def test_backtrack_restores_state(choice_loops):
    p = choice_loops
    store = completion_nogoods(p)
    a = Assignment(p.num_vars)
    unit_propagate(store, a)
    snap = a.snapshot()
    a.assume(T(p.atom_index["a"]))
    unit_propagate(store, a)
    assert a.level == 1 and len(a.trail) > 1
    a.backtrack(0)
    assert a.snapshot() == snap
    with pytest.raises(ValueError):
        a.assign(T(0))
        a.assign(F(0))


def _models_of_nogoods(store, num_vars, a):
    """Total assignments extending ``a`` that violate no nogood (brute force)."""
    free = [v for v in range(num_vars) if not a.is_assigned(v)]
    for bits in itertools.product((False, True), repeat=len(free)):
        b = a.copy()
        for v, val in zip(free, bits):
            b.assign(T(v) if val else F(v))
        if store.violated(b) is None:
            yield b


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_up_is_sound_and_a_fixpoint(seed):
    p = random_program(seed, n_atoms=4, style="uniform", max_body=2)
    if p.num_vars > 14:
        return
    store = completion_nogoods(p)
    a = Assignment(p.num_vars)
    c = unit_propagate(store, a)
    models = list(_models_of_nogoods(store, p.num_vars, Assignment(p.num_vars)))
    if c is not None:
        assert models == []
        return
    for m in models:
        assert all(m.holds(l) for l in a.trail)
    for ng in store.nogoods:  # nothing unit or violated remains
        open_ = [l for l in ng if not a.is_assigned(l >> 1)]
        if all(a.holds(l) for l in ng if a.is_assigned(l >> 1)):
            assert len(open_) >= 2


def total_assignment(p, answer_set):
    value = {q: q in answer_set for q in range(p.num_atoms)}
    for b in p.bodies:
        value[b.var] = all(value[q] for q in b.positive) and not any(value[q] for q in b.negative)
    return value


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_closure_keeps_agreeing_answer_sets(seed):
    """Every answer set that agrees with the decisions agrees with the whole UP+FL closure."""
    p = random_program(seed, n_atoms=6)
    a = random_closed_assignment(p, seed)
    decisions = [l for l, src in zip(a.trail, a.sources) if src == "assume"]
    for s in enumerate_answer_sets(p):
        value = total_assignment(p, s)
        if all(value[l >> 1] == (not l & 1) for l in decisions):
            assert all(value[l >> 1] == (not l & 1) for l in a.trail)
