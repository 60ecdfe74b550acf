import pickle

from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import assignments
from skolem import funcs
from strategies import func_over

VARS = [1, 2, 3, 4]


def table(f):
    return tuple(int(funcs.evaluate(f, a)) for a in assignments(VARS))


def test_hash_consing_gives_identity():
    a = funcs.var(1) & ~funcs.var(2)
    assert (funcs.var(1) & ~funcs.var(2)) is a
    assert ~~a is a


def test_constant_folding():
    x = funcs.var(1)
    assert (x & funcs.FALSE) is funcs.FALSE
    assert (x | funcs.TRUE) is funcs.TRUE
    assert (x & ~x) is funcs.FALSE
    assert (x | ~x) is funcs.TRUE


def test_cube_and_clause():
    c = funcs.cube([1, -2])
    assert funcs.evaluate(c, {1: 1, 2: 0})
    assert not funcs.evaluate(c, {1: 1, 2: 1})
    d = funcs.clause([1, -2])
    assert not funcs.evaluate(d, {1: 0, 2: 1})


def test_prefix_form():
    assert funcs.to_prefix(funcs.var(1) & ~funcs.var(2)) in ("and(v1, not(v2))", "and(not(v2), v1)")
    assert funcs.to_prefix(~funcs.var(3), name=lambda v: f"x{v}") == "not(x3)"


@settings(max_examples=200, deadline=None)
@given(func_over(VARS), func_over(VARS))
def test_operators_match_truth_tables(f, g):
    tf, tg = table(f), table(g)
    assert table(f & g) == tuple(a & b for a, b in zip(tf, tg))
    assert table(f | g) == tuple(a | b for a, b in zip(tf, tg))
    assert table(f ^ g) == tuple(a ^ b for a, b in zip(tf, tg))
    assert table(~f) == tuple(1 - a for a in tf)


@settings(max_examples=200, deadline=None)
@given(func_over(VARS), func_over([1, 2]), st.sampled_from(VARS))
def test_substitute_is_composition(f, g, v):
    h = funcs.substitute(f, {v: g})
    for a in assignments(VARS):
        inner = dict(a)
        inner[v] = int(funcs.evaluate(g, a))
        assert int(funcs.evaluate(h, a)) == int(funcs.evaluate(f, inner))


@settings(max_examples=100, deadline=None)
@given(func_over(VARS))
def test_support_and_pickle(f):
    assert funcs.support(f) <= set(VARS)
    g = pickle.loads(pickle.dumps(f))
    assert g is f


@settings(max_examples=100, deadline=None)
@given(func_over(VARS))
def test_equivalent_agrees_with_tables(f):
    g = ~~f | funcs.FALSE
    assert funcs.equivalent(f, g)
    assert funcs.equivalent(f, ~f) is False
