"""Hypothesis strategies for functions and clause sets."""

from hypothesis import strategies as st

from skolem import funcs


def func_over(variables):
    leaves = st.one_of(st.sampled_from([funcs.TRUE, funcs.FALSE]), st.sampled_from(list(variables)).map(funcs.var))

    def extend(children):
        return st.one_of(
            children.map(lambda f: ~f),
            st.tuples(children, children).map(lambda p: p[0] & p[1]),
            st.tuples(children, children).map(lambda p: p[0] | p[1]),
            st.tuples(children, children).map(lambda p: p[0] ^ p[1]),
        )

    return st.recursive(leaves, extend, max_leaves=12)


def clause_sets(num_vars, max_clauses=8, max_width=3):
    lit = st.integers(1, num_vars).flatmap(lambda v: st.sampled_from([v, -v]))
    return st.lists(st.lists(lit, min_size=1, max_size=max_width), max_size=max_clauses)
