import pytest
from hypothesis import given, settings

from conftest import small
from oracles import assignments, models, satisfies, truth_table_of_clauses
from skolem import funcs
from skolem.formula import (
    CycleError,
    Encoder,
    QDimacsError,
    Spec,
    cofactor,
    eval_clauses,
    ground,
    negate_cnf,
    parse_qdimacs,
    tseitin,
    write_qdimacs,
)
from strategies import clause_sets, func_over


def test_parse_minimal():
    s = parse_qdimacs("p cnf 2 1\na 1 0\ne 2 0\n1 2 0")
    assert s.inputs == (1,) and s.outputs == (2,)
    assert s.clauses == ((1, 2),)


def test_parse_running_example(ex1):
    assert len(ex1.inputs) == 2 and len(ex1.outputs) == 4
    assert len(ex1.clauses) == 4


def test_parse_drops_tautology():
    s = parse_qdimacs("p cnf 1 1\ne 1 0\n1 -1 0")
    assert s.clauses == ()


def test_free_variables_become_inputs():
    s = parse_qdimacs(b"p cnf 3 1\ne 2 0\n1 2 3 0\n")
    assert s.inputs == (1, 3) and s.outputs == (2,)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "1 2 0\n",
        "p cnf 2 1\na 1 0\ne 2 0\n1 3 0\n",
        "p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n",
        "p cnf 2 1\ne 2 0\na 1 0\n1 2 0\n",
        "p cnf 2 1\na 1 0\ne 2 0\n1 x 0\n",
        "p cnf 2 1\na 1 0\ne 2 0\n1 2\n",
        "p cnf 2 1\na 1 0\ne 1 2 0\n1 2 0\n",
        "p cnf 2 1\na 1 0\ne 2 0\n0\n",
        "p dnf 2 1\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(QDimacsError):
        parse_qdimacs(text)


def test_write_round_trip(ex1):
    assert parse_qdimacs(write_qdimacs(ex1)) == ex1


def test_cofactor_examples(ex1):
    assert cofactor(small([[1, 2]], 1, 1), 2, 1).clauses == ()
    assert () in cofactor(small([[2], [-2]], 1, 1), 2, 0).clauses
    got = cofactor(ex1, 5, 1).clauses
    want = [(1, 2, 3), (2, -3, 4), (-6,)]
    rest = [1, 2, 3, 4, 6]
    assert truth_table_of_clauses(got, rest) == truth_table_of_clauses(want, rest)


@settings(max_examples=100, deadline=None)
@given(clause_sets(4))
def test_cofactor_matches_substitution(cs):
    spec = Spec(4, tuple(tuple(c) for c in cs), (1, 2), (3, 4))
    for b in (0, 1):
        g = cofactor(spec, 3, b)
        for a in assignments([1, 2, 4]):
            assert satisfies(g.clauses, a) == satisfies(spec.clauses, {**a, 3: b})


def _projected(clauses, top, variables):
    return {tuple(m[v] for v in variables) for m in models(clauses, range(1, top + 1))}


def test_negate_examples():
    for cs, want in [([[1]], {(0,)}), ([[1, 2], [-1, -2]], {(0, 0), (1, 1)})]:
        n = max(abs(l) for c in cs for l in c)
        s, out = negate_cnf(Spec(n, tuple(map(tuple, cs)), (), tuple(range(1, n + 1))))
        extra = list(s.clauses[len(cs):])
        assert _projected(extra + [[out]], s.num_vars, list(range(1, n + 1))) == want
    s, out = negate_cnf(Spec(0, (), (), ()))
    assert not models(list(s.clauses) + [[out]], range(1, s.num_vars + 1))


@settings(max_examples=100, deadline=None)
@given(clause_sets(3, max_clauses=5))
def test_negate_is_complement(cs):
    enc = Encoder(4)
    out = enc.negate(cs)
    for a in assignments([1, 2, 3]):
        ext = _projected(enc.clauses + [[v if a[v] else -v] for v in a], enc.top, [out])
        assert ext == {(0 if satisfies(cs, a) else 1,)}


def test_tseitin_examples():
    clauses, out, aux = tseitin(funcs.var(1), 5)
    assert out == 1 and clauses == [] and aux == {}
    clauses, out, _ = tseitin(funcs.TRUE, 5)
    assert out == 5 and clauses == [[5]]
    clauses, out, _ = tseitin(~funcs.var(1) | funcs.var(2), 3)
    assert _projected(clauses + [[out]], max(3, abs(out)), [1, 2]) == {(0, 0), (0, 1), (1, 1)}


@settings(max_examples=150, deadline=None)
@given(func_over([1, 2, 3]))
def test_tseitin_equisatisfiable(f):
    clauses, out, _ = tseitin(f, 4)
    top = max([3, abs(out)] + [abs(l) for c in clauses for l in c])
    for a in assignments([1, 2, 3]):
        fixed = [[v if a[v] else -v] for v in a]
        vals = _projected(clauses + fixed, top, [abs(out)])
        value = vals.pop()[0] if out > 0 else 1 - vals.pop()[0]
        assert value == int(funcs.evaluate(f, a))


def test_ground_running_example():
    x1, x2, y1, y2, y3, y4 = map(funcs.var, range(1, 7))
    psi = {6: ~y3, 5: x2, 4: ~x1 | y1, 3: x1 | (~x1 & ~x2)}
    g = ground(psi, [6, 5, 4, 3])
    assert funcs.equivalent(g[6], ~x2)
    assert funcs.equivalent(g[4], funcs.TRUE)
    assert all(funcs.support(f) <= {1, 2} for f in g.values())
    assert ground({3: funcs.TRUE, 4: funcs.FALSE}, [3, 4]) == {3: funcs.TRUE, 4: funcs.FALSE}
    assert ground({2: funcs.var(3), 3: x1}, [2, 3])[2] is x1


def test_ground_cycle():
    with pytest.raises(CycleError):
        ground({2: funcs.var(3), 3: funcs.var(2)}, [2, 3])


def test_eval_clauses():
    assert eval_clauses([(1, -2)], {1: 0, 2: 0})
    assert not eval_clauses([(1, -2)], {1: 0, 2: 1})


def test_extend_marks_aux(ex1):
    w = ex1.extend([[7, 1]], 7)
    assert w.aux == (7,)
    assert w.base_clauses() == list(ex1.clauses)
