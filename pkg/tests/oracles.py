"""Brute-force reference implementations used by the tests."""

from __future__ import annotations

import itertools
import random

import numpy as np

from skolem import funcs
from skolem.formula import Spec, normalize_clause


def assignments(variables):
    variables = list(variables)
    for bits in itertools.product((0, 1), repeat=len(variables)):
        yield dict(zip(variables, bits))


def satisfies(clauses, a) -> bool:
    return all(any((a[abs(l)] == 1) == (l > 0) for l in c) for c in clauses)


def models(clauses, variables):
    return [a for a in assignments(variables) if satisfies(clauses, a)]


def is_sat(clauses, num_vars) -> bool:
    return bool(models(clauses, range(1, num_vars + 1)))


def defined(clauses, num_vars, y, S) -> bool:
    seen = {}
    for a in models(clauses, range(1, num_vars + 1)):
        key = tuple(a[v] for v in S)
        if seen.setdefault(key, a[y]) != a[y]:
            return False
    return True


def unate(clauses, num_vars, y):
    """+1 positive, -1 negative, 0 neither (positive checked first)."""
    others = [v for v in range(1, num_vars + 1) if v != y]
    for sign in (1, -1):
        ok = True
        for a in assignments(others):
            lo = satisfies(clauses, {**a, y: 0 if sign > 0 else 1})
            hi = satisfies(clauses, {**a, y: 1 if sign > 0 else 0})
            if lo and not hi:
                ok = False
                break
        if ok:
            return sign
    return 0


def min_violations(hard, softs, num_vars):
    best = None
    for a in models(hard, range(1, num_vars + 1)):
        c = sum(1 for l in softs if (a[abs(l)] == 1) != (l > 0))
        best = c if best is None else min(best, c)
    return best


def lex_vector(hard, softs, num_vars):
    """Violation counts per priority level, highest first, lexicographically minimal."""
    levels = sorted({p for _, p in softs}, reverse=True)
    best = None
    for a in models(hard, range(1, num_vars + 1)):
        vec = tuple(sum(1 for l, p in softs if p == q and (a[abs(l)] == 1) != (l > 0)) for q in levels)
        best = vec if best is None else min(best, vec)
    return best


def violation_vector(violated, softs):
    levels = sorted({p for _, p in softs}, reverse=True)
    return tuple(sum(1 for i in violated if softs[i][1] == q) for q in levels)


def skolem_holds(spec: Spec, grounded) -> bool:
    """For every input with some model, the functions give a model."""
    for x in assignments(spec.inputs):
        exists = any(satisfies(spec.clauses, {**x, **y}) for y in assignments(spec.outputs))
        if not exists:
            continue
        y = {v: int(funcs.evaluate(grounded[v], x)) for v in spec.outputs}
        if not satisfies(spec.clauses, {**x, **y}):
            return False
    return True


def random_clauses(rng: random.Random, num_vars, num_clauses, width=(1, 3)):
    out = []
    for _ in range(num_clauses):
        k = rng.randint(*width)
        vs = rng.sample(range(1, num_vars + 1), min(k, num_vars))
        c = normalize_clause(v if rng.random() < 0.5 else -v for v in vs)
        if c:
            out.append(c)
    return out


def random_spec(rng: random.Random, max_x=6, max_y=6, max_clauses=25) -> Spec:
    nx_ = rng.randint(1, max_x)
    ny = rng.randint(1, max_y)
    n = nx_ + ny
    m = rng.randint(1, max_clauses)
    clauses = random_clauses(rng, n, m, (2, 4))
    return Spec(n, tuple(clauses), tuple(range(1, nx_ + 1)), tuple(range(nx_ + 1, n + 1)))


def truth_table_of_clauses(clauses, variables):
    return tuple(int(satisfies(clauses, a)) for a in assignments(variables))


def model_matrix(clauses, num_vars):
    """All satisfying assignments as rows of a 0/1 matrix; column ``v - 1`` is variable ``v``."""
    rows = np.arange(2 ** num_vars, dtype=np.int64)
    bits = ((rows[:, None] >> np.arange(num_vars)) & 1).astype(bool)
    ok = np.ones(len(rows), dtype=bool)
    for c in clauses:
        sat = np.zeros(len(rows), dtype=bool)
        for l in c:
            sat |= bits[:, abs(l) - 1] if l > 0 else ~bits[:, abs(l) - 1]
        ok &= sat
    return bits[ok]


def soft_violations(matrix, softs):
    """Per-row 0/1 violation of each soft literal, one column per soft."""
    cols = [~matrix[:, abs(l) - 1] if l > 0 else matrix[:, abs(l) - 1] for l in softs]
    return np.stack(cols, axis=1) if cols else np.zeros((len(matrix), 0), dtype=bool)
