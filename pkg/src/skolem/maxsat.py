"""Exact partial MaxSAT and lexicographic MaxSAT over unit soft literals."""

from __future__ import annotations

from typing import Iterable, Sequence

from .sat import Solver, Status, UnsatisfiableError, SatError


class Totalizer:
    """Unary counter over ``inputs``: ``outputs[j]`` is implied once ``j+1`` inputs hold.

    Only the upward implications are encoded, which is all an at-most bound
    (assume ``-outputs[k]``) needs.
    """

    def __init__(self, solver: Solver, inputs: Sequence[int]):
        self.inputs = list(inputs)
        self.outputs = self._build(solver, self.inputs) if inputs else []

    def _build(self, solver, lits):
        if len(lits) == 1:
            return [lits[0]]
        mid = len(lits) // 2
        a = self._build(solver, lits[:mid])
        b = self._build(solver, lits[mid:])
        out = [solver.new_var() for _ in range(len(a) + len(b))]
        for i in range(len(a) + 1):
            for j in range(len(b) + 1):
                if i + j == 0:
                    continue
                c = [out[i + j - 1]]
                if i:
                    c.append(-a[i - 1])
                if j:
                    c.append(-b[j - 1])
                solver.add_clause(c)
        return out

    def at_most(self, k: int) -> int | None:
        """Assumption literal bounding the count by ``k`` (``None`` if vacuous)."""
        if k >= len(self.outputs):
            return None
        return -self.outputs[k]


def _violated(model: list[int], softs: Sequence[int]) -> list[int]:
    out = []
    for i, l in enumerate(softs):
        if (model[abs(l)] == 1) != (l > 0):
            out.append(i)
    return out


def _minimize(solver: Solver, softs: Sequence[int], index: Sequence[int]) -> tuple[int, list[int]]:
    """Minimum number of violated ``softs`` (positions ``index``) under the solver's clauses.

    Returns ``(cost, model)``.  Disjoint cores give a lower bound; a totalizer
    driven SAT-UNSAT linear search closes the gap.
    """
    active = list(index)
    lb = 0
    while True:
        st = solver.solve([softs[i] for i in active])
        if st is Status.SAT:
            break
        if st is Status.UNKNOWN:
            raise SatError("solver budget exhausted in MaxSAT")
        core = set(solver.core())
        if not core:
            raise UnsatisfiableError("hard constraints are unsatisfiable")
        relaxed = [i for i in active if softs[i] in core]
        active = [i for i in active if softs[i] not in core]
        lb += 1
        if not relaxed:
            raise SatError("core does not mention any soft literal")
    model = solver.model_list()
    sub = [softs[i] for i in index]
    ub = len(_violated(model, sub))
    if ub == lb:
        return ub, model
    tot = Totalizer(solver, [-l for l in sub])
    while ub > lb:
        st = solver.solve([tot.at_most(ub - 1)])
        if st is Status.UNSAT:
            break
        if st is Status.UNKNOWN:
            raise SatError("solver budget exhausted in MaxSAT")
        model = solver.model_list()
        ub = len(_violated(model, sub))
    return ub, model


def _hard_solver(hard: Iterable[Sequence[int]], softs: Sequence[int], num_vars: int) -> Solver:
    s = Solver(hard, num_vars=num_vars)
    if softs:
        s.ensure_vars(max(abs(l) for l in softs))
    if s.solve() is not Status.SAT:
        raise UnsatisfiableError("hard constraints are unsatisfiable")
    return s


def maxsat(hard: Iterable[Sequence[int]], softs: Sequence[int], *, num_vars: int = 0, return_model: bool = False):
    """Indices of violated soft literals in an optimal solution.

    With ``return_model`` the witness model (dict var -> 0/1) is returned too.
    """
    softs = list(softs)
    solver = _hard_solver(hard, softs, num_vars)
    cost, model = _minimize(solver, softs, range(len(softs)))
    violated = set(_violated(model, softs))
    assert len(violated) == cost
    if return_model:
        return violated, {v: model[v] for v in range(1, len(model))}
    return violated


def lexmaxsat(
    hard: Iterable[Sequence[int]],
    softs: Sequence[tuple[int, int]],
    *,
    num_vars: int = 0,
    return_model: bool = False,
):
    """Lexicographically optimal violated set for ``(literal, priority)`` softs.

    Levels are optimized from the highest priority down; each level's optimum
    is frozen as a hard cardinality bound before the next level is processed.
    """
    lits = [l for l, _ in softs]
    solver = _hard_solver(hard, lits, num_vars)
    levels = sorted({p for _, p in softs}, reverse=True)
    model = solver.model_list()
    for p in levels:
        index = [i for i, (_, q) in enumerate(softs) if q == p]
        cost, model = _minimize(solver, lits, index)
        if cost == 0:
            for i in index:
                solver.add_clause([lits[i]])
        else:
            tot = Totalizer(solver, [-lits[i] for i in index])
            bound = tot.at_most(cost)
            if bound is not None:
                solver.add_clause([bound])
    if solver.solve() is not Status.SAT:
        raise SatError("frozen lexicographic bounds became unsatisfiable")
    model = solver.model_list()
    violated = set(_violated(model, lits))
    if return_model:
        return violated, {v: model[v] for v in range(1, len(model))}
    return violated
