"""Unate detection, definability checks and definition extraction.

A variable ``y`` is defined by ``S`` in ``F`` when ``F |= y <-> H(S)`` for some
``H``.  Definability is decided on the two-copy (Padoa) formula; definitions
are read off a resolution refutation of that formula as a McMillan
interpolant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import funcs
from .formula import Encoder, Spec
from .funcs import Func
from .sat import Solver, Status, SatError, shrink_core, solve_with_proof


class InterpolationError(RuntimeError):
    """An extracted definition failed its entailment checks."""


class NotDefinedError(ValueError):
    pass


class DefinitionTooLarge(ValueError):
    pass


@dataclass
class Definition:
    output: int
    function: Func
    kind: str  # "unate" or "unique"
    defining_set: tuple[int, ...] = ()


@dataclass
class DeterminedSet:
    """Outputs with known Skolem functions, in discovery order."""

    entries: list[Definition] = field(default_factory=list)

    def __contains__(self, y):
        return any(d.output == y for d in self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def outputs(self) -> set[int]:
        return {d.output for d in self.entries}


def _lit(v, b):
    return v if b else -v


def find_unates(spec: Spec, *, deadline=None) -> tuple[list[tuple[int, int]], Spec]:
    """Sequential unate detection; found unates join the formula as unit clauses.

    ``y`` is positive unate iff ``F|y=0 and not F|y=1`` is unsatisfiable.  Only
    clauses mentioning ``not y`` can be falsified by ``F|y=1`` while ``F|y=0``
    holds, so the negation is encoded over those clauses only.
    """
    clauses = [list(c) for c in spec.clauses]
    found = []
    for y in spec.outputs:
        for positive in (True, False):
            blocking = -y if positive else y
            if _unate_query_unsat(clauses, spec.num_vars, y, blocking):
                found.append((y, 1 if positive else 0))
                clauses.append([_lit(y, positive)])
                break
    units = [[_lit(y, b)] for y, b in found]
    work = Spec(spec.num_vars, spec.clauses + tuple(tuple(u) for u in units), spec.inputs, spec.outputs, spec.aux)
    return found, work


def _unate_query_unsat(clauses, num_vars, y, blocking, deadline=None) -> bool:
    # F with y set against `blocking`, and some clause holding `blocking` falsified
    # once that literal is dropped.
    s = Solver(clauses, num_vars=num_vars, deadline=deadline)
    s.add_clause([blocking])
    picks = []
    for c in clauses:
        if blocking in c:
            t = s.new_var()
            picks.append(t)
            for l in c:
                if l != blocking:
                    s.add_clause([-t, -l])
    if not picks:
        return True
    s.add_clause(picks)
    st = s.solve()
    if st is Status.UNKNOWN:
        raise SatError("solver budget exhausted in unate check")
    return st is Status.UNSAT


def _shift(l, n):
    return l + n if l > 0 else l - n


def _padoa_parts(clauses: Sequence[Sequence[int]], n: int, y: int):
    a = [list(c) for c in clauses] + [[y]]
    b = [[_shift(l, n) for l in c] for c in clauses] + [[-(y + n)]]
    return a, b


def check_defined(
    spec: Spec,
    y: int,
    defining: Iterable[int],
    *,
    core_passes: int = 1,
    deadline=None,
) -> tuple[bool, list[int]]:
    """Padoa check; returns ``(defined, witness)`` with ``witness`` a defining subset."""
    S = [v for v in dict.fromkeys(defining)]
    if y in S:
        raise ValueError("target variable may not be in its own defining set")
    n = spec.num_vars
    a, b = _padoa_parts(spec.clauses, n, y)
    s = Solver(a + b, num_vars=2 * n, deadline=deadline)
    selector = {}
    for v in S:
        t = s.new_var()
        selector[t] = v
        s.add_clause([-t, -v, v + n])
        s.add_clause([-t, v, -(v + n)])
    assumptions = list(selector)
    st = s.solve(assumptions)
    if st is Status.UNKNOWN:
        raise SatError("solver budget exhausted in definability check")
    if st is Status.SAT:
        return False, []
    core = s.core()
    if core_passes and core:
        core = shrink_core(s, core, passes=core_passes)
    chosen = {selector[t] for t in core}
    return True, [v for v in S if v in chosen]


def mcmillan_interpolant(proof, a_vars: set[int], b_vars: set[int]) -> Func:
    """Interpolant of an A/B-partitioned refutation (McMillan's system)."""
    itp: dict[int, Func] = {}
    for i in proof.reachable():
        node = proof.nodes[i]
        if node.is_leaf:
            if node.part == "A":
                itp[i] = funcs.clause(sorted((l for l in node.clause if abs(l) in b_vars), key=abs))
            else:
                itp[i] = funcs.TRUE
        else:
            l, r = itp[node.left], itp[node.right]
            if node.pivot in a_vars and node.pivot not in b_vars:
                itp[i] = l | r
            else:
                itp[i] = l & r
    return itp[proof.root]


def entails_definition(spec: Spec, y: int, h: Func, deadline=None) -> bool:
    """``F |= y <-> h`` by two SAT calls."""
    for polarity in (True, False):
        enc = Encoder(spec.num_vars + 1)
        out = enc.tseitin(h)
        s = Solver(list(spec.clauses) + enc.clauses, num_vars=enc.top, deadline=deadline)
        st = s.solve([_lit(y, polarity), -out if polarity else out])
        if st is Status.UNKNOWN:
            raise SatError("solver budget exhausted in definition check")
        if st is Status.SAT:
            return False
    return True


def extract_definition(
    spec: Spec,
    y: int,
    defining: Iterable[int],
    *,
    proof_budget: int | None = None,
    deadline=None,
    check: bool = True,
) -> Func | None:
    """Definition of ``y`` over ``defining`` from an interpolant.

    Returns ``None`` when the refutation exceeds ``proof_budget`` nodes.
    """
    S = list(dict.fromkeys(defining))
    n = spec.num_vars
    a, b = _padoa_parts(spec.clauses, n, y)
    for v in S:
        b += [[-v, v + n], [v, -(v + n)]]
    st, proof = solve_with_proof(a, b, num_vars=2 * n, deadline=deadline)
    if st is Status.UNKNOWN:
        raise SatError("solver budget exhausted during extraction")
    if st is Status.SAT:
        raise NotDefinedError(f"variable {y} is not defined by {S}")
    if proof_budget is not None and len(proof.reachable()) > proof_budget:
        return None
    a_vars = {abs(l) for c in a for l in c}
    b_vars = {abs(l) for c in b for l in c}
    h = mcmillan_interpolant(proof, a_vars, b_vars)
    if not funcs.support(h) <= set(S):
        raise InterpolationError(f"interpolant for {y} leaves its defining set")
    if check and not entails_definition(spec, y, h, deadline=deadline):
        raise InterpolationError(f"interpolant for {y} is not a definition")
    return h


def define_by_enumeration(spec: Spec, y: int, defining: Iterable[int], limit: int = 16) -> Func:
    """Definition by enumerating assignments of the defining set.

    Rows where ``F`` has no model are don't-cares and default to 0.
    """
    S = list(dict.fromkeys(defining))
    if len(S) > limit:
        raise DefinitionTooLarge(f"{len(S)} defining variables exceed limit {limit}")
    s = Solver(spec.clauses, num_vars=spec.num_vars)
    rows = []
    for bits in itertools.product((0, 1), repeat=len(S)):
        cube = [_lit(v, b) for v, b in zip(S, bits)]
        if s.solve(cube) is not Status.SAT:
            continue
        value = s.model()[y]
        if s.solve(cube + [_lit(y, not value)]) is Status.SAT:
            raise NotDefinedError(f"variable {y} takes both values under {cube}")
        if value:
            rows.append(funcs.cube(cube))
    return funcs.disj_all(rows)


@dataclass
class UniDefResult:
    working: Spec
    determined: DeterminedSet
    dependson: dict[int, set[int]]
    unates: list[tuple[int, int]]
    skipped: list[int] = field(default_factory=list)


def unidef(
    spec: Spec,
    *,
    unates: bool = True,
    definitions: bool = True,
    core_passes: int = 1,
    proof_budget: int | None = None,
    deadline=None,
) -> UniDefResult:
    """Unates first, then definability of each output over inputs and earlier outputs.

    Each definition is retained in the working formula as Tseitin clauses for
    ``y <-> psi`` so later phases can use ``y`` as a feature.
    """
    determined = DeterminedSet()
    dependson: dict[int, set[int]] = {y: set() for y in spec.outputs}
    found: list[tuple[int, int]] = []
    work = spec
    if unates:
        found, work = find_unates(spec, deadline=deadline)
        for y, b in found:
            determined.entries.append(Definition(y, funcs.const(b), "unate"))
    unate_set = {y for y, _ in found}
    outputs = set(spec.outputs)
    skipped = []
    if definitions:
        for i, y in enumerate(spec.outputs):
            if y in unate_set:
                continue
            defining = list(spec.inputs) + list(spec.outputs[:i])
            ok, witness = check_defined(work, y, defining, core_passes=core_passes, deadline=deadline)
            if not ok:
                continue
            h = extract_definition(work, y, witness, proof_budget=proof_budget, deadline=deadline)
            if h is None:
                skipped.append(y)
                continue
            determined.entries.append(Definition(y, h, "unique", tuple(witness)))
            dependson[y] |= funcs.support(h) & outputs
            enc = Encoder(work.num_vars + 1)
            enc.equal(y, enc.tseitin(h))
            work = work.extend(enc.clauses, enc.top)
    return UniDefResult(work, determined, dependson, found, skipped)
