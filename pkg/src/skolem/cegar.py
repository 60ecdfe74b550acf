"""Counterexample-guided repair of candidate Skolem functions."""

from __future__ import annotations

import json
import time
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from . import funcs
from .formula import Encoder, Spec, cofactor_clauses, eval_clauses
from .funcs import Func
from .maxsat import lexmaxsat, maxsat
from .sat import SatError, Solver, Status, shrink_core


class SolverUnknown(RuntimeError):
    """A solver call ran out of budget or hit the deadline."""


class Deadline(RuntimeError):
    pass


@dataclass
class Counterexample:
    x: dict[int, int]
    y: dict[int, int]
    y_prime: dict[int, int]  # keyed by the unprimed output


@dataclass
class ErrorEncoding:
    clauses: list[list[int]]
    num_vars: int
    prime: dict[int, int]


def _lit(v, b):
    return v if b else -v


def build_error_formula(spec: Spec, psi: Mapping[int, Func]) -> ErrorEncoding:
    """``F(X, Y) and not F(X, Y') and y'_i <-> psi_i(X, Y')`` for every output.

    The positive copy is the working formula; the negated copy uses only the
    clauses over inputs and outputs, since the auxiliary definitions are
    functional and never restrict the outputs.
    """
    n = spec.num_vars
    prime = {y: n + 1 + i for i, y in enumerate(spec.outputs)}
    enc = Encoder(n + len(prime) + 1)
    renamed = [[_lit(prime.get(abs(l), abs(l)), l > 0) for l in c] for c in spec.base_clauses()]
    enc.clauses.append([enc.negate(renamed)])
    for y in spec.outputs:
        f = funcs.rename(psi[y], prime)
        enc.equal(prime[y], enc.tseitin(f))
    clauses = [list(c) for c in spec.clauses] + enc.clauses
    return ErrorEncoding(clauses, enc.top, prime)


def verify(spec: Spec, psi: Mapping[int, Func], *, deadline: float | None = None) -> Counterexample | None:
    """``None`` when ``psi`` is a Skolem vector, else a counterexample."""
    e = build_error_formula(spec, psi)
    s = Solver(e.clauses, num_vars=e.num_vars, deadline=deadline)
    st = s.solve()
    if st is Status.UNKNOWN:
        raise SolverUnknown("error formula undecided")
    if st is Status.UNSAT:
        return None
    m = s.model()
    return Counterexample(
        x={v: m[v] for v in spec.inputs},
        y={v: m[v] for v in spec.outputs},
        y_prime={y: m[p] for y, p in e.prime.items()},
    )


def evaluate_vector(psi: Mapping[int, Func], order: Sequence[int], x: Mapping[int, int]) -> dict[int, int]:
    """Output values of ``psi`` at input ``x``, last in ``order`` first."""
    env = dict(x)
    for y in reversed(order):
        env[y] = int(funcs.evaluate(psi[y], env))
    return {y: env[y] for y in order}


def fixes(spec: Spec, psi, order, cex: Counterexample) -> bool:
    """Whether ``psi`` now satisfies ``F`` at the counterexample's inputs."""
    env = dict(cex.x)
    env.update(evaluate_vector(psi, order, cex.x))
    return eval_clauses(spec.base_clauses(), env)


def find_repair_candidates(
    spec: Spec,
    cex: Counterexample,
    order: Sequence[int],
    mode: str = "lex",
    exclude=(),
) -> list[int]:
    """Outputs whose candidate value must change, ascending in ``order``.

    Soft constraints ask each output to keep its candidate value; the one at
    position ``p`` (1-based) has priority ``p``, so outputs late in the order
    are kept first in lex mode.
    """
    exclude = set(exclude)
    hard = [list(c) for c in spec.clauses] + [[_lit(x, b)] for x, b in cex.x.items()]
    ys = [y for y in order if y not in exclude]
    pos = {y: i + 1 for i, y in enumerate(order)}
    lits = [_lit(y, cex.y_prime[y]) for y in ys]
    if mode == "lex":
        violated = lexmaxsat(hard, [(l, pos[y]) for l, y in zip(lits, ys)], num_vars=spec.num_vars)
    elif mode == "plain":
        violated = maxsat(hard, lits, num_vars=spec.num_vars)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return [ys[i] for i in sorted(violated)]


@dataclass
class Repair:
    output: int
    function: Func | None = None
    beta: Func | None = None
    core: list[int] = field(default_factory=list)
    followups: list[int] = field(default_factory=list)

    @property
    def repaired(self):
        return self.function is not None


def repair_skf(
    spec: Spec,
    cex: Counterexample,
    psi: Mapping[int, Func],
    order: Sequence[int],
    y: int,
    *,
    core_passes: int = 1,
    deadline: float | None = None,
) -> Repair:
    """Repair ``psi[y]`` at the counterexample, or name other outputs to repair.

    ``y`` is fixed to its candidate value and the outputs after it to their
    candidate values.  If that contradicts ``F`` at ``cex.x``, the core's
    literals form ``beta`` and the candidate is weakened or strengthened on
    ``beta``.
    """
    pos = order.index(y)
    later = order[pos + 1:]
    target = _lit(y, cex.y_prime[y])
    xs = [_lit(x, b) for x, b in cex.x.items()]
    fixed = [_lit(v, cex.y_prime[v]) for v in later]
    s = Solver(spec.clauses, num_vars=spec.num_vars, deadline=deadline)
    st = s.solve(xs + fixed + [target])
    if st is Status.UNKNOWN:
        raise SolverUnknown("repair query undecided")
    if st is Status.SAT:
        m = s.model()
        return Repair(y, followups=[v for v in later if m[v] != cex.y_prime[v]])
    core = s.core()
    if core_passes:
        core = shrink_core(s, core, passes=core_passes)
    later_set, x_set = set(later), set(cex.x)
    ys = [l for l in core if abs(l) in later_set]
    beta = funcs.cube(ys if ys else [l for l in core if abs(l) in x_set])
    if cex.y_prime[y] == 0:
        new = psi[y] | beta
    else:
        new = psi[y] & ~beta
    return Repair(y, function=new, beta=beta, core=sorted(core, key=abs))


def _compose_before(psi: Mapping[int, Func], order: Sequence[int], y: int, value) -> dict[int, Func]:
    """Outputs before ``y`` expressed over ``y = value`` and the outputs after it."""
    pos = order.index(y)
    sub: dict[int, Func] = {}
    fixed = {y: funcs.const(value)}
    for v in reversed(order[:pos]):
        sub[v] = funcs.substitute(psi[v], {**fixed, **sub})
    return sub


def self_substitute(spec: Spec, psi: Mapping[int, Func], order: Sequence[int], y: int) -> Func:
    """``F`` with ``y = 1`` and earlier outputs replaced by their candidates.

    Outputs after ``y`` in ``order`` stay free.
    """
    f = funcs.from_cnf(cofactor_clauses(spec.base_clauses(), y, 1))
    return funcs.substitute(f, _compose_before(psi, order, y, 1))


def full_self_substitution(spec: Spec, psi: Mapping[int, Func], order: Sequence[int], keep=()) -> dict[int, Func]:
    """Self-substitute every output in order, except the exact ones in ``keep``.

    When the kept functions are definitions entailed by ``F``, the result is a
    Skolem vector: each step eliminates one output exactly.
    """
    keep = set(keep)
    out = dict(psi)
    for y in order:
        if y not in keep:
            out[y] = self_substitute(spec, out, order, y)
    return out


@dataclass
class RepairLog:
    iterations: int = 0
    repairs: int = 0
    self_substitutions: int = 0
    escalated: bool = False
    fallback: bool = False
    status: dict[int, str] = field(default_factory=dict)
    trace: list[dict] = field(default_factory=list)


def repair_loop(
    spec: Spec,
    psi: dict[int, Func],
    order: Sequence[int],
    *,
    fixed=(),
    lex: str = "on",
    lex_ratio: int = 50,
    self_sub_threshold: int = 10,
    max_iterations: int | None = 1000,
    core_passes: int = 1,
    deadline: float | None = None,
    log: RepairLog | None = None,
    on_trace: Callable[[dict], None] | None = None,
) -> RepairLog:
    """Verify and repair until ``psi`` is a Skolem vector; mutates ``psi``.

    ``fixed`` holds outputs with exact definitions; they are never repaired.
    ``lex`` is ``"on"`` (escalate from MaxSAT to LexMaxSAT when repairs stall),
    ``"off"`` or ``"always"``.

    When a pass fails to fix its own counterexample after escalation, the
    first output in ``order`` that is not yet frozen is self-substituted and
    frozen.  A frozen prefix built this way is exact, so this happens at most
    once per output.  Past ``max_iterations`` counterexamples the whole
    remaining order is frozen at once.
    """
    if lex not in ("on", "off", "always"):
        raise ValueError(f"lex must be on, off or always, not {lex!r}")
    log = log or RepairLog()
    frozen = set(fixed)
    mode = "lex" if lex == "always" else "plain"
    per_var: Counter = Counter()

    def check_time():
        if deadline is not None and time.monotonic() > deadline:
            raise Deadline("repair loop timed out")

    def substitute_and_count(y, entry):
        psi[y] = self_substitute(spec, psi, order, y)
        per_var[y] = 0
        log.status[y] = "self-substituted"
        log.self_substitutions += 1
        entry["self_substituted"].append(y)

    def freeze_next(entry) -> bool:
        for y in order:
            if y not in frozen:
                substitute_and_count(y, entry)
                frozen.add(y)
                entry["frozen"].append(y)
                return True
        return False

    def record(entry):
        log.trace.append(entry)
        if on_trace:
            on_trace(entry)

    while True:
        check_time()
        cex = verify(spec, psi, deadline=deadline)
        if cex is None:
            return log
        log.iterations += 1
        entry = {
            "iteration": log.iterations,
            "mode": mode,
            "counterexample": {"x": cex.x, "y_prime": cex.y_prime},
            "ind": [],
            "repaired": [],
            "self_substituted": [],
            "followups": [],
            "frozen": [],
        }
        if max_iterations is not None and log.iterations > max_iterations:
            while freeze_next(entry):
                pass
            log.fallback = True
            entry["fallback"] = True
            record(entry)
            continue
        ind = find_repair_candidates(spec, cex, order, mode, exclude=frozen)
        entry["ind"] = list(ind)
        queue, seen = deque(ind), set(ind)
        added, stall = 0, not ind
        while queue:
            check_time()
            y = queue.popleft()
            if per_var[y] > self_sub_threshold:
                substitute_and_count(y, entry)
                continue
            r = repair_skf(spec, cex, psi, order, y, core_passes=core_passes, deadline=deadline)
            if r.repaired:
                psi[y] = r.function
                per_var[y] += 1
                log.repairs += 1
                log.status[y] = "repaired"
                entry["repaired"].append(y)
                continue
            new = [v for v in r.followups if v not in frozen and v not in seen]
            if not r.followups:
                stall = True
            seen.update(new)
            queue.extend(new)
            added += len(new)
            entry["followups"] += new
            if mode == "plain" and lex != "off" and added > lex_ratio * max(1, len(ind)):
                stall = True
                break
        progressed = fixes(spec, psi, order, cex)
        entry["progress"] = progressed
        if (stall or not progressed) and mode == "plain" and lex != "off":
            mode = "lex"
            log.escalated = True
            entry["escalate"] = True
        elif not progressed:
            freeze_next(entry)
        record(entry)


def trace_json(entry: dict) -> str:
    return json.dumps(entry, sort_keys=True)
