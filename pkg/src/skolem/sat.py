"""A small CDCL SAT solver.

Features: two-watched-literal propagation, 1UIP learning, VSIDS, Luby
restarts, incremental solving under assumptions with final-conflict cores,
optional resolution-proof logging (for interpolation) and a randomized
sampling mode that redraws decision phases from per-variable biases.

    >>> s = Solver([[1, 2], [-1, 2]])
    >>> s.solve()
    <Status.SAT: 1>
    >>> s.model()[2]
    1
    >>> s.solve([-2])
    <Status.UNSAT: 2>
    >>> s.core()
    [-2]
"""

from __future__ import annotations

import enum
import heapq
import random
import time
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

Assignment = dict[int, int]


class Status(enum.Enum):
    SAT = 1
    UNSAT = 2
    UNKNOWN = 3


class SatError(RuntimeError):
    pass


class UnsatisfiableError(SatError):
    """A formula that was required to be satisfiable is not."""


@dataclass
class ProofNode:
    clause: frozenset
    part: str | None = None
    pivot: int | None = None
    left: int | None = None
    right: int | None = None

    @property
    def is_leaf(self):
        return self.pivot is None


class ResolutionProof:
    """Resolution DAG: leaves are tagged input clauses, inner nodes resolvents."""

    def __init__(self):
        self.nodes: list[ProofNode] = []
        self.root: int | None = None

    def leaf(self, clause: Iterable[int], part: str | None) -> int:
        self.nodes.append(ProofNode(frozenset(clause), part=part))
        return len(self.nodes) - 1

    def resolve(self, a: int, b: int, pivot: int) -> int:
        ca, cb = self.nodes[a].clause, self.nodes[b].clause
        if pivot in ca and -pivot in cb:
            pos, negp = a, b
        elif -pivot in ca and pivot in cb:
            pos, negp = b, a
        else:
            raise SatError(f"pivot {pivot} does not clash in resolution")
        clause = (ca | cb) - {pivot, -pivot}
        self.nodes.append(ProofNode(frozenset(clause), pivot=pivot, left=pos, right=negp))
        return len(self.nodes) - 1

    def reachable(self) -> list[int]:
        """Node ids reachable from the root, in increasing (topological) order."""
        if self.root is None:
            return []
        seen = {self.root}
        stack = [self.root]
        while stack:
            n = self.nodes[stack.pop()]
            if not n.is_leaf:
                for c in (n.left, n.right):
                    if c not in seen:
                        seen.add(c)
                        stack.append(c)
        return sorted(seen)

    def check(self) -> bool:
        """Replay every reachable resolution; the root must be the empty clause."""
        if self.root is None or self.nodes[self.root].clause:
            return False
        for i in self.reachable():
            n = self.nodes[i]
            if n.is_leaf:
                continue
            l, r = self.nodes[n.left].clause, self.nodes[n.right].clause
            if n.pivot not in l or -n.pivot not in r:
                return False
            if n.clause != (l | r) - {n.pivot, -n.pivot}:
                return False
        return True


def luby(i: int) -> int:
    """i-th element (0-based) of the Luby sequence 1,1,2,1,1,2,4,..."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


def _code(l: int) -> int:
    return (l << 1) if l > 0 else ((-l) << 1) | 1


class Solver:
    """Incremental CDCL solver over DIMACS-style integer literals."""

    restart_base = 100
    var_decay = 0.95

    def __init__(
        self,
        clauses: Iterable[Sequence[int]] = (),
        *,
        num_vars: int = 0,
        proof: bool = False,
        conflict_budget: int | None = None,
        deadline: float | None = None,
        drat: IO[str] | None = None,
    ):
        self._nvars = 0
        self._assigns = [0]
        self._level = [0]
        self._reason = [-1]
        self._activity = [0.0]
        self._phase = [False]
        self._seen = [False]
        self._watches: list[list[int]] = [[], []]
        self._clauses: list[list[int]] = []
        self._trail: list[int] = []
        self._trail_lim: list[int] = []
        self._qhead = 0
        self._heap: list[tuple[float, int]] = []
        self._var_inc = 1.0
        self._ok = True
        self._model: list[int] | None = None
        self._core: list[int] | None = None
        self._proof = ResolutionProof() if proof else None
        self._pid: list[int] = []
        self._unit_pid: dict[int, int] = {}
        self._unit_upto = 0
        self._sampling = None
        self._drat = drat
        self.conflict_budget = conflict_budget
        self.deadline = deadline
        self.stats = {"solves": 0, "conflicts": 0, "decisions": 0, "propagations": 0, "restarts": 0}
        self.ensure_vars(num_vars)
        for c in clauses:
            self.add_clause(c)

    # ---------------------------------------------------------------- setup

    @property
    def num_vars(self) -> int:
        return self._nvars

    @property
    def proof(self) -> ResolutionProof | None:
        return self._proof

    def new_var(self) -> int:
        self._nvars += 1
        v = self._nvars
        self._assigns.append(0)
        self._level.append(0)
        self._reason.append(-1)
        self._activity.append(0.0)
        self._phase.append(False)
        self._seen.append(False)
        self._watches.append([])
        self._watches.append([])
        heapq.heappush(self._heap, (0.0, v))
        return v

    def ensure_vars(self, n: int) -> None:
        while self._nvars < n:
            self.new_var()

    def add_clause(self, lits: Iterable[int], part: str | None = None) -> None:
        """Add a clause (kept verbatim for proof logging; tautologies skipped)."""
        c = list(dict.fromkeys(lits))
        s = set(c)
        if any(-l in s for l in c):
            return
        if c:
            self.ensure_vars(max(abs(l) for l in c))
        self._cancel_until(0)
        cid = len(self._clauses)
        self._clauses.append(c)
        if self._proof is not None:
            self._pid.append(self._proof.leaf(c, part))
        if not self._ok:
            return
        if not c:
            self._ok = False
            if self._proof is not None:
                self._proof.root = self._pid[cid]
            return
        vals = [self._value(l) for l in c]
        if 1 in vals:
            return
        free = [i for i, v in enumerate(vals) if v == 0]
        if not free:
            self._ok = False
            self._derive_empty(cid)
            return
        # non-false literals first
        order = free + [i for i in range(len(c)) if vals[i] != 0]
        c[:] = [c[i] for i in order]
        if len(free) == 1:
            if len(c) > 1:
                self._watch(cid)
            self._enqueue(c[0], cid)
            confl = self._propagate()
            if confl >= 0:
                self._ok = False
                self._derive_empty(confl)
        else:
            self._watch(cid)

    def _watch(self, cid):
        c = self._clauses[cid]
        self._watches[_code(c[0])].append(cid)
        self._watches[_code(c[1])].append(cid)

    # --------------------------------------------------------------- basics

    def _value(self, l: int) -> int:
        return self._assigns[l] if l > 0 else -self._assigns[-l]

    def _enqueue(self, l: int, reason: int) -> None:
        v = l if l > 0 else -l
        self._assigns[v] = 1 if l > 0 else -1
        self._level[v] = len(self._trail_lim)
        self._reason[v] = reason
        self._trail.append(l)

    def _cancel_until(self, level: int) -> None:
        if len(self._trail_lim) <= level:
            return
        start = self._trail_lim[level]
        assigns, phase, activity, heap = self._assigns, self._phase, self._activity, self._heap
        for l in self._trail[start:]:
            v = l if l > 0 else -l
            phase[v] = l > 0
            assigns[v] = 0
            self._reason[v] = -1
            heapq.heappush(heap, (-activity[v], v))
        del self._trail[start:]
        del self._trail_lim[level:]
        self._qhead = len(self._trail)
        if len(heap) > 4 * self._nvars + 64:
            self._rebuild_heap()

    def _rebuild_heap(self):
        self._heap = [(-self._activity[v], v) for v in range(1, self._nvars + 1) if self._assigns[v] == 0]
        heapq.heapify(self._heap)

    def _propagate(self) -> int:
        assigns = self._assigns
        clauses = self._clauses
        watches = self._watches
        trail = self._trail
        level = len(self._trail_lim)
        lv, rs = self._level, self._reason
        props = 0
        while self._qhead < len(trail):
            p = trail[self._qhead]
            self._qhead += 1
            props += 1
            fl = -p
            fcode = (fl << 1) if fl > 0 else ((-fl) << 1) | 1
            wl = watches[fcode]
            keep = []
            n = len(wl)
            i = 0
            while i < n:
                cid = wl[i]
                i += 1
                c = clauses[cid]
                if c[0] == fl:
                    c[0] = c[1]
                    c[1] = fl
                first = c[0]
                fv = assigns[first] if first > 0 else -assigns[-first]
                if fv == 1:
                    keep.append(cid)
                    continue
                for k in range(2, len(c)):
                    l = c[k]
                    if (assigns[l] if l > 0 else -assigns[-l]) != -1:
                        c[1] = l
                        c[k] = fl
                        watches[(l << 1) if l > 0 else ((-l) << 1) | 1].append(cid)
                        break
                else:
                    keep.append(cid)
                    if fv == -1:
                        keep.extend(wl[i:])
                        watches[fcode] = keep
                        self._qhead = len(trail)
                        self.stats["propagations"] += props
                        return cid
                    v = first if first > 0 else -first
                    assigns[v] = 1 if first > 0 else -1
                    lv[v] = level
                    rs[v] = cid
                    trail.append(first)
            watches[fcode] = keep
        self.stats["propagations"] += props
        return -1

    # -------------------------------------------------------------- analysis

    def _bump(self, v):
        act = self._activity
        act[v] += self._var_inc
        if act[v] > 1e100:
            for i in range(1, self._nvars + 1):
                act[i] *= 1e-100
            self._var_inc *= 1e-100
            self._rebuild_heap()

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen, level, reason, trail = self._seen, self._level, self._reason, self._trail
        cur = len(self._trail_lim)
        learnt = [0]
        counter = 0
        p = 0
        idx = len(trail) - 1
        chain: list[tuple[int, int]] = []
        zeros: set[int] = set()
        logging = self._proof is not None
        first = confl
        c = self._clauses[confl]
        while True:
            for q in (c[1:] if p else c):
                v = q if q > 0 else -q
                if seen[v]:
                    continue
                if level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
                elif logging:
                    zeros.add(v)
            while not seen[abs(trail[idx])]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = abs(p)
            seen[v] = False
            counter -= 1
            if counter == 0:
                break
            confl = reason[v]
            c = self._clauses[confl]
            chain.append((v, confl))
        learnt[0] = -p
        for q in learnt[1:]:
            seen[abs(q)] = False
        if len(learnt) == 1:
            bt = 0
        else:
            mi = max(range(1, len(learnt)), key=lambda i: level[abs(learnt[i])])
            learnt[1], learnt[mi] = learnt[mi], learnt[1]
            bt = level[abs(learnt[1])]
        if logging:
            self._pending_chain = ([(None, first)] + chain, zeros)
        return learnt, bt

    def _log_learnt(self, cid: int) -> None:
        pf = self._proof
        steps, zeros = self._pending_chain
        node = self._pid[steps[0][1]]
        for v, rc in steps[1:]:
            node = pf.resolve(node, self._pid[rc], v)
        for z in sorted(zeros):
            node = pf.resolve(node, self._unit_node(z), z)
        if pf.nodes[node].clause != frozenset(self._clauses[cid]):
            raise SatError("proof logging out of sync with learnt clause")
        self._pid.append(node)

    def _unit_node(self, v: int) -> int:
        """Proof node for the unit clause of the root-level literal on ``v``."""
        if v in self._unit_pid:
            return self._unit_pid[v]
        pf = self._proof
        end = self._trail_lim[0] if self._trail_lim else len(self._trail)
        while self._unit_upto < end:
            l = self._trail[self._unit_upto]
            self._unit_upto += 1
            u = abs(l)
            if u in self._unit_pid:
                continue
            c = self._clauses[self._reason[u]]
            node = self._pid[self._reason[u]]
            for q in c:
                if q != l:
                    node = pf.resolve(node, self._unit_pid[abs(q)], abs(q))
            self._unit_pid[u] = node
            if u == v:
                break
        return self._unit_pid[v]

    def _derive_empty(self, confl: int) -> None:
        pf = self._proof
        if pf is None:
            return
        node = self._pid[confl]
        for q in self._clauses[confl]:
            node = pf.resolve(node, self._unit_node(abs(q)), abs(q))
        pf.root = node

    def _analyze_final(self, failed: int) -> list[int]:
        """Assumptions responsible for ``failed`` (an assumption now false)."""
        core = [failed]
        v0 = abs(failed)
        if self._level[v0] == 0:
            return core
        seen = self._seen
        seen[v0] = True
        for i in range(len(self._trail) - 1, self._trail_lim[0] - 1, -1):
            l = self._trail[i]
            x = abs(l)
            if not seen[x]:
                continue
            r = self._reason[x]
            if r == -1:
                core.append(l)
            else:
                for q in self._clauses[r][1:]:
                    if self._level[abs(q)] > 0:
                        seen[abs(q)] = True
            seen[x] = False
        seen[v0] = False
        return core

    # ---------------------------------------------------------------- search

    def _pick_branch(self) -> int:
        assigns = self._assigns
        if self._sampling is not None:
            order = self._sampling[2]
            for v in order:
                if assigns[v] == 0:
                    return v if self._phase[v] else -v
            return 0
        heap = self._heap
        while heap:
            _, v = heapq.heappop(heap)
            if assigns[v] == 0:
                return v if self._phase[v] else -v
        for v in range(1, self._nvars + 1):
            if assigns[v] == 0:
                return v if self._phase[v] else -v
        return 0

    def _redraw_phases(self):
        rng, bias, _ = self._sampling
        ph = self._phase
        for v in range(1, self._nvars + 1):
            ph[v] = rng.random() < bias.get(v, 0.5)

    def _search(self, nof_conflicts: int, assumptions: Sequence[int], conflicts_left):
        conflicts = 0
        while True:
            confl = self._propagate()
            if confl >= 0:
                conflicts += 1
                self.stats["conflicts"] += 1
                if not self._trail_lim:
                    self._ok = False
                    self._derive_empty(confl)
                    self._core = []
                    return Status.UNSAT
                learnt, bt = self._analyze(confl)
                self._cancel_until(bt)
                cid = len(self._clauses)
                self._clauses.append(learnt)
                if self._proof is not None:
                    self._log_learnt(cid)
                if self._drat is not None:
                    self._drat.write(" ".join(map(str, learnt)) + " 0\n")
                if len(learnt) > 1:
                    self._watch(cid)
                self._enqueue(learnt[0], cid)
                self._var_inc /= self.var_decay
                if conflicts_left is not None and self.stats["conflicts"] >= conflicts_left:
                    return Status.UNKNOWN
                if self.deadline is not None and conflicts % 64 == 0 and time.monotonic() > self.deadline:
                    return Status.UNKNOWN
                continue
            if conflicts >= nof_conflicts:
                self._cancel_until(0)
                return None
            nxt = 0
            while len(self._trail_lim) < len(assumptions):
                a = assumptions[len(self._trail_lim)]
                val = self._value(a)
                if val == 1:
                    self._trail_lim.append(len(self._trail))
                elif val == -1:
                    self._core = self._analyze_final(a)
                    return Status.UNSAT
                else:
                    nxt = a
                    break
            if nxt == 0:
                nxt = self._pick_branch()
                if nxt == 0:
                    self._model = list(self._assigns)
                    return Status.SAT
            self.stats["decisions"] += 1
            self._trail_lim.append(len(self._trail))
            self._enqueue(nxt, -1)

    def solve(self, assumptions: Sequence[int] = ()) -> Status:
        """Solve under ``assumptions``; see :meth:`model` and :meth:`core`."""
        self.stats["solves"] += 1
        self._model = None
        self._core = None
        if not self._ok:
            self._core = []
            return Status.UNSAT
        assumptions = list(assumptions)
        if assumptions:
            self.ensure_vars(max(abs(a) for a in assumptions))
        self._cancel_until(0)
        confl = self._propagate()
        if confl >= 0:
            self._ok = False
            self._derive_empty(confl)
            self._core = []
            return Status.UNSAT
        limit = None
        if self.conflict_budget is not None:
            limit = self.stats["conflicts"] + self.conflict_budget
        restart = 0
        while True:
            if self._sampling is not None and restart:
                self._redraw_phases()
            status = self._search(luby(restart) * self.restart_base, assumptions, limit)
            if status is not None:
                break
            restart += 1
            self.stats["restarts"] += 1
            if self.deadline is not None and time.monotonic() > self.deadline:
                status = Status.UNKNOWN
                break
        self._cancel_until(0)
        return status

    def model(self) -> Assignment:
        if self._model is None:
            raise SatError("no model available")
        m = self._model
        return {v: 1 if m[v] > 0 else 0 for v in range(1, len(m))}

    def model_list(self) -> list[int]:
        """Model as a list indexed by variable (index 0 unused), values 0/1."""
        if self._model is None:
            raise SatError("no model available")
        return [1 if a > 0 else 0 for a in self._model]

    def core(self) -> list[int]:
        if self._core is None:
            raise SatError("no core available")
        return list(self._core)

    # -------------------------------------------------------------- sampling

    def sample_models(self, n: int, bias: Mapping[int, float], rng: random.Random):
        """Yield ``n`` models with phases drawn from ``bias`` and a random order.

        Every sample starts a fresh search from the root; within a sample the
        phases are redrawn at each restart.
        """
        order = list(range(1, self._nvars + 1))
        self._sampling = (rng, bias, order)
        try:
            for _ in range(n):
                rng.shuffle(order)
                self._redraw_phases()
                st = self.solve()
                if st is Status.UNSAT:
                    raise UnsatisfiableError("cannot sample an unsatisfiable formula")
                if st is Status.UNKNOWN:
                    raise SatError("sampling exceeded its budget")
                yield self.model_list()
        finally:
            self._sampling = None


def solve(clauses: Iterable[Sequence[int]], assumptions: Sequence[int] = (), **kwargs):
    """One-shot solve: returns ``(status, model_or_core)``."""
    s = Solver(clauses, **kwargs)
    st = s.solve(assumptions)
    if st is Status.SAT:
        return st, s.model()
    if st is Status.UNSAT:
        return st, s.core()
    return st, None


def solve_with_proof(a_clauses: Iterable[Sequence[int]], b_clauses: Iterable[Sequence[int]], **kwargs):
    """Solve ``A and B`` logging a resolution proof with A/B-tagged leaves.

    Returns ``(Status.SAT, model)`` or ``(Status.UNSAT, ResolutionProof)``.
    """
    s = Solver(proof=True, **kwargs)
    for c in a_clauses:
        s.add_clause(c, part="A")
    for c in b_clauses:
        s.add_clause(c, part="B")
    st = s.solve()
    if st is Status.SAT:
        return st, s.model()
    if st is Status.UNSAT:
        return st, s.proof
    return st, None


def shrink_core(solver: Solver, core: Sequence[int], passes: int = 1, conflict_budget: int | None = None) -> list[int]:
    """Deletion-based core minimization, ``passes`` sweeps over the literals."""
    core = list(core)
    saved = solver.conflict_budget
    solver.conflict_budget = conflict_budget
    try:
        for _ in range(passes):
            changed = False
            for l in list(core):
                if l not in core:
                    continue
                trial = [q for q in core if q != l]
                if solver.solve(trial) is Status.UNSAT:
                    new = solver.core()
                    if len(new) < len(core):
                        core = [q for q in core if q in set(new)]
                        changed = True
            if not changed:
                break
    finally:
        solver.conflict_budget = saved
    return core


def sample(
    clauses: Iterable[Sequence[int]],
    bias: Mapping[int, float],
    n: int,
    seed: int = 0,
    num_vars: int = 0,
) -> list[Assignment]:
    """``n`` models of ``clauses`` drawn with per-variable phase ``bias``."""
    s = Solver(clauses, num_vars=num_vars)
    if s.solve() is not Status.SAT:
        raise UnsatisfiableError("cannot sample an unsatisfiable formula")
    rng = random.Random(seed)
    return [{v: m[v] for v in range(1, len(m))} for m in s.sample_models(n, bias, rng)]
