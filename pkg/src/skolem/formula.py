"""CNF specifications: QDIMACS I/O, cofactors, negation and Tseitin encodings."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from . import funcs
from .funcs import Func

Clause = tuple[int, ...]


class QDimacsError(ValueError):
    """Malformed or unsupported QDIMACS input."""


class CycleError(RuntimeError):
    """Candidate functions depend on each other cyclically."""

    def __init__(self, cycle):
        super().__init__(f"dependency cycle among outputs: {cycle}")
        self.cycle = cycle


@dataclass(frozen=True)
class Spec:
    """A relational specification ``exists Y. F(X, Y)`` in CNF.

    ``aux`` holds variables introduced by encodings (Tseitin definitions added
    to a working formula); they are neither inputs nor outputs and are
    implicitly existentially quantified.
    """

    num_vars: int
    clauses: tuple[Clause, ...]
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    aux: tuple[int, ...] = field(default=())

    def name(self, v: int) -> str:
        """Positional display name: ``x<k>`` for inputs, ``y<k>`` for outputs."""
        if v in self._input_pos:
            return f"x{self._input_pos[v] + 1}"
        if v in self._output_pos:
            return f"y{self._output_pos[v] + 1}"
        return f"a{v}"

    @property
    def _input_pos(self):
        return {v: i for i, v in enumerate(self.inputs)}

    @property
    def _output_pos(self):
        return {v: i for i, v in enumerate(self.outputs)}

    def extend(self, clauses: Iterable[Sequence[int]], num_vars: int | None = None) -> "Spec":
        """Add clauses (and any fresh variables above ``num_vars``) as aux."""
        num_vars = self.num_vars if num_vars is None else num_vars
        fresh = tuple(range(self.num_vars + 1, num_vars + 1))
        return replace(
            self,
            num_vars=num_vars,
            clauses=self.clauses + tuple(normalize_clause(c) for c in clauses),
            aux=self.aux + fresh,
        )

    def base_clauses(self) -> list[Clause]:
        """Clauses that mention no auxiliary variable."""
        aux = set(self.aux)
        if not aux:
            return list(self.clauses)
        return [c for c in self.clauses if not any(abs(l) in aux for l in c)]


def normalize_clause(lits: Iterable[int]) -> Clause | None:
    """Sorted, duplicate-free clause; ``None`` for a tautology."""
    s = set(lits)
    if any(-l in s for l in s):
        return None
    return tuple(sorted(s, key=lambda l: (abs(l), l)))


def parse_qdimacs(text: str | bytes) -> Spec:
    """Parse a 2QBF QDIMACS file (prefix ``a``-block then ``e``-block).

    Free variables become inputs.  Tautologies and duplicate literals are
    dropped.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    num_vars = num_clauses = None
    blocks: list[tuple[str, list[int]]] = []
    clauses: list[Clause] = []
    pending: list[int] = []
    seen_clause_count = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if num_vars is not None:
                raise QDimacsError(f"line {lineno}: duplicate header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise QDimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise QDimacsError(f"line {lineno}: malformed header {line!r}") from None
            if num_vars < 0 or num_clauses < 0:
                raise QDimacsError(f"line {lineno}: negative counts in header")
            continue
        if num_vars is None:
            raise QDimacsError(f"line {lineno}: content before header")
        if line[0] in "ae":
            if seen_clause_count or pending:
                raise QDimacsError(f"line {lineno}: quantifier line after clauses")
            ids = _ints(line[1:], lineno)
            if not ids or ids[-1] != 0:
                raise QDimacsError(f"line {lineno}: quantifier line not terminated by 0")
            ids = ids[:-1]
            for v in ids:
                if v <= 0 or v > num_vars:
                    raise QDimacsError(f"line {lineno}: bad quantified variable {v}")
            if blocks and blocks[-1][0] == line[0]:
                blocks[-1][1].extend(ids)
            else:
                blocks.append((line[0], list(ids)))
            continue
        for l in _ints(line, lineno):
            if l == 0:
                if not pending:
                    raise QDimacsError(f"line {lineno}: empty clause (trivially unsatisfiable)")
                seen_clause_count += 1
                c = normalize_clause(pending)
                if c is not None:
                    clauses.append(c)
                pending = []
            else:
                if abs(l) > num_vars:
                    raise QDimacsError(f"line {lineno}: variable {abs(l)} exceeds header count {num_vars}")
                pending.append(l)
    if num_vars is None:
        raise QDimacsError("missing header")
    if pending:
        raise QDimacsError("last clause not terminated by 0")
    if seen_clause_count != num_clauses:
        raise QDimacsError(f"header declares {num_clauses} clauses, found {seen_clause_count}")

    shape = "".join(q for q, _ in blocks)
    if shape not in ("", "a", "e", "ae"):
        raise QDimacsError(f"unsupported quantifier prefix {shape!r}; expected 2QBF (forall-exists)")
    universal = [v for q, ids in blocks if q == "a" for v in ids]
    existential = [v for q, ids in blocks if q == "e" for v in ids]
    quantified = universal + existential
    if len(set(quantified)) != len(quantified):
        raise QDimacsError("variable quantified more than once")
    qset = set(quantified)
    used = sorted({abs(l) for c in clauses for l in c})
    free = [v for v in used if v not in qset]
    return Spec(
        num_vars=num_vars,
        clauses=tuple(clauses),
        inputs=tuple(universal + free),
        outputs=tuple(existential),
    )


def _ints(s: str, lineno: int) -> list[int]:
    try:
        return [int(t) for t in s.split()]
    except ValueError:
        raise QDimacsError(f"line {lineno}: non-integer token") from None


def write_qdimacs(spec: Spec) -> str:
    lines = [f"p cnf {spec.num_vars} {len(spec.clauses)}"]
    if spec.inputs:
        lines.append("a " + " ".join(map(str, spec.inputs)) + " 0")
    if spec.outputs:
        lines.append("e " + " ".join(map(str, spec.outputs)) + " 0")
    for c in spec.clauses:
        lines.append(" ".join(map(str, c)) + " 0")
    return "\n".join(lines) + "\n"


def cofactor_clauses(clauses: Iterable[Sequence[int]], v: int, b) -> list[Clause]:
    sat = v if b else -v
    out = []
    for c in clauses:
        if sat in c:
            continue
        out.append(tuple(l for l in c if l != -sat))
    return out


def cofactor(spec: Spec, v: int, b) -> Spec:
    """``F|_{v=b}``; an empty clause in the result marks unsatisfiability."""
    if not 1 <= v <= spec.num_vars:
        raise ValueError(f"variable {v} not declared")
    return replace(spec, clauses=tuple(cofactor_clauses(spec.clauses, v, b)))


class Encoder:
    """Fresh-variable allocator shared by the CNF encodings below."""

    def __init__(self, next_var: int):
        self.top = next_var - 1
        self.clauses: list[list[int]] = []
        self._tseitin: dict[int, int] = {}

    def fresh(self) -> int:
        self.top += 1
        return self.top

    def negate(self, clauses: Sequence[Sequence[int]]) -> int:
        """Literal equivalent to the negation of the CNF ``clauses``."""
        out = self.fresh()
        selectors = []
        for c in clauses:
            if len(c) == 1:
                sel = c[0]
            else:
                sel = self.fresh()
                self.clauses.append([-sel, *c])
                for l in c:
                    self.clauses.append([sel, -l])
            selectors.append(sel)
            self.clauses.append([out, sel])
        self.clauses.append([-out, *(-s for s in selectors)])
        return out

    def tseitin(self, f: Func) -> int:
        """Literal equivalent to ``f``; AND nodes get defining variables."""
        lits = self._tseitin
        for n in funcs.postorder([f]):
            if n.uid in lits:
                continue
            if n.op == funcs.CONST:
                t = lits.get(funcs.TRUE.uid)
                if t is None:
                    t = self.fresh()
                    self.clauses.append([t])
                    lits[funcs.TRUE.uid] = t
                lits[n.uid] = t if n.left else -t
            elif n.op == funcs.VAR:
                lits[n.uid] = n.left
            elif n.op == funcs.NOT:
                lits[n.uid] = -lits[n.left.uid]
            else:
                a, b = lits[n.left.uid], lits[n.right.uid]
                g = self.fresh()
                self.clauses += [[-g, a], [-g, b], [g, -a, -b]]
                lits[n.uid] = g
        return lits[f.uid]

    def equal(self, a: int, b: int) -> None:
        self.clauses += [[-a, b], [a, -b]]


def negate_cnf(spec: Spec) -> tuple[Spec, int]:
    """Spec whose extra clauses force the returned literal to ``not F``."""
    enc = Encoder(spec.num_vars + 1)
    out = enc.negate(spec.clauses)
    return spec.extend(enc.clauses, enc.top), out


def tseitin(f: Func, next_var: int) -> tuple[list[list[int]], int, dict[int, int]]:
    """Encode ``f``; returns ``(clauses, out_lit, {node uid: literal})``."""
    enc = Encoder(next_var)
    out = enc.tseitin(f)
    aux = {uid: l for uid, l in enc._tseitin.items() if abs(l) >= next_var}
    return enc.clauses, out, aux


def eval_clauses(clauses: Iterable[Sequence[int]], assignment: Mapping[int, int]) -> bool:
    return all(any((assignment[abs(l)] == 1) == (l > 0) for l in c) for c in clauses)


def ground(psi: Mapping[int, Func], order: Sequence[int]) -> dict[int, Func]:
    """Substitute output leaves away so every function depends on inputs only.

    ``order`` lists the outputs so that each function mentions only outputs
    positioned after it; they are grounded from the back.
    """
    outputs = set(order)
    done: dict[int, Func] = {}
    memo: dict = {}
    for y in reversed(order):
        f = psi[y]
        pending = [v for v in funcs.support(f) if v in outputs and v not in done]
        if pending:
            raise CycleError(_find_cycle(psi, order, y))
        done[y] = funcs.substitute(f, done, memo) if done else f
    return {y: done[y] for y in order}


def _find_cycle(psi, order, start):
    outputs = set(order)
    deps = {y: [v for v in funcs.support(psi[y]) if v in outputs] for y in order}
    path, on_path = [], set()

    def dfs(u):
        path.append(u)
        on_path.add(u)
        for w in deps[u]:
            if w in on_path:
                return path[path.index(w):] + [w]
            found = dfs(w)
            if found:
                return found
        on_path.discard(u)
        path.pop()
        return None

    return dfs(start) or [start]
