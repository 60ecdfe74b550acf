"""Hash-consed Boolean function DAGs built from AND, NOT, variables and constants.

Every structurally distinct node exists exactly once, so identity comparison
(``f is g``) is structural equality.  OR and XOR are lowered to AND/NOT at
construction time, which keeps the DAG directly emittable as an and-inverter
graph.

    >>> f = var(1) & ~var(2)
    >>> (var(1) & ~var(2)) is f
    True
    >>> to_prefix(~var(3))
    'not(v3)'
"""

from __future__ import annotations

import threading
from typing import Callable, Iterable, Mapping

import numpy as np

CONST = 0
VAR = 1
NOT = 2
AND = 3

_OP_NAMES = {CONST: "const", VAR: "var", NOT: "not", AND: "and"}


class Func:
    """One interned node.  Build instances through the module constructors."""

    __slots__ = ("op", "left", "right", "uid")

    def __init__(self, op, left, right, uid):
        self.op = op
        self.left = left
        self.right = right
        self.uid = uid

    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return neg(self)

    def __xor__(self, other):
        return xor(self, other)

    def __repr__(self):
        return f"Func({to_prefix(self)})"

    def __reduce__(self):
        # interning is per process; rebuild through the constructors
        return (_rebuild, (_serialize(self),))

    @property
    def is_const(self):
        return self.op == CONST

    @property
    def value(self):
        """Constant value (0/1) of a CONST node, ``None`` otherwise."""
        return self.left if self.op == CONST else None


_lock = threading.Lock()
_table: dict = {}


def _intern(op, left, right):
    key = (
        op,
        left.uid if isinstance(left, Func) else left,
        right.uid if isinstance(right, Func) else right,
    )
    node = _table.get(key)
    if node is None:
        with _lock:
            node = _table.get(key)
            if node is None:
                node = Func(op, left, right, len(_table))
                _table[key] = node
    return node


FALSE = _intern(CONST, 0, None)
TRUE = _intern(CONST, 1, None)


def const(b) -> Func:
    return TRUE if b else FALSE


def var(v: int) -> Func:
    if v <= 0:
        raise ValueError(f"variable ids are positive, got {v}")
    return _intern(VAR, v, None)


def lit(l: int) -> Func:
    """Function of a signed DIMACS literal."""
    return var(l) if l > 0 else neg(var(-l))


def neg(f: Func) -> Func:
    if f.op == NOT:
        return f.left
    if f.op == CONST:
        return TRUE if f.left == 0 else FALSE
    return _intern(NOT, f, None)


def _complementary(a: Func, b: Func) -> bool:
    return (a.op == NOT and a.left is b) or (b.op == NOT and b.left is a)


def conj(a: Func, b: Func) -> Func:
    if a is FALSE or b is FALSE:
        return FALSE
    if a is TRUE:
        return b
    if b is TRUE or a is b:
        return a
    if _complementary(a, b):
        return FALSE
    if a.uid > b.uid:
        a, b = b, a
    return _intern(AND, a, b)


def disj(a: Func, b: Func) -> Func:
    return neg(conj(neg(a), neg(b)))


def xor(a: Func, b: Func) -> Func:
    return disj(conj(a, neg(b)), conj(neg(a), b))


def iff(a: Func, b: Func) -> Func:
    return neg(xor(a, b))


def conj_all(fs: Iterable[Func]) -> Func:
    out = TRUE
    for f in fs:
        out = conj(out, f)
        if out is FALSE:
            break
    return out


def disj_all(fs: Iterable[Func]) -> Func:
    out = FALSE
    for f in fs:
        out = disj(out, f)
        if out is TRUE:
            break
    return out


def cube(lits: Iterable[int]) -> Func:
    return conj_all(lit(l) for l in lits)


def clause(lits: Iterable[int]) -> Func:
    return disj_all(lit(l) for l in lits)


def from_cnf(clauses: Iterable[Iterable[int]]) -> Func:
    return conj_all(clause(c) for c in clauses)


def postorder(roots: Iterable[Func]) -> list[Func]:
    """All nodes reachable from ``roots``, children before parents."""
    order = []
    seen = set()
    for root in roots:
        if root.uid in seen:
            continue
        stack = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if node.uid in seen:
                continue
            seen.add(node.uid)
            stack.append((node, True))
            if node.op == AND:
                stack.append((node.right, False))
                stack.append((node.left, False))
            elif node.op == NOT:
                stack.append((node.left, False))
    return order


def support(f: Func) -> set[int]:
    return {n.left for n in postorder([f]) if n.op == VAR}


def size(f: Func) -> int:
    """Number of AND nodes in the DAG of ``f``."""
    return sum(1 for n in postorder([f]) if n.op == AND)


def tree_size(f: Func) -> int:
    """Node count of ``f`` unfolded into a tree (no sharing)."""
    counts: dict[int, int] = {}
    for n in postorder([f]):
        if n.op == AND:
            counts[n.uid] = 1 + counts[n.left.uid] + counts[n.right.uid]
        elif n.op == NOT:
            counts[n.uid] = 1 + counts[n.left.uid]
        else:
            counts[n.uid] = 1
    return counts[f.uid]


def dag_size(f: Func) -> int:
    return len(postorder([f]))


def substitute(f: Func, mapping: Mapping[int, Func], _memo=None) -> Func:
    """Replace variable leaves by functions, simultaneously."""
    memo = {} if _memo is None else _memo
    for n in postorder([f]):
        if n.uid in memo:
            continue
        if n.op == VAR:
            memo[n.uid] = mapping.get(n.left, n)
        elif n.op == NOT:
            memo[n.uid] = neg(memo[n.left.uid])
        elif n.op == AND:
            memo[n.uid] = conj(memo[n.left.uid], memo[n.right.uid])
        else:
            memo[n.uid] = n
    return memo[f.uid]


def rename(f: Func, mapping: Mapping[int, int]) -> Func:
    return substitute(f, {a: var(b) for a, b in mapping.items()})


def evaluate(f: Func, env) -> object:
    """Evaluate ``f`` under ``env``.

    ``env`` maps variable id to a truth value; values may be Python ints/bools
    or equally shaped numpy arrays, in which case the result is an array.
    Missing variables raise ``KeyError``.
    """
    vals: dict[int, object] = {}
    for n in postorder([f]):
        if n.op == CONST:
            vals[n.uid] = bool(n.left)
        elif n.op == VAR:
            vals[n.uid] = np.asarray(env[n.left], dtype=bool) if _is_array(env[n.left]) else bool(env[n.left])
        elif n.op == NOT:
            vals[n.uid] = np.logical_not(vals[n.left.uid]) if _is_array(vals[n.left.uid]) else not vals[n.left.uid]
        else:
            a, b = vals[n.left.uid], vals[n.right.uid]
            if _is_array(a) or _is_array(b):
                vals[n.uid] = np.logical_and(a, b)
            else:
                vals[n.uid] = a and b
    return vals[f.uid]


def _is_array(v):
    return isinstance(v, np.ndarray)


def to_prefix(f: Func, name: Callable[[int], str] | None = None) -> str:
    """Debug dump in prefix notation, e.g. ``and(not(x1), y3)``.

    AND children are printed in sorted order of their own dumps so the text
    does not depend on node creation order.
    """
    name = name or (lambda v: f"v{v}")
    text: dict[int, str] = {}
    for n in postorder([f]):
        if n.op == CONST:
            text[n.uid] = str(n.left)
        elif n.op == VAR:
            text[n.uid] = name(n.left)
        elif n.op == NOT:
            text[n.uid] = f"not({text[n.left.uid]})"
        else:
            a, b = sorted((text[n.left.uid], text[n.right.uid]))
            text[n.uid] = f"and({a}, {b})"
    return text[f.uid]


def _serialize(f: Func):
    nodes = postorder([f])
    index = {n.uid: i for i, n in enumerate(nodes)}
    out = []
    for n in nodes:
        if n.op in (CONST, VAR):
            out.append((n.op, n.left, None))
        elif n.op == NOT:
            out.append((NOT, index[n.left.uid], None))
        else:
            out.append((AND, index[n.left.uid], index[n.right.uid]))
    return out


def _rebuild(encoded) -> Func:
    built: list[Func] = []
    for op, a, b in encoded:
        if op == CONST:
            built.append(const(a))
        elif op == VAR:
            built.append(var(a))
        elif op == NOT:
            built.append(neg(built[a]))
        else:
            built.append(conj(built[a], built[b]))
    return built[-1]


def truth_table(f: Func, variables: list[int]) -> tuple[int, ...]:
    """Truth table of ``f`` over ``variables`` (first variable is the MSB)."""
    n = len(variables)
    rows = np.arange(1 << n)
    env = {v: (rows >> (n - 1 - i)) & 1 for i, v in enumerate(variables)}
    for v in support(f) - set(variables):
        raise KeyError(f"variable {v} not among truth-table variables")
    out = evaluate(f, env)
    if not _is_array(out):
        out = np.full(1 << n, out)
    return tuple(int(b) for b in out)


def equivalent(f: Func, g: Func) -> bool:
    """Semantic equivalence by exhaustive evaluation over the joint support."""
    variables = sorted(support(f) | support(g))
    if len(variables) > 20:
        raise ValueError("too many variables for exhaustive equivalence check")
    return truth_table(f, variables) == truth_table(g, variables)
