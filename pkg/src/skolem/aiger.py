"""ASCII AIGER (``aag``) output of grounded Skolem vectors, and a reader."""

from __future__ import annotations

from typing import Sequence

from . import funcs
from .funcs import Func


class AigerError(ValueError):
    pass


def write_aag(functions: Sequence[Func], inputs: Sequence[int], symbols: bool = True) -> str:
    """Combinational AAG with ``inputs`` as primary inputs, one output per function.

    AND nodes are shared through the hash-consed DAG, so the circuit is
    structurally hashed by construction.
    """
    index = {v: i + 1 for i, v in enumerate(inputs)}
    lits: dict[int, int] = {}
    gates: list[tuple[int, int, int]] = []
    next_index = len(inputs) + 1
    for n in funcs.postorder(functions):
        if n.op == funcs.CONST:
            lits[n.uid] = n.left
        elif n.op == funcs.VAR:
            if n.left not in index:
                raise AigerError(f"function depends on non-input variable {n.left}")
            lits[n.uid] = 2 * index[n.left]
        elif n.op == funcs.NOT:
            lits[n.uid] = lits[n.left.uid] ^ 1
        else:
            a, b = lits[n.left.uid], lits[n.right.uid]
            lits[n.uid] = 2 * next_index
            gates.append((2 * next_index, max(a, b), min(a, b)))
            next_index += 1
    m = len(inputs) + len(gates)
    lines = [f"aag {m} {len(inputs)} 0 {len(functions)} {len(gates)}"]
    lines += [str(2 * (i + 1)) for i in range(len(inputs))]
    lines += [str(lits[f.uid]) for f in functions]
    lines += [f"{g} {a} {b}" for g, a, b in gates]
    if symbols:
        lines += [f"i{i} x{v}" for i, v in enumerate(inputs)]
        lines += [f"o{j} psi{j}" for j in range(len(functions))]
    return "\n".join(lines) + "\n"


def read_aag(text: str | bytes, inputs: Sequence[int] | None = None) -> list[Func]:
    """Read a combinational AAG; input ``i`` becomes variable ``inputs[i]``.

    Without ``inputs`` the AIGER input indices ``1..I`` are used as ids.
    """
    if isinstance(text, bytes):
        text = text.decode("ascii")
    lines = text.splitlines()
    if not lines:
        raise AigerError("empty file")
    head = lines[0].split()
    if len(head) != 6 or head[0] != "aag":
        raise AigerError(f"bad header {lines[0]!r}")
    try:
        m, i, l, o, a = map(int, head[1:])
    except ValueError:
        raise AigerError(f"bad header {lines[0]!r}") from None
    if l:
        raise AigerError("latches are not supported")
    if len(lines) < 1 + i + o + a:
        raise AigerError("truncated file")
    if inputs is None:
        inputs = list(range(1, i + 1))
    if len(inputs) != i:
        raise AigerError(f"file has {i} inputs, expected {len(inputs)}")
    try:
        body = [list(map(int, ln.split())) for ln in lines[1:1 + i + o + a]]
    except ValueError:
        raise AigerError("non-integer token in body") from None
    node: dict[int, Func] = {0: funcs.FALSE}
    for k in range(i):
        if len(body[k]) != 1 or body[k][0] % 2 or body[k][0] == 0:
            raise AigerError(f"bad input line {k + 2}")
        node[body[k][0] // 2] = funcs.var(inputs[k])
    outs = [row[0] for row in body[i:i + o]]
    ands = body[i + o:]

    def lit(x):
        if x // 2 not in node:
            raise AigerError(f"undefined literal {x}")
        f = node[x // 2]
        return funcs.neg(f) if x & 1 else f

    for row in ands:
        if len(row) != 3 or row[0] % 2:
            raise AigerError(f"bad AND line {row}")
        node[row[0] // 2] = funcs.conj(lit(row[1]), lit(row[2]))
    if max(node) > m:
        raise AigerError("variable index exceeds header maximum")
    return [lit(x) for x in outs]
