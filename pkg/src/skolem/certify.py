"""Stand-alone validity check for a vector of functions over the inputs.

Only the CNF encodings and the SAT solver are used here, so the check does
not share code with the synthesis loop it is meant to audit.
"""

from __future__ import annotations

from typing import Sequence

from . import funcs
from .formula import Encoder, Spec
from .funcs import Func
from .sat import Solver, Status


def is_skolem_vector(spec: Spec, functions: Sequence[Func], *, deadline=None) -> bool | None:
    """True iff ``F(X, Y) -> F(X, functions(X))`` is valid; ``None`` if undecided.

    ``functions[i]`` is the function for ``spec.outputs[i]`` and must mention
    inputs only.
    """
    if len(functions) != len(spec.outputs):
        raise ValueError(f"expected {len(spec.outputs)} functions, got {len(functions)}")
    inputs = set(spec.inputs)
    for f in functions:
        extra = funcs.support(f) - inputs
        if extra:
            raise ValueError(f"function mentions non-input variables {sorted(extra)}")
    enc = Encoder(spec.num_vars + 1)
    image = {y: enc.tseitin(f) for y, f in zip(spec.outputs, functions)}
    # F with every output replaced by the literal of its function
    substituted = [[(image[abs(l)] if l > 0 else -image[abs(l)]) if abs(l) in image else l for l in c] for c in spec.clauses]
    bad = enc.negate(substituted)
    s = Solver([list(c) for c in spec.clauses] + enc.clauses + [[bad]], num_vars=enc.top, deadline=deadline)
    st = s.solve()
    if st is Status.UNKNOWN:
        return None
    return st is Status.UNSAT
