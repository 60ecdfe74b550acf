import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from skolem.formula import Spec, parse_qdimacs  # noqa: E402
from skolem.learner import SampleMatrix  # noqa: E402

# x1=1 x2=2 y1=3 y2=4 y3=5 y4=6
EX1_TEXT = """c running example
p cnf 6 4
a 1 2 0
e 3 4 5 6 0
1 2 3 0
2 -3 4 0
5 6 0
-5 -6 0
"""

# rows over (x1, x2, y1, y2, y3, y4); y4 = not y3
EX1_ROWS = [
    [0, 0, 1, 1, 0, 1],
    [0, 1, 0, 1, 1, 0],
    [1, 1, 1, 0, 1, 0],
]


def small(clauses, n_in, n_out):
    n = n_in + n_out
    return Spec(n, tuple(tuple(c) for c in clauses), tuple(range(1, n_in + 1)), tuple(range(n_in + 1, n + 1)))


@pytest.fixture
def ex1():
    return parse_qdimacs(EX1_TEXT)


@pytest.fixture
def ex1_samples():
    return SampleMatrix(np.array(EX1_ROWS, dtype=np.uint8), (1, 2, 3, 4, 5, 6))


@pytest.fixture
def ex1_file(tmp_path):
    p = tmp_path / "ex1.qdimacs"
    p.write_text(EX1_TEXT)
    return p
