import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skolem import funcs
from skolem.aiger import AigerError, read_aag, write_aag
from strategies import func_over


def test_constant_output():
    text = write_aag([funcs.TRUE], [1])
    assert text.splitlines()[0] == "aag 1 1 0 1 0"
    assert text.splitlines()[2] == "1"


def test_negated_input():
    lines = write_aag([~funcs.var(1)], [1]).splitlines()
    assert lines[1] == "2"
    assert lines[2] == "3"


def test_rejects_non_input():
    with pytest.raises(AigerError):
        write_aag([funcs.var(2)], [1])


def test_shared_gates_written_once():
    g = funcs.var(1) & funcs.var(2)
    header = write_aag([g, ~g, g | funcs.var(3)], [1, 2, 3]).splitlines()[0].split()
    assert header[5] == "2"


@settings(max_examples=150, deadline=None)
@given(st.lists(func_over([1, 2, 3]), min_size=1, max_size=4))
def test_round_trip(fs):
    back = read_aag(write_aag(fs, [1, 2, 3]), inputs=[1, 2, 3])
    assert len(back) == len(fs)
    for f, g in zip(fs, back):
        assert funcs.equivalent(f, g)


@pytest.mark.parametrize(
    "text",
    [
        "aig 1 1 0 1 0\n2\n2\n",
        "aag 1 1 0 1 0\n2\n",
        "aag 2 1 0 1 1\n2\n4\n4 2 6\n",
        "aag 1 1 1 1 0\n2\n4 2\n2\n",
        "garbage",
    ],
)
def test_malformed(text):
    with pytest.raises(AigerError):
        read_aag(text, inputs=[1])
