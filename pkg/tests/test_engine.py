import random

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from conftest import EX1_TEXT, small
from oracles import assignments, random_spec, satisfies, skolem_holds
from skolem import funcs
from skolem.certify import is_skolem_vector
from skolem.engine import Config, SkolemSynthesizer, SynthesisTimeout, synthesize

FAST = dict(min_samples=50, max_samples=200)


def partition_ok(stats, n):
    return stats.unates + stats.unique + stats.learned + stats.repaired + stats.self_substituted + stats.empty == n


def test_running_example_default(ex1):
    res = synthesize(ex1, Config(seed=0))
    assert res.stats.status == "solved-prerepair"
    assert res.status[4] == "unate-pos" and res.status[6] == "unique"
    assert skolem_holds(ex1, res.grounded)
    assert is_skolem_vector(ex1, res.vector())
    assert partition_ok(res.stats, 4)


def test_running_example_with_samples(ex1, ex1_samples):
    res = synthesize(ex1, Config(unates=False, lex="always"), samples=ex1_samples)
    assert res.stats.chunks == [[3, 4], [5]]
    assert res.order == [6, 5, 4, 3]
    assert res.trace[0]["ind"] == [4]
    assert funcs.equivalent(res.psi[4], ~funcs.var(1) | funcs.var(3))
    assert res.stats.status == "solved-repair"
    assert skolem_holds(ex1, res.grounded)


def test_unsat_spec_gives_empty():
    res = synthesize(small([[2], [-2]], 1, 1))
    assert res.stats.status == "solved-prerepair" and res.stats.empty == 1
    assert res.grounded[2] is funcs.FALSE


def test_all_unate_skips_learning():
    res = synthesize(small([[1, 2], [3]], 1, 2))
    assert res.stats.status == "solved-prerepair"
    assert res.stats.unates == 2 and res.stats.samples == 0
    assert "learn" not in res.stats.times and res.stats.iterations == 0


def test_no_outputs():
    res = synthesize(small([[1]], 1, 0))
    assert res.solved and res.vector() == []


def test_deterministic():
    rng = random.Random(31)
    for _ in range(10):
        spec = random_spec(rng)
        a = synthesize(spec, Config(seed=5, **FAST))
        b = synthesize(spec, Config(seed=5, **FAST))
        assert a.to_aag() == b.to_aag()
        assert a.stats.to_dict() | {"times": None} == b.stats.to_dict() | {"times": None}


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("SKOLEM_SEED", "17")
    assert Config().resolved_seed() == 17
    assert Config(seed=3).resolved_seed() == 3


def test_stats_partition_on_fuzz():
    rng = random.Random(32)
    for _ in range(40):
        spec = random_spec(rng)
        res = synthesize(spec, Config(seed=1, unates=False, definitions=False, **FAST))
        assert res.solved and partition_ok(res.stats, len(spec.outputs))
        assert skolem_holds(spec, res.grounded)
        assert res.stats.to_dict()["schema"] == 1


def test_timeout():
    res = synthesize(small([[1, 2]], 1, 1), Config(timeout=1e-9))
    assert res.stats.status == "timeout" and res.grounded is None


@pytest.mark.parametrize(
    "kw",
    [dict(cluster="spectral"), dict(lex="maybe"), dict(s=0), dict(k=-1), dict(min_samples=10, max_samples=5), dict(timeout=0)],
)
def test_config_rejects(kw):
    with pytest.raises(ValueError):
        Config(**kw)


def test_estimator_fit_predict():
    est = SkolemSynthesizer(seed=0, **FAST).fit(EX1_TEXT)
    X = np.array(list(list(a.values()) for a in assignments([1, 2])), dtype=np.uint8)
    Y = est.predict(X)
    assert Y.shape == (4, 4)
    for x, y in zip(X, Y):
        assert satisfies(est.spec_.clauses, {1: x[0], 2: x[1], 3: y[0], 4: y[1], 5: y[2], 6: y[3]})
    assert est.to_aag().startswith("aag")
    assert est.n_features_in_ == 2 and est.status_[6] == "unique"


def test_estimator_api():
    est = SkolemSynthesizer(k=2, lex="off")
    assert clone(est).get_params()["k"] == 2
    with pytest.raises(NotFittedError):
        est.predict(np.zeros((1, 2)))
    est.fit(EX1_TEXT)
    with pytest.raises(ValueError):
        est.predict(np.zeros((1, 3)))
    with pytest.raises(ValueError):
        est.predict(np.full((1, 2), 3))


def test_estimator_timeout():
    with pytest.raises(SynthesisTimeout):
        SkolemSynthesizer(timeout=1e-9).fit(EX1_TEXT)
