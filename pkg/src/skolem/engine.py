"""End-to-end synthesis: preprocessing, learning, repair, grounding."""

from __future__ import annotations

import os
import time
from dataclasses import asdict, dataclass, field, fields
from typing import Callable

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import funcs
from ._validation import check_binary_array, check_positive, check_spec
from .aiger import write_aag
from .cegar import Deadline, RepairLog, SolverUnknown, repair_loop
from .definability import unidef
from .formula import Spec, ground, parse_qdimacs
from .funcs import Func
from .learner import (
    SampleMatrix,
    candidate_skf,
    cluster_y,
    find_order,
    get_samples,
    random_clusters,
    sample_count,
)
from .sat import SatError, Solver, Status, UnsatisfiableError

STATS_SCHEMA = 1


class SynthesisTimeout(TimeoutError):
    def __init__(self, stats):
        super().__init__("synthesis timed out")
        self.stats = stats


class SynthesisFailure(RuntimeError):
    def __init__(self, stats, reason=""):
        super().__init__(f"synthesis ended with status {stats.status}: {reason}")
        self.stats = stats


@dataclass
class Config:
    k: int = 3
    s: int = 5
    min_samples: int = 1000
    max_samples: int = 10000
    impurity: float = 0.005
    self_sub_threshold: int = 10
    lex_ratio: int = 50
    seed: int | None = None
    timeout: float | None = None
    cluster: str = "graph"
    lex: str = "on"
    unates: bool = True
    definitions: bool = True
    core_passes: int = 1
    proof_budget: int | None = None
    max_repair_iterations: int | None = 1000

    def __post_init__(self):
        if self.cluster not in ("graph", "random"):
            raise ValueError(f"cluster must be graph or random, not {self.cluster!r}")
        if self.lex not in ("on", "off", "always"):
            raise ValueError(f"lex must be on, off or always, not {self.lex!r}")
        check_positive("k", self.k, allow_zero=True)
        check_positive("s", self.s)
        check_positive("min_samples", self.min_samples)
        check_positive("max_samples", self.max_samples)
        check_positive("impurity", self.impurity, allow_zero=True)
        check_positive("self_sub_threshold", self.self_sub_threshold, allow_zero=True)
        check_positive("lex_ratio", self.lex_ratio)
        check_positive("timeout", self.timeout)
        check_positive("core_passes", self.core_passes, allow_zero=True)
        check_positive("proof_budget", self.proof_budget)
        check_positive("max_repair_iterations", self.max_repair_iterations)
        if self.min_samples > self.max_samples:
            raise ValueError("min_samples exceeds max_samples")

    def resolved_seed(self) -> int:
        if self.seed is not None:
            return int(self.seed)
        return int(os.environ.get("SKOLEM_SEED", "0"))


@dataclass
class RunStats:
    status: str = "unknown"
    unates: int = 0
    unique: int = 0
    learned: int = 0
    repaired: int = 0
    self_substituted: int = 0
    empty: int = 0
    iterations: int = 0
    repairs: int = 0
    escalated: bool = False
    fallback: bool = False
    samples: int = 0
    chunks: list = field(default_factory=list)
    definitions_skipped: int = 0
    times: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schema"] = STATS_SCHEMA
        return d


@dataclass
class SynthesisResult:
    spec: Spec
    psi: dict[int, Func] | None
    grounded: dict[int, Func] | None
    order: list[int]
    status: dict[int, str]
    stats: RunStats
    working: Spec | None = None
    trace: list = field(default_factory=list)
    samples: SampleMatrix | None = None

    @property
    def solved(self):
        return self.stats.status.startswith("solved")

    def vector(self) -> list[Func]:
        return [self.grounded[y] for y in self.spec.outputs]

    def to_aag(self) -> str:
        return write_aag(self.vector(), self.spec.inputs)


def _count(stats: RunStats, status: dict[int, str]) -> None:
    key = {
        "unate-pos": "unates",
        "unate-neg": "unates",
        "unique": "unique",
        "learned": "learned",
        "repaired": "repaired",
        "self-substituted": "self_substituted",
        "empty": "empty",
    }
    for name in set(key.values()):
        setattr(stats, name, 0)
    for s in status.values():
        setattr(stats, key[s], getattr(stats, key[s]) + 1)


def synthesize(
    spec: Spec,
    cfg: Config | None = None,
    *,
    samples: SampleMatrix | None = None,
    on_trace: Callable[[dict], None] | None = None,
    on_tree: Callable | None = None,
) -> SynthesisResult:
    """Skolem functions for ``exists Y. F(X, Y)``.

    ``samples`` replaces the sampler (columns must cover inputs and outputs).
    Timeouts and undecided solver calls end in a result whose stats status is
    ``timeout`` or ``unknown`` and whose functions are ``None``.
    """
    cfg = cfg or Config()
    check_spec(spec)
    seed = cfg.resolved_seed()
    start = time.monotonic()
    deadline = start + cfg.timeout if cfg.timeout is not None else None
    stats = RunStats()
    status: dict[int, str] = {}
    result = SynthesisResult(spec, None, None, [], status, stats)
    phase_start = start

    def phase(name):
        nonlocal phase_start
        now = time.monotonic()
        stats.times[name] = round(now - phase_start, 6)
        phase_start = now
        if deadline is not None and now > deadline:
            raise Deadline(name)

    try:
        s = Solver(spec.clauses, num_vars=spec.num_vars, deadline=deadline)
        st = s.solve()
        if st is Status.UNKNOWN:
            raise SolverUnknown("satisfiability check undecided")
        if st is Status.UNSAT:
            psi = {y: funcs.FALSE for y in spec.outputs}
            status.update({y: "empty" for y in spec.outputs})
            result.psi, result.grounded, result.order = psi, dict(psi), list(spec.outputs)
            stats.status = "solved-prerepair"
            phase("check")
            _count(stats, status)
            return result
        phase("check")

        ud = unidef(
            spec,
            unates=cfg.unates,
            definitions=cfg.definitions,
            core_passes=cfg.core_passes,
            proof_budget=cfg.proof_budget,
            deadline=deadline,
        )
        result.working = ud.working
        stats.definitions_skipped = len(ud.skipped)
        psi: dict[int, Func] = {}
        for d in ud.determined:
            psi[d.output] = d.function
            if d.kind == "unate":
                status[d.output] = "unate-pos" if d.function is funcs.TRUE else "unate-neg"
            else:
                status[d.output] = "unique"
        dependson = ud.dependson
        fixed = ud.determined.outputs
        phase("preprocess")

        log = RepairLog()
        rest = [y for y in spec.outputs if y not in fixed]
        if rest:
            if samples is None:
                n = sample_count(len(rest), cfg.min_samples, cfg.max_samples)
                samples = get_samples(ud.working, n, seed=seed, deadline=deadline)
            stats.samples = len(samples)
            result.samples = samples
            phase("sample")
            if cfg.cluster == "graph":
                chunks = cluster_y(spec, cfg.k, cfg.s, fixed)
            else:
                chunks = random_clusters(rest, cfg.s, seed)
            stats.chunks = [list(c) for c in chunks]
            for chunk in chunks:
                learned, tree, features = candidate_skf(
                    samples, ud.working, chunk, dependson, min_impurity_decrease=cfg.impurity
                )
                psi.update(learned)
                status.update({y: "learned" for y in chunk})
                if on_tree:
                    on_tree(chunk, tree, features)
            phase("learn")
        order = find_order(dependson, spec.outputs)
        result.order = order
        if rest:
            repair_loop(
                ud.working,
                psi,
                order,
                fixed=fixed,
                lex=cfg.lex,
                lex_ratio=cfg.lex_ratio,
                self_sub_threshold=cfg.self_sub_threshold,
                max_iterations=cfg.max_repair_iterations,
                core_passes=cfg.core_passes,
                deadline=deadline,
                log=log,
                on_trace=on_trace,
            )
            status.update(log.status)
            phase("repair")
        result.trace = log.trace
        stats.iterations = log.iterations
        stats.repairs = log.repairs
        stats.escalated = log.escalated
        stats.fallback = log.fallback
        if log.iterations == 0:
            stats.status = "solved-prerepair"
        elif log.self_substitutions:
            stats.status = "solved-selfsub"
        else:
            stats.status = "solved-repair"
        result.psi = psi
        result.grounded = ground(psi, order)
        phase("ground")
    except Deadline:
        stats.status = "timeout"
        result.psi = result.grounded = None
    except (SolverUnknown, SatError) as exc:
        if isinstance(exc, UnsatisfiableError):
            raise
        timed_out = deadline is not None and time.monotonic() > deadline
        stats.status = "timeout" if timed_out else "unknown"
        result.psi = result.grounded = None
    stats.times["total"] = round(time.monotonic() - start, 6)
    _count(stats, status)
    return result


_PARAMS = [f.name for f in fields(Config)]


class SkolemSynthesizer(BaseEstimator):
    """Estimator wrapper: ``fit`` synthesizes, ``predict`` evaluates the vector.

    ``fit`` takes a :class:`Spec` (or QDIMACS text); ``predict`` takes a 0/1
    matrix with one column per input in declared order and returns one column
    per output.
    """

    def __init__(
        self,
        k=3,
        s=5,
        min_samples=1000,
        max_samples=10000,
        impurity=0.005,
        self_sub_threshold=10,
        lex_ratio=50,
        seed=None,
        timeout=None,
        cluster="graph",
        lex="on",
        unates=True,
        definitions=True,
        core_passes=1,
        proof_budget=None,
        max_repair_iterations=1000,
    ):
        self.k = k
        self.s = s
        self.min_samples = min_samples
        self.max_samples = max_samples
        self.impurity = impurity
        self.self_sub_threshold = self_sub_threshold
        self.lex_ratio = lex_ratio
        self.seed = seed
        self.timeout = timeout
        self.cluster = cluster
        self.lex = lex
        self.unates = unates
        self.definitions = definitions
        self.core_passes = core_passes
        self.proof_budget = proof_budget
        self.max_repair_iterations = max_repair_iterations

    def config(self) -> Config:
        return Config(**{k: getattr(self, k) for k in _PARAMS})

    def fit(self, spec, samples=None):
        if isinstance(spec, (str, bytes)):
            spec = parse_qdimacs(spec)
        spec = check_spec(spec)
        res = synthesize(spec, self.config(), samples=samples)
        self.stats_ = res.stats
        if res.stats.status == "timeout":
            raise SynthesisTimeout(res.stats)
        if not res.solved:
            raise SynthesisFailure(res.stats)
        self.spec_ = spec
        self.inputs_ = spec.inputs
        self.outputs_ = spec.outputs
        self.n_features_in_ = len(spec.inputs)
        self.functions_ = res.psi
        self.skolem_vector_ = res.grounded
        self.order_ = res.order
        self.status_ = res.status
        self.trace_ = res.trace
        return self

    def predict(self, X):
        check_is_fitted(self, "skolem_vector_")
        X = check_binary_array(X, ensure_2d=True) if self.n_features_in_ else np.zeros((len(X), 0), dtype=np.uint8)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} input columns, got {X.shape[1]}")
        env = {v: X[:, j].astype(bool) for j, v in enumerate(self.inputs_)}
        out = np.empty((X.shape[0], len(self.outputs_)), dtype=np.uint8)
        for j, y in enumerate(self.outputs_):
            val = funcs.evaluate(self.skolem_vector_[y], env)
            out[:, j] = np.broadcast_to(np.asarray(val, dtype=np.uint8), (X.shape[0],))
        return out

    def to_aag(self) -> str:
        check_is_fitted(self, "skolem_vector_")
        return write_aag([self.skolem_vector_[y] for y in self.outputs_], self.inputs_)
