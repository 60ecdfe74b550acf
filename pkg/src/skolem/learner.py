"""Sampling, output clustering, decision-tree candidates and the dependency order."""

from __future__ import annotations

import csv
import heapq
import io
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import networkx as nx
import numpy as np

from . import funcs
from .formula import CycleError, Spec
from .funcs import Func
from .sat import Solver, Status, UnsatisfiableError
from .tree import MultiLabelDecisionTree


@dataclass
class SampleMatrix:
    """Rows of 0/1 values; ``columns[j]`` is the variable of column ``j``."""

    data: np.ndarray
    columns: tuple[int, ...]

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 2 or data.shape[1] != len(self.columns):
            raise ValueError(f"sample data of shape {data.shape} does not match {len(self.columns)} columns")
        if data.size and not np.isin(data, (0, 1)).all():
            raise ValueError("sample data must contain only 0/1 values")
        self.data = data.astype(np.uint8, copy=False)
        self._index = {v: j for j, v in enumerate(self.columns)}

    def __len__(self):
        return self.data.shape[0]

    def column(self, v: int) -> np.ndarray:
        return self.data[:, self._index[v]]

    def select(self, variables: Sequence[int]) -> np.ndarray:
        return self.data[:, [self._index[v] for v in variables]]

    def rows(self) -> Iterable[dict[int, int]]:
        for r in self.data:
            yield {v: int(b) for v, b in zip(self.columns, r)}

    def to_csv(self, names: Mapping[int, str] | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([names[v] if names else v for v in self.columns])
        w.writerows(self.data.tolist())
        return buf.getvalue()


def sample_count(num_learned: int, min_samples: int = 1000, max_samples: int = 10000) -> int:
    return max(min_samples, min(max_samples, 50 * num_learned))


def adaptive_bias(q: float) -> float:
    if q >= 0.8:
        return 0.9
    if q <= 0.2:
        return 0.1
    return 0.5


def get_samples(
    spec: Spec,
    n: int,
    *,
    seed: int = 0,
    warmup: int = 500,
    deadline: float | None = None,
) -> SampleMatrix:
    """``n`` models of the working formula projected onto inputs and outputs.

    The first ``warmup`` rows use bias 0.5 everywhere; each output is then
    biased toward the value it took most often.
    """
    columns = tuple(spec.inputs) + tuple(spec.outputs)
    solver = Solver(spec.clauses, num_vars=spec.num_vars, deadline=deadline)
    if solver.solve() is not Status.SAT:
        raise UnsatisfiableError("cannot sample an unsatisfiable formula")
    rng = random.Random(seed)
    first = min(warmup, n)
    rows = list(solver.sample_models(first, {}, rng))
    if n > first:
        ones = {y: sum(r[y] for r in rows) / len(rows) for y in spec.outputs}
        bias = {y: adaptive_bias(q) for y, q in ones.items()}
        rows += solver.sample_models(n - first, bias, rng)
    data = np.array([[r[v] for v in columns] for r in rows], dtype=np.uint8)
    return SampleMatrix(data, columns)


def primal_graph(spec: Spec, exclude: Iterable[int] = ()) -> nx.Graph:
    exclude = set(exclude)
    outputs = [y for y in spec.outputs if y not in exclude]
    g = nx.Graph()
    g.add_nodes_from(outputs)
    keep = set(outputs)
    for c in spec.clauses:
        ys = sorted({abs(l) for l in c if abs(l) in keep})
        for i, a in enumerate(ys):
            for b in ys[i + 1:]:
                g.add_edge(a, b)
    return g


def cluster_y(spec: Spec, k: int = 3, s: int = 5, exclude: Iterable[int] = ()) -> list[list[int]]:
    """Partition the outputs outside ``exclude`` into chunks of at most ``s``.

    Each chunk is the ``k``-hop neighbourhood of the first unassigned output in
    the primal graph, with the radius shrunk until it fits; the radius starts
    again from ``k`` for every new chunk.
    """
    if k < 0 or s < 1:
        raise ValueError("need k >= 0 and s >= 1")
    g = primal_graph(spec, exclude)
    chunks = []
    for y in spec.outputs:
        if y not in g:
            continue
        r = k
        while True:
            near = nx.single_source_shortest_path_length(g, y, cutoff=r)
            if len(near) <= s:
                break
            r -= 1
            assert r >= 0, "radius 0 neighbourhood is a single vertex"
        chunk = sorted(near, key=spec.outputs.index)
        chunks.append(chunk)
        g.remove_nodes_from(chunk)
    return chunks


def random_clusters(outputs: Sequence[int], s: int = 5, seed: int = 0) -> list[list[int]]:
    ys = list(outputs)
    random.Random(seed).shuffle(ys)
    return [ys[i:i + s] for i in range(0, len(ys), s)]


def reaches(dependson: Mapping[int, set[int]], targets: Iterable[int]) -> set[int]:
    """Outputs from which some target is reachable through ``dependson``."""
    back: dict[int, set[int]] = {}
    for a, deps in dependson.items():
        for b in deps:
            back.setdefault(b, set()).add(a)
    seen = set()
    stack = list(targets)
    while stack:
        v = stack.pop()
        for u in back.get(v, ()):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def feature_set(spec: Spec, chunk: Sequence[int], dependson: Mapping[int, set[int]]) -> list[int]:
    """Inputs plus outputs that cannot reach the chunk in the dependency graph."""
    chunk_set = set(chunk)
    blocked = reaches(dependson, chunk) | chunk_set
    feats = list(spec.inputs) + [y for y in spec.outputs if y not in blocked]
    return sorted(feats)


def path_formula(path, features: Sequence[int]) -> Func:
    return funcs.cube(features[f] if v else -features[f] for f, v in path)


def candidate_skf(
    samples: SampleMatrix,
    spec: Spec,
    chunk: Sequence[int],
    dependson: dict[int, set[int]],
    *,
    min_impurity_decrease: float = 0.005,
) -> tuple[dict[int, Func], MultiLabelDecisionTree, list[int]]:
    """Learn candidates for ``chunk`` from one tree; updates ``dependson`` in place."""
    features = feature_set(spec, chunk, dependson)
    tree = MultiLabelDecisionTree(min_impurity_decrease=min_impurity_decrease)
    tree.fit(samples.select(features), samples.select(chunk))
    leaves = tree.leaves()
    outputs = set(spec.outputs)
    psi = {}
    for j, y in enumerate(chunk):
        psi[y] = funcs.disj_all(path_formula(p, features) for p, label in leaves if label[j])
        dependson[y] = dependson.get(y, set()) | (funcs.support(psi[y]) & outputs)
    check_acyclic(dependson)
    return psi, tree, features


def check_acyclic(dependson: Mapping[int, set[int]]) -> None:
    g = nx.DiGraph()
    g.add_nodes_from(dependson)
    g.add_edges_from((a, b) for a, deps in dependson.items() for b in deps)
    try:
        cycle = nx.find_cycle(g)
    except nx.NetworkXNoCycle:
        return
    raise CycleError([a for a, _ in cycle] + [cycle[0][0]])


def find_order(dependson: Mapping[int, set[int]], outputs: Sequence[int]) -> list[int]:
    """Topological order with ``y`` before everything its candidate mentions.

    Among ready outputs the one declared last goes first.
    """
    pos = {y: i for i, y in enumerate(outputs)}
    indeg = {y: 0 for y in outputs}
    for a in outputs:
        for b in dependson.get(a, ()):
            indeg[b] += 1
    ready = [-pos[y] for y in outputs if indeg[y] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        y = outputs[-heapq.heappop(ready)]
        order.append(y)
        for b in dependson.get(y, ()):
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(ready, -pos[b])
    if len(order) != len(outputs):
        left = [y for y in outputs if y not in set(order)]
        raise CycleError(left)
    return order
