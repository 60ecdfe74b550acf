"""Multi-label CART classifier: one tree over distinct label bit-vectors."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_binary_X_y, check_binary_array


@dataclass
class Node:
    n_samples: int
    counts: np.ndarray
    label: int  # class index
    feature: int | None = None
    zero: "Node | None" = None
    one: "Node | None" = None

    @property
    def is_leaf(self):
        return self.feature is None


class MultiLabelDecisionTree(ClassifierMixin, BaseEstimator):
    """Gini-impurity decision tree whose classes are whole label rows.

    Splits are accepted when the weighted impurity decrease reaches
    ``min_impurity_decrease``; all comparisons use exact rationals so results
    do not depend on float rounding.  Ties between features go to the lowest
    column, ties between majority classes to the lexicographically smallest
    label row.
    """

    def __init__(self, min_impurity_decrease=0.005, max_depth=None, min_samples_leaf=1):
        self.min_impurity_decrease = min_impurity_decrease
        self.max_depth = max_depth
        self.min_samples_leaf = min_samples_leaf

    def fit(self, X, Y):
        X, Y = check_binary_X_y(X, Y)
        if self.min_impurity_decrease < 0:
            raise ValueError("min_impurity_decrease must be non-negative")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be at least 1")
        self.n_features_in_ = X.shape[1]
        self.n_outputs_ = Y.shape[1]
        # np.unique sorts rows, so class index order is lexicographic order
        self.classes_, y = np.unique(Y, axis=0, return_inverse=True)
        y = np.asarray(y).reshape(-1)
        self._threshold = Fraction(self.min_impurity_decrease).limit_denominator(10**9)
        onehot = np.zeros((len(y), len(self.classes_)), dtype=np.int64)
        onehot[np.arange(len(y)), y] = 1
        self.tree_ = self._grow(X.astype(np.int64), onehot, np.arange(len(y)), len(y), 0, frozenset())
        return self

    def _grow(self, X, onehot, rows, total, depth, used):
        counts = onehot[rows].sum(axis=0)
        node = Node(len(rows), counts, int(np.argmax(counts)))
        if np.count_nonzero(counts) <= 1:
            return node
        if self.max_depth is not None and depth >= self.max_depth:
            return node
        best = self._best_split(X[rows], onehot[rows], counts, total, used)
        if best is None:
            return node
        f = best
        mask = X[rows, f] == 1
        node.feature = f
        node.zero = self._grow(X, onehot, rows[~mask], total, depth + 1, used | {f})
        node.one = self._grow(X, onehot, rows[mask], total, depth + 1, used | {f})
        return node

    def _best_split(self, Xn, Cn, counts, total, used):
        n = len(Xn)
        ones = Xn.T @ Cn  # per feature: class counts where feature = 1
        n1 = Xn.sum(axis=0)
        parent = Fraction(int((counts**2).sum()), n)
        best, best_score = None, None
        for f in range(Xn.shape[1]):
            if f in used:
                continue
            a = int(n1[f])
            b = n - a
            if a < self.min_samples_leaf or b < self.min_samples_leaf:
                continue
            c1 = ones[f]
            c0 = counts - c1
            score = Fraction(int((c1**2).sum()), a) + Fraction(int((c0**2).sum()), b)
            if best_score is None or score > best_score:
                best, best_score = f, score
        if best is None:
            return None
        # weighted Gini decrease: n/N * (G - n1/n G1 - n0/n G0) = (score - parent) / N
        if (best_score - parent) / total < self._threshold:
            return None
        return best

    def _leaf(self, row):
        node = self.tree_
        while not node.is_leaf:
            node = node.one if row[node.feature] else node.zero
        return node

    def predict(self, X):
        check_is_fitted(self, "tree_")
        X = check_binary_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return np.array([self.classes_[self._leaf(r).label] for r in X], dtype=np.uint8).reshape(-1, self.n_outputs_)

    def leaves(self):
        """``(path, label_row)`` per leaf; ``path`` lists ``(feature, value)`` tests from the root."""
        check_is_fitted(self, "tree_")
        out = []
        stack = [(self.tree_, ())]
        while stack:
            node, path = stack.pop()
            if node.is_leaf:
                out.append((list(path), tuple(int(b) for b in self.classes_[node.label])))
            else:
                stack.append((node.one, path + ((node.feature, 1),)))
                stack.append((node.zero, path + ((node.feature, 0),)))
        return out

    def get_depth(self):
        check_is_fitted(self, "tree_")
        return max((len(p) for p, _ in self.leaves()), default=0)

    def get_n_leaves(self):
        return len(self.leaves())

    def export_dot(self, feature_names=None, label_names=None) -> str:
        check_is_fitted(self, "tree_")
        fname = (lambda f: feature_names[f]) if feature_names is not None else (lambda f: f"f{f}")
        lines = ["digraph tree {"]
        ids = {}

        def visit(node):
            i = ids[id(node)] = len(ids)
            if node.is_leaf:
                bits = "".join(str(int(b)) for b in self.classes_[node.label])
                title = bits if label_names is None else f"{','.join(label_names)}={bits}"
                lines.append(f'  n{i} [shape=box, label="{title}\\nn={node.n_samples}"];')
            else:
                lines.append(f'  n{i} [label="{fname(node.feature)}"];')
                for child, v in ((node.zero, 0), (node.one, 1)):
                    j = visit(child)
                    lines.append(f'  n{i} -> n{j} [label="{v}"];')
            return i

        visit(self.tree_)
        lines.append("}")
        return "\n".join(lines) + "\n"
