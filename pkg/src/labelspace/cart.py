"""CART classification trees with Gini impurity.

Trees are stored as flat arrays (an arena): node ``i`` is a leaf when
``left[i] == -1``. Routing follows ``x[feature] < threshold -> left``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class CartParams:
    max_depth: int | None = None
    min_samples_to_split: int = 2
    rng_seed: int = 0  # reserved: training is deterministic

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 when set")
        if self.min_samples_to_split < 2:
            raise ValueError("min_samples_to_split must be >= 2")


class Split(NamedTuple):
    feature_index: int
    threshold: float
    impurity_decrease: float


@dataclass(frozen=True)
class DecisionTree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray  # (n_nodes, n_classes) class histogram per node
    n_features: int

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def n_classes(self) -> int:
        return self.counts.shape[1]

    def depth(self) -> int:
        best, stack = 0, [(0, 0)]
        while stack:
            node, d = stack.pop()
            best = max(best, d)
            if self.left[node] >= 0:
                stack += [(self.left[node], d + 1), (self.right[node], d + 1)]
        return best

    def dump(self, feature_names=None) -> str:
        """Indented text rendering, for debugging only."""
        lines = []

        def walk(node, indent):
            pad = "  " * indent
            if self.left[node] < 0:
                lines.append(f"{pad}leaf {self.counts[node].astype(int).tolist()}")
                return
            f = int(self.feature[node])
            name = feature_names[f] if feature_names else f"x[{f}]"
            lines.append(f"{pad}{name} < {self.threshold[node]:.6g}")
            walk(self.left[node], indent + 1)
            walk(self.right[node], indent + 1)

        walk(0, 0)
        return "\n".join(lines) + "\n"


def gini_impurity(class_counts) -> float:
    counts = np.asarray(class_counts, dtype=float)
    total = counts.sum()
    if counts.size == 0 or total < 1:
        raise ValueError("gini impurity needs a histogram with total count >= 1")
    p = counts / total
    return float(1.0 - np.sum(p * p))


def best_split(features, classes, candidate_rows=None, n_classes=None,
               allow_zero_gain: bool = False) -> Split | None:
    """Lowest weighted-child-Gini split over all features and midpoint thresholds.

    Ties go to the smallest feature index, then the smallest threshold.
    Returns ``None`` if no threshold lowers the impurity, unless
    ``allow_zero_gain`` is set, in which case any valid threshold of an impure
    node qualifies (XOR-like nodes need one such split before gains appear).
    """
    x = np.asarray(features, dtype=float)
    y = np.asarray(classes, dtype=np.int64)
    if candidate_rows is not None:
        x, y = x[candidate_rows], y[candidate_rows]
    n = len(y)
    if n < 2:
        return None
    k = int(y.max()) + 1 if n_classes is None else n_classes
    onehot = np.zeros((n, k))
    onehot[np.arange(n), y] = 1.0
    parent_counts = onehot.sum(axis=0)
    if np.count_nonzero(parent_counts) < 2:
        return None
    # sum_c n_c^2 / n, larger is purer; weighted child Gini = 1 - score / n
    parent_score = float(parent_counts @ parent_counts) / n

    best: Split | None = None
    best_score = -np.inf if allow_zero_gain else parent_score
    tol = 1e-12 * max(1.0, parent_score)
    sizes = np.arange(1, n)
    for f in range(x.shape[1]):
        order = np.argsort(x[:, f], kind="stable")
        xs = x[order, f]
        valid = xs[1:] > xs[:-1]
        if not valid.any():
            continue
        left = np.cumsum(onehot[order], axis=0)[:-1]
        right = parent_counts - left
        score = (left * left).sum(axis=1) / sizes + (right * right).sum(axis=1) / (n - sizes)
        score = np.where(valid, score, -np.inf)
        # first maximum up to rounding == smallest threshold
        pos = int(np.argmax(score >= score.max() - tol))
        if score[pos] > best_score + tol:
            lo, hi = xs[pos], xs[pos + 1]
            thr = (lo + hi) / 2.0
            if not lo < thr <= hi:
                thr = hi
            best_score = float(score[pos])
            best = Split(f, float(thr), (best_score - parent_score) / n)
    return best


def train(features, classes, params: CartParams | None = None) -> DecisionTree:
    params = params or CartParams()
    x = np.asarray(features, dtype=float)
    y = np.asarray(classes)
    if len(y) == 0:
        raise ValueError("cannot train on an empty training set")
    if x.ndim != 2 or x.shape[0] != len(y):
        raise ValueError("features must be a 2-D array with one row per class entry")
    if not np.issubdtype(y.dtype, np.integer) or y.min() < 0:
        raise ValueError("class ids must be nonnegative integers")
    y = y.astype(np.int64)
    k = int(y.max()) + 1

    feature, threshold, left, right, counts = [], [], [], [], []

    def new_node(rows):
        feature.append(-1)
        threshold.append(np.nan)
        left.append(-1)
        right.append(-1)
        counts.append(np.bincount(y[rows], minlength=k))
        return len(feature) - 1

    root = new_node(np.arange(len(y)))
    stack = [(root, np.arange(len(y)), 0)]
    while stack:
        node, rows, depth = stack.pop()
        if len(rows) < params.min_samples_to_split:
            continue
        if params.max_depth is not None and depth >= params.max_depth:
            continue
        split = best_split(x[rows], y[rows], n_classes=k, allow_zero_gain=True)
        if split is None:
            continue
        go_left = x[rows, split.feature_index] < split.threshold
        feature[node] = split.feature_index
        threshold[node] = split.threshold
        l_node = new_node(rows[go_left])
        r_node = new_node(rows[~go_left])
        left[node], right[node] = l_node, r_node
        stack.append((r_node, rows[~go_left], depth + 1))
        stack.append((l_node, rows[go_left], depth + 1))

    return DecisionTree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=float),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(counts, dtype=np.int64),
        x.shape[1],
    )


def _leaves(tree: DecisionTree, x: np.ndarray) -> np.ndarray:
    node = np.zeros(len(x), dtype=np.int64)
    active = tree.left[node] >= 0
    while active.any():
        idx = np.flatnonzero(active)
        cur = node[idx]
        go_left = x[idx, tree.feature[cur]] < tree.threshold[cur]
        node[idx] = np.where(go_left, tree.left[cur], tree.right[cur])
        active = tree.left[node] >= 0
    return node


def predict_many(tree: DecisionTree, features) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if x.ndim != 2 or x.shape[1] != tree.n_features:
        raise ValueError(f"expected rows with {tree.n_features} features")
    # argmax returns the first maximum: ties go to the smallest class id
    return np.argmax(tree.counts[_leaves(tree, x)], axis=1)


def predict(tree: DecisionTree, x) -> int:
    row = np.asarray(x, dtype=float)
    if row.ndim != 1 or row.shape[0] != tree.n_features:
        raise ValueError(f"expected a feature vector of length {tree.n_features}")
    return int(predict_many(tree, row[None, :])[0])
