"""Array-backed decision trees shared by the forest and boosting detectors.

Trees are grown depth-first with split search vectorized across all candidate
features at once, and predicted with a level-wise walk so scoring large
batches costs a handful of numpy ops per tree level. Convention: a sample
goes left when x[feature] <= threshold. Internal nodes store feature >= 0;
leaves store feature == -1 and a value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray    # (n_nodes,) int64, -1 for leaves
    threshold: np.ndarray  # (n_nodes,) float64
    left: np.ndarray       # (n_nodes,) int64
    right: np.ndarray      # (n_nodes,) int64
    value: np.ndarray      # (n_nodes,) float64, meaningful at leaves

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Leaf values for every row of X."""
        idx = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feat = self.feature[idx]
            active = np.flatnonzero(feat >= 0)
            if active.size == 0:
                return self.value[idx]
            node = idx[active]
            go_left = X[active, feat[active]] <= self.threshold[node]
            idx[active] = np.where(go_left, self.left[node], self.right[node])

    def split_feature_counts(self, n_features: int) -> np.ndarray:
        """How many internal nodes split on each feature."""
        internal = self.feature[self.feature >= 0]
        return np.bincount(internal, minlength=n_features)


def _best_split(
    Xc: np.ndarray, y: np.ndarray, w: np.ndarray | None, criterion: str
) -> tuple[int, float, float] | None:
    """Best (column, threshold, gain) over the candidate-feature matrix Xc.

    Gain ties resolve to the lowest column index, then the lowest threshold
    (argmin scans columns then rows in that order). Returns None when every
    candidate column is constant or no split improves the criterion.
    """
    m = Xc.shape[0]
    order = np.argsort(Xc, axis=0, kind="stable")
    xs = np.take_along_axis(Xc, order, axis=0)
    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return None

    if criterion == "gini":
        ys = y[order].astype(np.float64)
        pos_left = np.cumsum(ys, axis=0)[:-1]
        n_left = np.arange(1, m, dtype=np.float64)[:, None]
        n_right = m - n_left
        pos_right = ys.sum(axis=0) - pos_left
        p_l = pos_left / n_left
        p_r = pos_right / n_right
        cost = (n_left * 2.0 * p_l * (1.0 - p_l)
                + n_right * 2.0 * p_r * (1.0 - p_r)) / m
        p = float(y.mean())
        parent = 2.0 * p * (1.0 - p)
    elif criterion == "wsse":
        assert w is not None
        ts = y[order]
        ws = w[order]
        cw = np.cumsum(ws, axis=0)[:-1]
        cwt = np.cumsum(ws * ts, axis=0)[:-1]
        cwt2 = np.cumsum(ws * ts * ts, axis=0)[:-1]
        W = ws.sum(axis=0)
        WT = (ws * ts).sum(axis=0)
        WT2 = (ws * ts * ts).sum(axis=0)
        sse_l = cwt2 - cwt * cwt / np.maximum(cw, 1e-300)
        sse_r = (WT2 - cwt2) - (WT - cwt) ** 2 / np.maximum(W - cw, 1e-300)
        cost = sse_l + sse_r
        parent = float((WT2 - WT * WT / np.maximum(W, 1e-300))[0])
    else:
        raise ValueError(f"unknown criterion: {criterion!r}")

    cost = np.where(valid, cost, np.inf)
    col_best = cost.min(axis=0)
    col = int(np.argmin(col_best))
    gain = parent - float(col_best[col])
    if gain <= 1e-12:
        return None
    row = int(np.argmin(cost[:, col]))
    threshold = float((xs[row, col] + xs[row + 1, col]) / 2.0)
    return col, threshold, gain


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    *,
    max_depth: int,
    criterion: str = "gini",
    weights: np.ndarray | None = None,
    max_features: int | None = None,
    rng: np.random.Generator | None = None,
    min_samples_split: int = 2,
    leaf_value: Callable[[np.ndarray], float] | None = None,
) -> Tree:
    """Grow a CART tree.

    criterion "gini" treats y as binary labels and leaves hold class-1
    fractions; "wsse" treats y as regression targets with optional sample
    weights. leaf_value overrides the leaf statistic (given member row
    indices), which boosting uses for Newton leaf values. max_features draws
    a fresh random candidate subset per node; growth order is fixed
    (left-first, depth-first), so trees are deterministic given rng state.
    """
    n, d = X.shape
    if weights is None:
        weights = np.ones(n)
    if leaf_value is None:
        if criterion == "gini":
            leaf_value = lambda idx: float(y[idx].mean())
        else:
            leaf_value = lambda idx: float(np.average(y[idx], weights=weights[idx]))

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    root = new_node()
    stack: list[tuple[int, np.ndarray, int]] = [(root, np.arange(n), 0)]
    while stack:
        node, idx, depth = stack.pop()
        y_node = y[idx]
        pure = bool(np.ptp(y_node) == 0)
        if depth >= max_depth or len(idx) < min_samples_split or pure:
            value[node] = leaf_value(idx)
            continue

        if max_features is not None and max_features < d:
            assert rng is not None, "max_features requires an rng"
            candidates = np.sort(rng.choice(d, size=max_features, replace=False))
        else:
            candidates = np.arange(d)

        found = _best_split(
            X[np.ix_(idx, candidates)],
            y_node,
            weights[idx] if criterion == "wsse" else None,
            criterion,
        )
        if found is None:
            value[node] = leaf_value(idx)
            continue
        col, thresh, _ = found
        best_feat = int(candidates[col])

        go_left = X[idx, best_feat] <= thresh
        feature[node] = best_feat
        threshold[node] = thresh
        l_node, r_node = new_node(), new_node()
        left[node], right[node] = l_node, r_node
        # Push right first so the left child is processed (and draws rng) first.
        stack.append((r_node, idx[~go_left], depth + 1))
        stack.append((l_node, idx[go_left], depth + 1))

    return Tree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=np.float64),
    )
