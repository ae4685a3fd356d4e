"""Isolation forest anomaly scorer.

Each tree recursively splits a seeded subsample on a uniformly random feature
and a uniform threshold within the node's value range, up to a height limit
of ceil(log2(subsample_size)). A leaf at depth k holding s samples
contributes path length k + c(s), where c is the average unsuccessful-search
path length of a BST: c(1) = 0, c(2) = 1, and for s > 2
c(s) = 2 * H(s - 1) - 2 * (s - 1) / s with H(i) = ln(i) + Euler gamma.
The anomaly score is s(x) = 2 ** (-E[h(x)] / c(subsample_size)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError
from .trees import Tree

_EULER_GAMMA = 0.5772156649015329


def average_path_length(n: int) -> float:
    """c(n): expected unsuccessful-search path length in a BST of n points."""
    if n <= 1:
        return 0.0
    if n == 2:
        return 1.0
    return 2.0 * (math.log(n - 1) + _EULER_GAMMA) - 2.0 * (n - 1) / n


@dataclass(frozen=True)
class IsolationForestModel:
    trees: tuple[Tree, ...]  # leaf values hold depth + c(leaf size)
    subsample_size: int
    n_features: int
    seed: int
    kind: str = field(default="isolation_forest")

    def path_length_batch(self, X: np.ndarray) -> np.ndarray:
        """Mean adjusted path length E[h(x)] over the forest."""
        X = np.ascontiguousarray(X, dtype=np.float64)
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.predict(X)
        return total / len(self.trees)

    def score_batch(self, X: np.ndarray) -> np.ndarray:
        h = self.path_length_batch(X)
        return 2.0 ** (-h / average_path_length(self.subsample_size))

    def score(self, x: np.ndarray) -> float:
        return float(self.score_batch(np.atleast_2d(x))[0])


def _grow_isolation_tree(
    X: np.ndarray, rng: np.random.Generator, height_limit: int
) -> Tree:
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
    stack = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        Xn = X[idx]
        lo = Xn.min(axis=0)
        hi = Xn.max(axis=0)
        splittable = np.flatnonzero(hi > lo)
        if depth >= height_limit or len(idx) <= 1 or splittable.size == 0:
            value[node] = depth + average_path_length(len(idx))
            continue
        f = int(rng.choice(splittable))
        t = float(rng.uniform(lo[f], hi[f]))
        go_left = Xn[:, f] <= t
        if go_left.all() or not go_left.any():
            # Degenerate uniform draw at the range edge; treat as external.
            value[node] = depth + average_path_length(len(idx))
            continue
        feature[node] = f
        threshold[node] = t
        l_node, r_node = new_node(), new_node()
        left[node], right[node] = l_node, r_node
        stack.append((r_node, idx[~go_left], depth + 1))
        stack.append((l_node, idx[go_left], depth + 1))

    return Tree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=np.float64),
    )


def train_isolation_forest(
    X: np.ndarray,
    n_trees: int = 100,
    subsample: int = 256,
    seed: int = 0,
) -> IsolationForestModel:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.shape[0] < subsample:
        raise DataError(
            f"isolation forest needs at least {subsample} samples, got {X.shape[0]}"
        )
    height_limit = math.ceil(math.log2(subsample)) if subsample > 1 else 1
    seeds = np.random.SeedSequence(seed).spawn(n_trees)
    trees = []
    for ss in seeds:
        rng = np.random.default_rng(ss)
        sub = rng.choice(X.shape[0], size=subsample, replace=False)
        trees.append(_grow_isolation_tree(X[sub], rng, height_limit))
    return IsolationForestModel(
        trees=tuple(trees),
        subsample_size=subsample,
        n_features=X.shape[1],
        seed=seed,
    )
