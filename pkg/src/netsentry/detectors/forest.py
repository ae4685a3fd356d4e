"""Random forest of CART trees on bootstrap samples.

Per-split candidate features default to floor(sqrt(d)); leaf probability is
the class-1 fraction at the leaf; the forest score is the mean over trees.
Per-tree seeds spawn deterministically from the master seed, so training is
a pure function of (data, config, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError
from .trees import Tree, grow_tree


@dataclass(frozen=True)
class RandomForestModel:
    trees: tuple[Tree, ...]
    n_features: int
    max_depth: int
    seed: int
    kind: str = field(default="random_forest")

    def score_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.predict(X)
        return total / len(self.trees)

    def score(self, x: np.ndarray) -> float:
        return float(self.score_batch(np.atleast_2d(x))[0])

    def feature_split_counts(self) -> np.ndarray:
        counts = np.zeros(self.n_features, dtype=np.int64)
        for tree in self.trees:
            counts += tree.split_feature_counts(self.n_features)
        return counts


def train_random_forest(
    X: np.ndarray,
    y: np.ndarray,
    n_trees: int = 150,
    max_depth: int = 25,
    seed: int = 0,
) -> RandomForestModel:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    if len(np.unique(y)) < 2:
        raise DataError("random forest training requires both classes")
    n, d = X.shape
    max_features = max(1, int(math.floor(math.sqrt(d))))
    seeds = np.random.SeedSequence(seed).spawn(n_trees)
    trees = []
    for ss in seeds:
        rng = np.random.default_rng(ss)
        boot = rng.integers(0, n, size=n)
        trees.append(
            grow_tree(
                X[boot],
                y[boot],
                max_depth=max_depth,
                criterion="gini",
                max_features=max_features,
                rng=rng,
            )
        )
    return RandomForestModel(
        trees=tuple(trees), n_features=d, max_depth=max_depth, seed=seed
    )
