"""Gradient-boosted regression trees for weighted logistic loss.

Stagewise fit: each round grows a depth-limited tree on the negative
gradient (y - p) of the weighted log loss, with Newton leaf values
sum(w * (y - p)) / sum(w * p * (1 - p)). Positive-class sample weights are
multiplied by scale_pos_weight. The score is sigmoid(base + lr * sum(trees)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError
from .trees import Tree, grow_tree


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


@dataclass(frozen=True)
class GradientBoostedModel:
    trees: tuple[Tree, ...]
    base_score: float  # prior log-odds
    learning_rate: float
    scale_pos_weight: float
    n_features: int
    seed: int
    kind: str = field(default="gradient_boosted")

    def raw_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        z = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            z += self.learning_rate * tree.predict(X)
        return z

    def score_batch(self, X: np.ndarray) -> np.ndarray:
        return _sigmoid(self.raw_batch(X))

    def score(self, x: np.ndarray) -> float:
        return float(self.score_batch(np.atleast_2d(x))[0])


def train_gradient_boosted(
    X: np.ndarray,
    y: np.ndarray,
    n_trees: int = 200,
    scale_pos_weight: float | None = None,
    learning_rate: float = 0.1,
    max_depth: int = 6,
    seed: int = 0,
) -> GradientBoostedModel:
    """scale_pos_weight defaults to #negative / #positive of the training set."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise DataError("gradient boosting requires both classes")
    if scale_pos_weight is None:
        scale_pos_weight = n_neg / n_pos

    w = np.where(y == 1, scale_pos_weight, 1.0)
    prior = float((w * y).sum() / w.sum())
    base = math.log(prior / (1.0 - prior))

    z = np.full(len(y), base)
    trees = []
    for _ in range(n_trees):
        p = _sigmoid(z)
        residual = y - p
        hessian = np.maximum(p * (1.0 - p), 1e-12)

        def newton_leaf(idx: np.ndarray) -> float:
            wi = w[idx]
            return float((wi * residual[idx]).sum() / (wi * hessian[idx]).sum())

        tree = grow_tree(
            X,
            residual,
            max_depth=max_depth,
            criterion="wsse",
            weights=w,
            leaf_value=newton_leaf,
        )
        z += learning_rate * tree.predict(X)
        trees.append(tree)

    return GradientBoostedModel(
        trees=tuple(trees),
        base_score=base,
        learning_rate=learning_rate,
        scale_pos_weight=float(scale_pos_weight),
        n_features=X.shape[1],
        seed=seed,
    )
