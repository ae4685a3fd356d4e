"""Weighted-vote combination, threshold classification, and threshold tuning.

The combined score is a convex combination of the four detector
probabilities (defaults 0.35 RF, 0.35 NN, 0.20 GBT, 0.10 anomaly). A sample
is an attack when the combined probability strictly exceeds the tuned
threshold; the threshold comes from an F1 grid search over
{0.25, 0.30, ..., 0.60} with ties broken toward the lowest value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError


@dataclass(frozen=True)
class DetectorScores:
    p_rf: float
    p_nn: float
    p_xgb: float
    p_anom: float

    def __post_init__(self) -> None:
        for name in ("p_rf", "p_nn", "p_xgb", "p_anom"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")

    def as_array(self) -> np.ndarray:
        return np.array([self.p_rf, self.p_nn, self.p_xgb, self.p_anom])


@dataclass(frozen=True)
class EnsembleWeights:
    w_rf: float = 0.35
    w_nn: float = 0.35
    w_xgb: float = 0.20
    w_anom: float = 0.10

    def __post_init__(self) -> None:
        values = (self.w_rf, self.w_nn, self.w_xgb, self.w_anom)
        if any(w < 0 for w in values):
            raise ValueError(f"weights must be nonnegative: {values}")
        if abs(sum(values) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(values)!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.w_rf, self.w_nn, self.w_xgb, self.w_anom])


@dataclass(frozen=True)
class ThresholdConfig:
    """Half-open grid: candidates are start, start+step, ..., up to stop exclusive."""

    start: float = 0.25
    stop: float = 0.65
    step: float = 0.05

    def grid(self) -> np.ndarray:
        n = int(round((self.stop - self.start) / self.step))
        points = self.start + self.step * np.arange(n)
        return np.round(points, 10)


def combine(s: DetectorScores, w: EnsembleWeights = EnsembleWeights()) -> float:
    """Weighted sum of the four detector probabilities."""
    return float(np.dot(s.as_array(), w.as_array()))


def combine_batch(scores: np.ndarray, w: EnsembleWeights = EnsembleWeights()) -> np.ndarray:
    """Weighted sum for an (n, 4) matrix of per-detector probabilities."""
    return scores @ w.as_array()


def classify(p: float, theta: float) -> bool:
    """True (attack) iff p strictly exceeds theta."""
    return p > theta


def f1_score(labels: np.ndarray, predictions: np.ndarray) -> float:
    """F1 with the 0-when-degenerate convention used by the grid search."""
    tp = int(((labels == 1) & (predictions == 1)).sum())
    fp = int(((labels == 0) & (predictions == 1)).sum())
    fn = int(((labels == 1) & (predictions == 0)).sum())
    denom = 2 * tp + fp + fn
    return 2.0 * tp / denom if denom else 0.0


def tune_threshold(
    probs: np.ndarray,
    labels: np.ndarray,
    grid: ThresholdConfig = ThresholdConfig(),
) -> tuple[float, float]:
    """Grid-search the classification threshold for maximum F1.

    Returns (theta_opt, best_f1). Ties break toward the lowest threshold.
    """
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels)
    if probs.shape != labels.shape:
        raise DataError("probs and labels lengths differ")
    if len(np.unique(labels)) < 2:
        raise DataError("threshold tuning requires both classes in labels")
    best_theta, best_f1 = None, -1.0
    for theta in grid.grid():
        f1 = f1_score(labels, (probs > theta).astype(np.int64))
        if f1 > best_f1:
            best_theta, best_f1 = float(theta), f1
    assert best_theta is not None
    return best_theta, best_f1
