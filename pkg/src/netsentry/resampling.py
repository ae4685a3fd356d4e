"""Class rebalancing: SMOTE oversampling followed by random undersampling.

Ratios are minority/majority targets. Counts use ceiling; the minority class
is never touched by the undersampling stage and originals always survive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DataError
from .flows import Dataset

# Most minority rows are attacks, but the pipeline only looks at counts.


@dataclass(frozen=True)
class ResampleConfig:
    smote_ratio: float = 0.5
    under_ratio: float = 0.7
    k_neighbors: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.smote_ratio <= 1.0:
            raise ValueError(f"smote_ratio must be in (0, 1], got {self.smote_ratio}")
        if not self.smote_ratio <= self.under_ratio <= 1.0:
            raise ValueError(
                f"need smote_ratio <= under_ratio <= 1, got {self.under_ratio}"
            )
        if self.k_neighbors < 1:
            raise ValueError(f"k_neighbors must be >= 1, got {self.k_neighbors}")


def _class_split(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Indices of (minority, majority) plus the minority label value."""
    counts = np.bincount(labels.astype(np.intp), minlength=2)
    if counts[0] == 0 or counts[1] == 0:
        raise DataError("resampling requires both classes present")
    minority_label = int(np.argmin(counts))
    return (
        np.flatnonzero(labels == minority_label),
        np.flatnonzero(labels != minority_label),
        minority_label,
    )


def smote_oversample(
    features: np.ndarray, labels: np.ndarray, cfg: ResampleConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Raise the minority count to ceil(smote_ratio * majority) with synthetic points.

    Each synthetic sample interpolates a minority point toward one of its
    k nearest minority neighbors (Euclidean): x + u * (x_nn - x), u ~ U(0, 1).
    """
    minority, majority, min_label = _class_split(labels)
    if len(minority) <= cfg.k_neighbors:
        raise DataError(
            f"minority class has {len(minority)} samples; "
            f"need more than k_neighbors={cfg.k_neighbors}"
        )
    target = math.ceil(cfg.smote_ratio * len(majority))
    n_new = target - len(minority)
    if n_new <= 0:
        return features, labels

    X_min = features[minority]
    # Brute-force kNN; training sets here are desk scale.
    d2 = ((X_min[:, None, :] - X_min[None, :, :]) ** 2).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    nn_idx = np.argsort(d2, axis=1, kind="stable")[:, : cfg.k_neighbors]

    rng = np.random.default_rng(cfg.seed)
    base = rng.integers(0, len(X_min), size=n_new)
    pick = rng.integers(0, cfg.k_neighbors, size=n_new)
    u = rng.random(n_new)
    x = X_min[base]
    x_nn = X_min[nn_idx[base, pick]]
    synthetic = x + u[:, None] * (x_nn - x)

    out_features = np.vstack([features, synthetic])
    out_labels = np.concatenate([labels, np.full(n_new, min_label, dtype=labels.dtype)])
    return out_features, out_labels


def _undersample_indices(labels: np.ndarray, cfg: ResampleConfig) -> np.ndarray | None:
    """Kept row indices (sorted), or None when the majority is already small enough."""
    minority, majority, _ = _class_split(labels)
    target = math.ceil(len(minority) / cfg.under_ratio)
    if target >= len(majority):
        return None
    rng = np.random.default_rng(cfg.seed)
    kept_majority = rng.choice(majority, size=target, replace=False)
    return np.sort(np.concatenate([minority, kept_majority]))


def random_undersample(
    features: np.ndarray, labels: np.ndarray, cfg: ResampleConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Reduce the majority count to ceil(minority / under_ratio), seeded, no replacement."""
    keep = _undersample_indices(labels, cfg)
    if keep is None:
        return features, labels
    return features[keep], labels[keep]


def balance_pipeline(train: Dataset, cfg: ResampleConfig) -> Dataset:
    """SMOTE then undersampling on a Dataset; provenance records both stage counts.

    Synthetic rows inherit the category tag of the minority class's first
    occurrence (the tag is informational; training uses binary labels).
    """
    minority, _, min_label = _class_split(train.labels)
    X1, y1 = smote_oversample(train.features, train.labels, cfg)
    n_synth = len(y1) - len(train)

    synth_category = train.categories[minority[0]]
    categories = list(train.categories) + [synth_category] * n_synth
    keep = _undersample_indices(y1, cfg)
    if keep is None:
        X2, y2 = X1, y1
    else:
        X2, y2 = X1[keep], y1[keep]
        categories = [categories[i] for i in keep]

    prov = replace(
        train.provenance,
        notes=train.provenance.notes
        + (
            f"smote: {int((train.labels == min_label).sum())} -> "
            f"{int((y1 == min_label).sum())} minority",
            f"undersample: {int((y1 != min_label).sum())} -> "
            f"{int((y2 != min_label).sum())} majority",
        ),
    )
    return Dataset(
        features=X2,
        labels=y2,
        categories=tuple(categories),
        feature_names=train.feature_names,
        provenance=prov,
    )
