"""Full training pipeline: clean, split, standardize, resample, train, tune.

Mirrors the evaluation methodology: a 70/30 train/test split, resampling and
standardization fitted on training data only, and the detection threshold
tuned on a seeded 10% validation carve-out of the test pool.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .detectors import (
    MlpConfig,
    train_gradient_boosted,
    train_isolation_forest,
    train_mlp,
    train_random_forest,
)
from .ensemble import EnsembleWeights, ThresholdConfig, combine_batch, tune_threshold
from .errors import DataError
from .flows import (
    CleaningPolicy,
    Dataset,
    apply_standardizer,
    clean_dataset,
    fit_standardizer,
    split_dataset,
)
from .persistence import ModelBundle
from .resampling import ResampleConfig, balance_pipeline

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DetectorConfig:
    rf_trees: int = 150
    rf_max_depth: int = 25
    gbt_trees: int = 200
    gbt_learning_rate: float = 0.1
    gbt_max_depth: int = 6
    gbt_scale_pos_weight: float | None = None  # None: #neg/#pos after resampling
    iso_trees: int = 100
    iso_subsample: int = 256
    mlp: MlpConfig = field(default_factory=MlpConfig)
    mlp_val_fraction: float = 0.1


@dataclass(frozen=True)
class TrainResult:
    bundle: ModelBundle
    train: Dataset  # standardized, resampled
    test: Dataset   # raw features (standardize per use)
    training_accuracy: dict[str, float]


def train_ensemble(
    data: Dataset,
    detector_cfg: DetectorConfig = DetectorConfig(),
    resample_cfg: ResampleConfig | None = None,
    weights: EnsembleWeights = EnsembleWeights(),
    cleaning_policy: CleaningPolicy = "drop_row",
    train_fraction: float = 0.7,
    seed: int = 0,
) -> TrainResult:
    """Train all four detectors; returns the bundle (theta untuned) and splits."""
    data = clean_dataset(data, cleaning_policy)
    if len(data) == 0:
        raise DataError("no records left after cleaning")
    train, test = split_dataset(data, train_fraction, seed=seed)
    standardizer = fit_standardizer(train)
    train_z = apply_standardizer(standardizer, train)
    if resample_cfg is None:
        resample_cfg = ResampleConfig(seed=seed)
    train_z = balance_pipeline(train_z, resample_cfg)

    X, y = train_z.features, train_z.labels
    rf = train_random_forest(
        X, y, n_trees=detector_cfg.rf_trees,
        max_depth=detector_cfg.rf_max_depth, seed=seed,
    )
    gbt = train_gradient_boosted(
        X, y,
        n_trees=detector_cfg.gbt_trees,
        scale_pos_weight=detector_cfg.gbt_scale_pos_weight,
        learning_rate=detector_cfg.gbt_learning_rate,
        max_depth=detector_cfg.gbt_max_depth,
        seed=seed,
    )
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(y))
    n_val = max(1, int(round(detector_cfg.mlp_val_fraction * len(y))))
    val_idx, fit_idx = perm[:n_val], perm[n_val:]
    mlp_cfg = detector_cfg.mlp
    if mlp_cfg.seed != seed:
        mlp_cfg = MlpConfig(
            hidden_layers=mlp_cfg.hidden_layers,
            learning_rate=mlp_cfg.learning_rate,
            batch_size=mlp_cfg.batch_size,
            max_epochs=mlp_cfg.max_epochs,
            patience=mlp_cfg.patience,
            seed=seed,
        )
    mlp = train_mlp(X[fit_idx], y[fit_idx], X[val_idx], y[val_idx], mlp_cfg)
    iso = train_isolation_forest(
        X,
        n_trees=detector_cfg.iso_trees,
        subsample=min(detector_cfg.iso_subsample, len(y)),
        seed=seed,
    )

    accuracy = {
        "random_forest": float(((rf.score_batch(X) > 0.5) == y).mean()),
        "gradient_boosted": float(((gbt.score_batch(X) > 0.5) == y).mean()),
        "mlp": float(((mlp.score_batch(X) > 0.5) == y).mean()),
    }
    for name, acc in accuracy.items():
        logger.info("training accuracy %s: %.4f", name, acc)

    bundle = ModelBundle(
        standardizer=standardizer,
        random_forest=rf,
        gradient_boosted=gbt,
        mlp=mlp,
        isolation_forest=iso,
        weights=weights,
        theta=None,
        seed=seed,
        feature_names=data.feature_names,
    )
    return TrainResult(bundle=bundle, train=train_z, test=test,
                       training_accuracy=accuracy)


def ensemble_probabilities(bundle: ModelBundle, features: np.ndarray) -> np.ndarray:
    """Combined ensemble probability for raw (unstandardized) feature rows."""
    z = bundle.standardizer.transform(features)
    scores = np.column_stack(
        [
            bundle.random_forest.score_batch(z),
            bundle.mlp.score_batch(z),
            bundle.gradient_boosted.score_batch(z),
            bundle.isolation_forest.score_batch(z),
        ]
    )
    return combine_batch(scores, bundle.weights)


def tune_bundle_threshold(
    bundle: ModelBundle,
    test: Dataset,
    grid: ThresholdConfig = ThresholdConfig(),
    validation_fraction: float = 0.1,
    seed: int = 0,
) -> tuple[ModelBundle, float, float]:
    """Carve a seeded validation subset from the test pool and tune theta.

    Returns (bundle with theta set, theta, best F1). Note the validation data
    comes from the test pool by design, mirroring the evaluated methodology;
    headline test metrics therefore share data with threshold selection.
    """
    rng = np.random.default_rng(seed)
    n_val = max(1, int(round(validation_fraction * len(test))))
    val = test.take(rng.permutation(len(test))[:n_val])
    if len(np.unique(val.labels)) < 2:
        raise DataError("validation carve-out is single-class; adjust seed or size")
    probs = ensemble_probabilities(bundle, val.features)
    theta, best_f1 = tune_threshold(probs, val.labels, grid)
    tuned = ModelBundle(
        standardizer=bundle.standardizer,
        random_forest=bundle.random_forest,
        gradient_boosted=bundle.gradient_boosted,
        mlp=bundle.mlp,
        isolation_forest=bundle.isolation_forest,
        weights=bundle.weights,
        theta=theta,
        seed=bundle.seed,
        feature_names=bundle.feature_names,
    )
    return tuned, theta, best_f1
