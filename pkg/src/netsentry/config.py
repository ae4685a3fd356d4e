"""Engine configuration: JSON config file plus CLI-flag overrides.

Precedence: explicit CLI flag > config file > NETSENTRY_SEED env var (seed
only) > built-in default. Defaults follow the evaluated setup: weights
0.35/0.35/0.20/0.10, threshold grid 0.25-0.60 step 0.05, 150x25 forest, 200
boosting rounds, 256-128-64 MLP, SMOTE 0.5 / undersample 0.7, 50,000-sample
evaluation, 1000 bootstrap resamples.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .detectors import MlpConfig
from .ensemble import EnsembleWeights, ThresholdConfig
from .errors import ConfigError
from .resampling import ResampleConfig
from .training import DetectorConfig

SEED_ENV_VAR = "NETSENTRY_SEED"


@dataclass(frozen=True)
class EngineConfig:
    dataset: str | None = None
    schema: str | None = None
    model: str | None = None
    decoy_catalog: str | None = None
    report_json: str | None = None
    report_text: str | None = None
    label_column: str = "Label"
    cleaning_policy: str = "drop_row"
    train_fraction: float = 0.7
    sample_size: int = 50_000
    bootstrap_resamples: int = 1000
    seed: int = 0

    w_rf: float = 0.35
    w_nn: float = 0.35
    w_xgb: float = 0.20
    w_anom: float = 0.10

    theta_start: float = 0.25
    theta_stop: float = 0.65
    theta_step: float = 0.05
    tuning_validation_fraction: float = 0.1

    smote_ratio: float = 0.5
    under_ratio: float = 0.7
    k_neighbors: int = 5

    rf_trees: int = 150
    rf_max_depth: int = 25
    gbt_trees: int = 200
    gbt_learning_rate: float = 0.1
    gbt_max_depth: int = 6
    iso_trees: int = 100
    iso_subsample: int = 256
    mlp_hidden: tuple[int, ...] = (256, 128, 64)
    mlp_learning_rate: float = 1e-3
    mlp_batch_size: int = 256
    mlp_max_epochs: int = 200
    mlp_patience: int = 10

    benign_rate: float = 200.0  # synthesized replay arrivals per second

    def weights(self) -> EnsembleWeights:
        try:
            return EnsembleWeights(self.w_rf, self.w_nn, self.w_xgb, self.w_anom)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def threshold_grid(self) -> ThresholdConfig:
        return ThresholdConfig(self.theta_start, self.theta_stop, self.theta_step)

    def resample(self) -> ResampleConfig:
        try:
            return ResampleConfig(
                self.smote_ratio, self.under_ratio, self.k_neighbors, self.seed
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def detectors(self) -> DetectorConfig:
        return DetectorConfig(
            rf_trees=self.rf_trees,
            rf_max_depth=self.rf_max_depth,
            gbt_trees=self.gbt_trees,
            gbt_learning_rate=self.gbt_learning_rate,
            gbt_max_depth=self.gbt_max_depth,
            iso_trees=self.iso_trees,
            iso_subsample=self.iso_subsample,
            mlp=MlpConfig(
                hidden_layers=tuple(self.mlp_hidden),
                learning_rate=self.mlp_learning_rate,
                batch_size=self.mlp_batch_size,
                max_epochs=self.mlp_max_epochs,
                patience=self.mlp_patience,
                seed=self.seed,
            ),
        )

    def echo(self) -> dict:
        d = asdict(self)
        d["mlp_hidden"] = list(self.mlp_hidden)
        return d


_FIELD_NAMES = {f.name for f in fields(EngineConfig)}


def load_config(
    path: str | Path | None = None, overrides: dict | None = None
) -> EngineConfig:
    """Build an EngineConfig from defaults, env, optional file, and overrides."""
    values: dict = {}
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            values["seed"] = int(env_seed)
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR}={env_seed!r} is not an integer")
    if path is not None:
        try:
            loaded = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        unknown = set(loaded) - _FIELD_NAMES
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    if "mlp_hidden" in values:
        values["mlp_hidden"] = tuple(values["mlp_hidden"])
    cfg = EngineConfig(**values)
    cfg.weights()
    cfg.resample()
    return cfg


def with_seed(cfg: EngineConfig, seed: int) -> EngineConfig:
    return replace(cfg, seed=seed)
