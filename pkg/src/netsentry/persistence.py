"""Versioned on-disk container for a trained ensemble.

Layout: magic line, 8-byte little-endian manifest length, a JSON manifest
(format version, seeds, hyperparameters, standardizer moments, array table),
then the raw numeric arrays — float64/int64, little-endian, in manifest
order. Writing is deterministic (sorted JSON keys, no timestamps), so the
same trained ensemble always produces byte-identical files, and a round-trip
load reproduces identical scores. Files are written to a temp path and
atomically renamed.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .detectors.boosting import GradientBoostedModel
from .detectors.forest import RandomForestModel
from .detectors.isolation import IsolationForestModel
from .detectors.mlp import MlpConfig, MlpModel
from .detectors.trees import Tree
from .ensemble import EnsembleWeights
from .errors import DataError
from .flows import Standardizer

MAGIC = b"netsentry-ensemble\n"
FORMAT_VERSION = 1

_TREE_FIELDS = ("feature", "threshold", "left", "right", "value")


@dataclass(frozen=True)
class ModelBundle:
    """Everything needed to score: the four models plus the standardizer."""

    standardizer: Standardizer
    random_forest: RandomForestModel
    gradient_boosted: GradientBoostedModel
    mlp: MlpModel
    isolation_forest: IsolationForestModel
    weights: EnsembleWeights
    theta: float | None
    seed: int
    feature_names: tuple[str, ...]


def _pack_trees(trees: Iterable[Tree], prefix: str, arrays: dict) -> None:
    trees = list(trees)
    arrays[f"{prefix}.node_counts"] = np.array(
        [t.n_nodes for t in trees], dtype=np.int64
    )
    for name in _TREE_FIELDS:
        arrays[f"{prefix}.{name}"] = np.concatenate(
            [getattr(t, name) for t in trees]
        )


def _unpack_trees(prefix: str, arrays: dict) -> tuple[Tree, ...]:
    counts = arrays[f"{prefix}.node_counts"]
    offsets = np.concatenate([[0], np.cumsum(counts)])
    trees = []
    for i in range(len(counts)):
        lo, hi = offsets[i], offsets[i + 1]
        trees.append(
            Tree(**{name: arrays[f"{prefix}.{name}"][lo:hi] for name in _TREE_FIELDS})
        )
    return tuple(trees)


def save_bundle(path: str | Path, bundle: ModelBundle) -> None:
    arrays: dict[str, np.ndarray] = {
        "standardizer.means": bundle.standardizer.means,
        "standardizer.std_devs": bundle.standardizer.std_devs,
    }
    _pack_trees(bundle.random_forest.trees, "rf", arrays)
    _pack_trees(bundle.gradient_boosted.trees, "gbt", arrays)
    _pack_trees(bundle.isolation_forest.trees, "iso", arrays)
    for i, (W, b) in enumerate(bundle.mlp.params):
        arrays[f"mlp.w{i}"] = W
        arrays[f"mlp.b{i}"] = b

    meta = {
        "format_version": FORMAT_VERSION,
        "seed": bundle.seed,
        "theta": bundle.theta,
        "feature_names": list(bundle.feature_names),
        "weights": {
            "w_rf": bundle.weights.w_rf,
            "w_nn": bundle.weights.w_nn,
            "w_xgb": bundle.weights.w_xgb,
            "w_anom": bundle.weights.w_anom,
        },
        "rf": {
            "n_features": bundle.random_forest.n_features,
            "max_depth": bundle.random_forest.max_depth,
            "seed": bundle.random_forest.seed,
        },
        "gbt": {
            "base_score": bundle.gradient_boosted.base_score,
            "learning_rate": bundle.gradient_boosted.learning_rate,
            "scale_pos_weight": bundle.gradient_boosted.scale_pos_weight,
            "n_features": bundle.gradient_boosted.n_features,
            "seed": bundle.gradient_boosted.seed,
        },
        "iso": {
            "subsample_size": bundle.isolation_forest.subsample_size,
            "n_features": bundle.isolation_forest.n_features,
            "seed": bundle.isolation_forest.seed,
        },
        "mlp": {
            "n_features": bundle.mlp.n_features,
            "epochs_trained": bundle.mlp.epochs_trained,
            "best_val_loss": bundle.mlp.best_val_loss,
            "config": {
                "hidden_layers": list(bundle.mlp.config.hidden_layers),
                "learning_rate": bundle.mlp.config.learning_rate,
                "batch_size": bundle.mlp.config.batch_size,
                "max_epochs": bundle.mlp.config.max_epochs,
                "patience": bundle.mlp.config.patience,
                "seed": bundle.mlp.config.seed,
            },
        },
    }

    table = {}
    offset = 0
    blobs = []
    for name in sorted(arrays):
        a = arrays[name]
        dtype = "<i8" if a.dtype.kind == "i" else "<f8"
        blob = np.ascontiguousarray(a, dtype=dtype).tobytes()
        table[name] = {"dtype": dtype, "shape": list(a.shape), "offset": offset}
        blobs.append(blob)
        offset += len(blob)
    manifest = json.dumps({"meta": meta, "arrays": table}, sort_keys=True).encode()

    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(MAGIC)
            fh.write(len(manifest).to_bytes(8, "little"))
            fh.write(manifest)
            for blob in blobs:
                fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_bundle(path: str | Path) -> ModelBundle:
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC):
        raise DataError(f"{path}: not an ensemble container")
    pos = len(MAGIC)
    manifest_len = int.from_bytes(raw[pos : pos + 8], "little")
    pos += 8
    manifest = json.loads(raw[pos : pos + manifest_len])
    meta = manifest["meta"]
    if meta["format_version"] != FORMAT_VERSION:
        raise DataError(f"unsupported container version {meta['format_version']}")
    base = pos + manifest_len

    arrays = {}
    for name, info in manifest["arrays"].items():
        dt = np.dtype(info["dtype"])
        count = int(np.prod(info["shape"])) if info["shape"] else 1
        start = base + info["offset"]
        arr = np.frombuffer(raw, dtype=dt, count=count, offset=start)
        arrays[name] = arr.reshape(info["shape"]).copy()

    mlp_meta = meta["mlp"]
    n_layers = len(mlp_meta["config"]["hidden_layers"]) + 1
    params = tuple(
        (arrays[f"mlp.w{i}"], arrays[f"mlp.b{i}"]) for i in range(n_layers)
    )
    return ModelBundle(
        standardizer=Standardizer(
            means=arrays["standardizer.means"],
            std_devs=arrays["standardizer.std_devs"],
        ),
        random_forest=RandomForestModel(
            trees=_unpack_trees("rf", arrays), **meta["rf"]
        ),
        gradient_boosted=GradientBoostedModel(
            trees=_unpack_trees("gbt", arrays), **meta["gbt"]
        ),
        mlp=MlpModel(
            params=params,
            config=MlpConfig(
                hidden_layers=tuple(mlp_meta["config"]["hidden_layers"]),
                learning_rate=mlp_meta["config"]["learning_rate"],
                batch_size=mlp_meta["config"]["batch_size"],
                max_epochs=mlp_meta["config"]["max_epochs"],
                patience=mlp_meta["config"]["patience"],
                seed=mlp_meta["config"]["seed"],
            ),
            n_features=mlp_meta["n_features"],
            epochs_trained=mlp_meta["epochs_trained"],
            best_val_loss=mlp_meta["best_val_loss"],
        ),
        isolation_forest=IsolationForestModel(
            trees=_unpack_trees("iso", arrays), **meta["iso"]
        ),
        weights=EnsembleWeights(**meta["weights"]),
        theta=meta["theta"],
        seed=meta["seed"],
        feature_names=tuple(meta["feature_names"]),
    )
