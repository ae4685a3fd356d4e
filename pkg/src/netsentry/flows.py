"""Loading, cleaning, standardizing, and splitting labeled flow datasets.

Datasets follow the CICIDS2017 CSV shape: a header row, numeric flow-statistic
columns, and a string label column ("BENIGN" vs. an attack-family name).
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Literal, Sequence

import numpy as np

from .errors import DataError, SchemaError

logger = logging.getLogger(__name__)

N_FEATURES = 77

CleaningPolicy = Literal["drop_row", "impute_zero"]


def default_schema() -> tuple[str, ...]:
    """The canonical 77-column CICIDS2017 feature-name list shipped as package data."""
    text = resources.files("netsentry.data").joinpath("cicids2017_features.txt").read_text()
    names = tuple(line.strip() for line in text.splitlines() if line.strip())
    assert len(names) == N_FEATURES
    return names


def load_schema(path: str | Path) -> tuple[str, ...]:
    """Read a schema file: one feature name per line."""
    names = tuple(
        line.strip() for line in Path(path).read_text().splitlines() if line.strip()
    )
    if not names:
        raise SchemaError(f"empty schema file: {path}")
    return names


@dataclass(frozen=True)
class Provenance:
    """Where a dataset came from and what cleaning touched it."""

    source: str = "<memory>"
    rows_dropped: int = 0
    values_imputed: int = 0
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class FlowRecord:
    """One labeled network flow."""

    features: np.ndarray
    label: int
    category: str


@dataclass(frozen=True)
class Dataset:
    """Immutable matrix-backed collection of labeled flows.

    features is (n, d) float64; labels is (n,) int64 in {0, 1}; categories
    keeps the verbatim attack-family string per row.
    """

    features: np.ndarray
    labels: np.ndarray
    categories: tuple[str, ...]
    feature_names: tuple[str, ...]
    provenance: Provenance = field(default_factory=Provenance)

    def __post_init__(self) -> None:
        if self.features.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {self.features.shape}")
        n = self.features.shape[0]
        if self.labels.shape != (n,) or len(self.categories) != n:
            raise DataError("features, labels, and categories lengths disagree")
        if self.features.shape[1] != len(self.feature_names):
            raise SchemaError(
                f"{self.features.shape[1]} feature columns vs "
                f"{len(self.feature_names)} schema names"
            )

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def attack_ratio(self) -> float:
        return float(self.labels.mean()) if len(self) else 0.0

    def record(self, i: int) -> FlowRecord:
        return FlowRecord(self.features[i], int(self.labels[i]), self.categories[i])

    def take(self, indices: np.ndarray | Sequence[int]) -> "Dataset":
        idx = np.asarray(indices, dtype=np.intp)
        return replace(
            self,
            features=self.features[idx],
            labels=self.labels[idx],
            categories=tuple(self.categories[i] for i in idx),
        )


def label_from_category(category: str) -> int:
    """"BENIGN" (case-insensitive, trimmed) -> 0, anything else -> 1."""
    return 0 if category.strip().upper() == "BENIGN" else 1


def parse_flow_csv(
    path: str | Path,
    schema: Sequence[str] | None = None,
    label_column: str = "Label",
) -> Dataset:
    """Parse an RFC-4180 flow CSV into a Dataset.

    Malformed data rows are skipped with a warning and counted in
    provenance.rows_dropped. A header whose feature-column count differs from
    the schema length is a SchemaError.
    """
    path = Path(path)
    if schema is None:
        schema = default_schema()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"empty CSV: {path}") from None
        header = [h.strip() for h in header]
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise SchemaError(
                f"label column {label_column!r} missing from {path}"
            ) from None
        feature_idx = [i for i in range(len(header)) if i != label_idx]
        if len(feature_idx) != len(schema):
            raise SchemaError(
                f"{path}: {len(feature_idx)} feature columns, schema has {len(schema)}"
            )
        feature_names = tuple(header[i] for i in feature_idx)

        rows: list[list[float]] = []
        labels: list[int] = []
        categories: list[str] = []
        dropped = 0
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                logger.warning("%s:%d: expected %d fields, got %d; row skipped",
                               path, lineno, len(header), len(row))
                dropped += 1
                continue
            try:
                values = [float(row[i]) for i in feature_idx]
            except ValueError:
                logger.warning("%s:%d: unparseable numeric field; row skipped",
                               path, lineno)
                dropped += 1
                continue
            category = row[label_idx].strip()
            rows.append(values)
            labels.append(label_from_category(category))
            categories.append(category)

    features = np.array(rows, dtype=np.float64).reshape(len(rows), len(schema))
    return Dataset(
        features=features,
        labels=np.array(labels, dtype=np.int64),
        categories=tuple(categories),
        feature_names=feature_names,
        provenance=Provenance(source=str(path), rows_dropped=dropped),
    )


def clean_dataset(d: Dataset, policy: CleaningPolicy = "drop_row") -> Dataset:
    """Remove or zero out non-finite cells.

    drop_row removes any record containing NaN/inf; impute_zero keeps every
    record and sets offending cells to 0. Always succeeds.
    """
    finite = np.isfinite(d.features)
    if finite.all():
        return d
    if policy == "drop_row":
        keep = finite.all(axis=1)
        dropped = int((~keep).sum())
        out = d.take(np.flatnonzero(keep))
        prov = replace(out.provenance, rows_dropped=d.provenance.rows_dropped + dropped)
        return replace(out, provenance=prov)
    if policy == "impute_zero":
        imputed = int((~finite).sum())
        features = np.where(finite, d.features, 0.0)
        prov = replace(d.provenance, values_imputed=d.provenance.values_imputed + imputed)
        return replace(d, features=features, provenance=prov)
    raise ValueError(f"unknown cleaning policy: {policy!r}")


@dataclass(frozen=True)
class Standardizer:
    """Per-column z-score transform fitted on training data only."""

    means: np.ndarray
    std_devs: np.ndarray

    @property
    def n_features(self) -> int:
        return self.means.shape[0]

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.n_features:
            raise SchemaError(
                f"standardizer has {self.n_features} columns, input has {x.shape[-1]}"
            )
        return (x - self.means) / self.std_devs

    def inverse(self, z: np.ndarray) -> np.ndarray:
        return z * self.std_devs + self.means


def fit_standardizer(train: Dataset) -> Standardizer:
    """Fit per-column mean and population std; zero-std columns pass through."""
    if len(train) == 0:
        raise DataError("cannot fit standardizer on an empty dataset")
    means = train.features.mean(axis=0)
    stds = train.features.std(axis=0)
    stds = np.where(stds == 0.0, 1.0, stds)
    return Standardizer(means=means, std_devs=stds)


def apply_standardizer(s: Standardizer, d: Dataset) -> Dataset:
    """Replace every cell by (x - mean) / std; labels and categories untouched."""
    return replace(d, features=s.transform(d.features))


def split_dataset(
    d: Dataset, train_fraction: float = 0.7, seed: int = 0
) -> tuple[Dataset, Dataset]:
    """Seeded shuffle then disjoint, exhaustive train/test partition."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(d))
    n_train = int(math.floor(train_fraction * len(d) + 0.5))
    return d.take(perm[:n_train]), d.take(perm[n_train:])


def stratified_sample(d: Dataset, n: int, seed: int = 0) -> Dataset:
    """Seeded sample of size n preserving the attack ratio exactly (round-to-nearest)."""
    if n > len(d):
        raise DataError(f"requested {n} records from a dataset of {len(d)}")
    pos = np.flatnonzero(d.labels == 1)
    neg = np.flatnonzero(d.labels == 0)
    if len(pos) == 0 or len(neg) == 0:
        raise DataError("stratified_sample requires both classes present")
    n_pos = int(math.floor(n * len(pos) / len(d) + 0.5))
    n_pos = min(max(n_pos, 0), min(n, len(pos)))
    n_neg = n - n_pos
    if n_neg > len(neg):
        raise DataError("not enough benign records for requested sample size")
    rng = np.random.default_rng(seed)
    chosen = np.concatenate([
        rng.choice(pos, size=n_pos, replace=False),
        rng.choice(neg, size=n_neg, replace=False),
    ])
    rng.shuffle(chosen)
    return d.take(chosen)
