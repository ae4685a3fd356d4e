"""Detection metrics: confusion matrices, bootstrap CIs, Welch's t-test,
per-attack-category breakdowns, and report rendering.

Undefined ratios (zero denominators) surface as None rather than 0, so a
report never silently claims a 0% precision it cannot support.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DataError

# Published baseline accuracies rendered alongside reports for context.
# These are constants from the literature, not measurements of this engine.
PUBLISHED_BASELINES = {
    "Snort": {"accuracy": 0.712, "fpr": 0.087},
    "Suricata": {"accuracy": 0.685, "fpr": 0.112},
    "ModSecurity": {"accuracy": 0.623, "fpr": 0.156},
}


@dataclass(frozen=True)
class ConfusionMatrix:
    tn: int
    fp: int
    fn: int
    tp: int

    @property
    def total(self) -> int:
        return self.tn + self.fp + self.fn + self.tp


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float | None
    recall: float | None
    f1: float | None
    fpr: float | None

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "fpr": self.fpr,
        }


def confusion(labels: np.ndarray, predictions: np.ndarray) -> ConfusionMatrix:
    labels = np.asarray(labels)
    predictions = np.asarray(predictions)
    if labels.shape != predictions.shape:
        raise DataError("labels and predictions lengths differ")
    return ConfusionMatrix(
        tn=int(((labels == 0) & (predictions == 0)).sum()),
        fp=int(((labels == 0) & (predictions == 1)).sum()),
        fn=int(((labels == 1) & (predictions == 0)).sum()),
        tp=int(((labels == 1) & (predictions == 1)).sum()),
    )


def metrics(m: ConfusionMatrix) -> MetricsReport:
    if m.total == 0:
        raise DataError("empty confusion matrix")
    accuracy = (m.tp + m.tn) / m.total
    precision = m.tp / (m.tp + m.fp) if m.tp + m.fp else None
    recall = m.tp / (m.tp + m.fn) if m.tp + m.fn else None
    fpr = m.fp / (m.fp + m.tn) if m.fp + m.tn else None
    if precision is not None and recall is not None and precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1 = None
    return MetricsReport(accuracy=accuracy, precision=precision,
                         recall=recall, f1=f1, fpr=fpr)


_CI_METRICS = ("accuracy", "precision", "recall", "f1", "fpr")


def bootstrap_ci(
    labels: np.ndarray,
    predictions: np.ndarray,
    n_resamples: int = 1000,
    level: float = 0.95,
    seed: int = 0,
    min_valid: int | None = None,
) -> dict[str, tuple[float, float]]:
    """Percentile-method CIs for each metric from seeded resampling.

    Resamples that end up single-class are skipped; fewer than min_valid
    surviving resamples (default 90% of n_resamples, i.e. 900 of 1000) is
    an error.
    """
    if min_valid is None:
        min_valid = max(1, int(round(0.9 * n_resamples)))
    labels = np.asarray(labels)
    predictions = np.asarray(predictions)
    if len(labels) == 0:
        raise DataError("empty sample")
    if len(np.unique(labels)) < 2:
        raise DataError("bootstrap requires both classes present")

    rng = np.random.default_rng(seed)
    n = len(labels)
    samples: dict[str, list[float]] = {k: [] for k in _CI_METRICS}
    skipped = 0
    for _ in range(n_resamples):
        idx = rng.integers(0, n, size=n)
        lab = labels[idx]
        if lab.min() == lab.max():
            skipped += 1
            continue
        rep = metrics(confusion(lab, predictions[idx]))
        for k in _CI_METRICS:
            v = getattr(rep, k)
            if v is not None:
                samples[k].append(v)
    if n_resamples - skipped < min_valid:
        raise DataError(
            f"only {n_resamples - skipped} valid resamples (< {min_valid})"
        )
    alpha = (1.0 - level) / 2.0
    out = {}
    for k, vals in samples.items():
        if vals:
            lo, hi = np.quantile(np.asarray(vals), [alpha, 1.0 - alpha])
            out[k] = (float(lo), float(hi))
    return out


def welch_t_test(sample_a: np.ndarray, sample_b: np.ndarray) -> dict[str, float]:
    """Welch statistic, Satterthwaite df, and two-sided p-value."""
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if len(a) < 2 or len(b) < 2:
        raise DataError("each sample needs at least 2 values")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise DataError("samples must be finite")
    va = a.var(ddof=1) / len(a)
    vb = b.var(ddof=1) / len(b)
    if va + vb == 0.0:
        raise DataError("zero variance in both samples")
    t = (a.mean() - b.mean()) / math.sqrt(va + vb)
    df = (va + vb) ** 2 / (va**2 / (len(a) - 1) + vb**2 / (len(b) - 1))
    p = 2.0 * float(stats.t.sf(abs(t), df))
    return {"t": float(t), "df": float(df), "p": p}


def per_category(
    labels: np.ndarray, predictions: np.ndarray, categories: tuple[str, ...]
) -> dict[str, float]:
    """Recall restricted to each attack category present in the data."""
    labels = np.asarray(labels)
    predictions = np.asarray(predictions)
    if not (len(labels) == len(predictions) == len(categories)):
        raise DataError("labels, predictions, and categories lengths differ")
    rates: dict[str, float] = {}
    cats = np.asarray(categories)
    for cat in sorted(set(categories)):
        mask = (cats == cat) & (labels == 1)
        n = int(mask.sum())
        if n:
            rates[cat] = float(predictions[mask].sum() / n)
    return rates


@dataclass(frozen=True)
class EvaluationReport:
    matrix: ConfusionMatrix
    metrics: MetricsReport
    confidence_intervals: dict[str, tuple[float, float]] = field(default_factory=dict)
    category_rates: dict[str, float] = field(default_factory=dict)
    skipped_events: int = 0
    seed: int = 0
    config_echo: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "matrix": {"tn": self.matrix.tn, "fp": self.matrix.fp,
                       "fn": self.matrix.fn, "tp": self.matrix.tp},
            "metrics": self.metrics.as_dict(),
            "confidence_intervals": {
                k: list(v) for k, v in self.confidence_intervals.items()
            },
            "per_category": self.category_rates,
            "skipped_events": self.skipped_events,
            "seed": self.seed,
            "config": self.config_echo,
            "baselines_published_not_reproduced": PUBLISHED_BASELINES,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _pct(v: float | None, digits: int = 2) -> str:
    return "n/a" if v is None else f"{100 * v:.{digits}f}%"


def render_text_report(report: EvaluationReport) -> str:
    """Aligned plain-text tables: metrics, confusion matrix, per-category rates."""
    m, r = report.metrics, report.matrix
    lines = [
        f"Detection performance (n={r.total})",
        f"  {'Accuracy':<12} {_pct(m.accuracy)}",
        f"  {'Precision':<12} {_pct(m.precision)}",
        f"  {'Recall':<12} {_pct(m.recall)}",
        f"  {'F1-Score':<12} " + ("n/a" if m.f1 is None else f"{m.f1:.3f}"),
        f"  {'FPR':<12} {_pct(m.fpr)}",
        "",
        "Confusion matrix",
        f"  {'':<16}{'Pred Normal':>12}{'Pred Attack':>12}",
        f"  {'Actual Normal':<16}{r.tn:>12}{r.fp:>12}",
        f"  {'Actual Attack':<16}{r.fn:>12}{r.tp:>12}",
    ]
    if report.confidence_intervals:
        lines += ["", "95% confidence intervals (bootstrap)"]
        for k, (lo, hi) in sorted(report.confidence_intervals.items()):
            lines.append(f"  {k:<12} [{lo:.4f}, {hi:.4f}]")
    if report.category_rates:
        lines += ["", "Detection rate by attack type"]
        for cat, rate in sorted(report.category_rates.items()):
            lines.append(f"  {cat:<20} {_pct(rate)}")
    lines += ["", "Published baselines (published, not reproduced)"]
    for name, vals in PUBLISHED_BASELINES.items():
        lines.append(
            f"  {name:<12} accuracy {_pct(vals['accuracy'], 1)}"
            f"  fpr {_pct(vals['fpr'], 1)}"
        )
    if report.skipped_events:
        lines += ["", f"Skipped events: {report.skipped_events}"]
    lines += ["", f"Seed: {report.seed}"]
    return "\n".join(lines) + "\n"
