"""Tests for detection metrics, bootstrap CIs, and Welch's t-test."""

import json
import math

import numpy as np
import pytest
from scipy import stats

from netsentry.errors import DataError
from netsentry.evaluation import (
    ConfusionMatrix,
    PUBLISHED_BASELINES,
    bootstrap_ci,
    confusion,
    metrics,
    per_category,
    welch_t_test,
)

# Confusion counts from a 50k-row holdout known to yield headline metrics
# of 99.88 accuracy / 99.48 precision / 99.92 recall / 0.13 FPR.
REFERENCE = ConfusionMatrix(tn=40164, fp=51, fn=8, tp=9777)


class TestMetrics:
    def test_reference_counts_reproduce_headline_metrics(self):
        rep = metrics(REFERENCE)
        assert rep.accuracy == pytest.approx(0.9988, abs=5e-5)
        assert rep.precision == pytest.approx(0.9948, abs=5e-5)
        assert rep.recall == pytest.approx(0.9992, abs=5e-5)
        assert rep.f1 == pytest.approx(0.997, abs=5e-4)
        assert rep.fpr == pytest.approx(0.0013, abs=5e-5)

    def test_exact_formulas(self):
        m = ConfusionMatrix(tn=50, fp=10, fn=5, tp=35)
        rep = metrics(m)
        assert rep.accuracy == pytest.approx(85 / 100)
        assert rep.precision == pytest.approx(35 / 45)
        assert rep.recall == pytest.approx(35 / 40)
        assert rep.fpr == pytest.approx(10 / 60)
        p, r = 35 / 45, 35 / 40
        assert rep.f1 == pytest.approx(2 * p * r / (p + r))

    def test_undefined_ratios_are_none(self):
        rep = metrics(ConfusionMatrix(tn=10, fp=0, fn=0, tp=0))
        assert rep.precision is None
        assert rep.recall is None
        assert rep.f1 is None
        assert rep.fpr == 0.0
        rep2 = metrics(ConfusionMatrix(tn=0, fp=0, fn=2, tp=3))
        assert rep2.fpr is None

    def test_empty_matrix_rejected(self):
        with pytest.raises(DataError):
            metrics(ConfusionMatrix(0, 0, 0, 0))

    def test_confusion_counts(self):
        labels = np.array([0, 0, 1, 1, 1, 0])
        preds = np.array([0, 1, 1, 0, 1, 0])
        m = confusion(labels, preds)
        assert (m.tn, m.fp, m.fn, m.tp) == (2, 1, 1, 2)

    def test_confusion_length_mismatch(self):
        with pytest.raises(DataError):
            confusion(np.array([0, 1]), np.array([0]))


class TestPerCategory:
    def test_recall_per_category(self):
        labels = np.array([1, 1, 1, 0, 1])
        preds = np.array([1, 0, 1, 1, 1])
        cats = ("ddos", "ddos", "portscan", "benign", "portscan")
        rates = per_category(labels, preds, cats)
        assert rates == {"ddos": 0.5, "portscan": 1.0}

    def test_benign_only_categories_excluded(self):
        labels = np.array([0, 0])
        preds = np.array([0, 1])
        assert per_category(labels, preds, ("benign", "benign")) == {}


class TestBootstrap:
    @staticmethod
    def fixture(n=400, seed=9):
        rng = np.random.default_rng(seed)
        labels = (rng.uniform(size=n) < 0.3).astype(np.int64)
        preds = labels.copy()
        flip = rng.uniform(size=n) < 0.05
        preds[flip] = 1 - preds[flip]
        return labels, preds

    def test_deterministic_given_seed(self):
        labels, preds = self.fixture()
        a = bootstrap_ci(labels, preds, n_resamples=200, seed=4)
        b = bootstrap_ci(labels, preds, n_resamples=200, seed=4)
        assert a == b

    def test_interval_contains_point_estimate(self):
        labels, preds = self.fixture()
        point = metrics(confusion(labels, preds)).as_dict()
        cis = bootstrap_ci(labels, preds, n_resamples=500, seed=1)
        for k, (lo, hi) in cis.items():
            assert lo <= point[k] <= hi
            assert lo <= hi

    def test_width_shrinks_roughly_sqrt_n(self):
        # quadrupling the sample should roughly halve the CI width
        labels_s, preds_s = self.fixture(n=500, seed=2)
        labels_l = np.tile(labels_s, 4)
        preds_l = np.tile(preds_s, 4)
        ci_s = bootstrap_ci(labels_s, preds_s, n_resamples=800, seed=3)
        ci_l = bootstrap_ci(labels_l, preds_l, n_resamples=800, seed=3)
        w_s = ci_s["accuracy"][1] - ci_s["accuracy"][0]
        w_l = ci_l["accuracy"][1] - ci_l["accuracy"][0]
        assert w_l == pytest.approx(w_s / 2, rel=0.3)

    def test_single_class_rejected(self):
        with pytest.raises(DataError):
            bootstrap_ci(np.ones(10, dtype=int), np.ones(10, dtype=int))

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            bootstrap_ci(np.array([]), np.array([]))


class TestWelch:
    def test_matches_scipy_oracle(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            a = rng.normal(0.0, 1.0, size=rng.integers(5, 40))
            b = rng.normal(0.3, 2.0, size=rng.integers(5, 40))
            got = welch_t_test(a, b)
            t_ref, p_ref = stats.ttest_ind(a, b, equal_var=False)
            assert got["t"] == pytest.approx(float(t_ref))
            assert got["p"] == pytest.approx(float(p_ref))

    def test_satterthwaite_df_hand_check(self):
        a = np.array([1.0, 2.0, 3.0])
        b = np.array([2.0, 4.0, 6.0, 8.0])
        got = welch_t_test(a, b)
        va = a.var(ddof=1) / 3
        vb = b.var(ddof=1) / 4
        df = (va + vb) ** 2 / (va**2 / 2 + vb**2 / 3)
        assert got["df"] == pytest.approx(df)
        assert got["t"] == pytest.approx((a.mean() - b.mean()) / math.sqrt(va + vb))

    def test_identical_constant_samples_rejected(self):
        with pytest.raises(DataError):
            welch_t_test(np.array([1.0, 1.0]), np.array([1.0, 1.0]))

    def test_small_samples_rejected(self):
        with pytest.raises(DataError):
            welch_t_test(np.array([1.0]), np.array([1.0, 2.0]))


class TestBaselines:
    def test_constants_present(self):
        assert set(PUBLISHED_BASELINES) == {"Snort", "Suricata", "ModSecurity"}
        assert PUBLISHED_BASELINES["Snort"]["accuracy"] == pytest.approx(0.712)
