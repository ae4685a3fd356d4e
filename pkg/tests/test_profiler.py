"""Tests for behavioral timing profiles and source classification."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netsentry.errors import DataError
from netsentry.profiler import (
    BUFFER_SIZE,
    MIN_OBSERVATIONS,
    Profile,
    ProfileClass,
    ProfileStore,
    classify_profile,
    classify_timing,
)


def reference_classify(tau, sigma):
    """Independent restatement of the ordered timing rules."""
    if sigma < 0.5 and tau < 1.0:
        return "automated"
    if tau < 2.0 and sigma >= 0.5:
        return "rapid"
    if tau > 10.0:
        return "deliberate"
    return "standard"


class TestMoments:
    def test_hand_computed_gaps(self):
        store = ProfileStore()
        for t in (0.0, 1.0, 3.0):
            p = store.observe("a", t, endpoint="/x")
        # gaps 1, 2 -> mean 1.5, population std 0.5
        assert p.tau == pytest.approx(1.5)
        assert p.sigma_tau == pytest.approx(0.5)
        assert p.n == 3

    def test_single_observation_has_zero_moments(self):
        store = ProfileStore()
        p = store.observe("a", 7.0, endpoint="/x")
        assert p.tau == 0.0
        assert p.sigma_tau == 0.0

    def test_endpoint_diversity(self):
        store = ProfileStore()
        store.observe("a", 0.0, endpoint="/a")
        store.observe("a", 1.0, endpoint="/b")
        p = store.observe("a", 2.0, endpoint="/a")
        assert p.rho == pytest.approx(2 / 3)

    def test_buffer_bounded(self):
        store = ProfileStore(buffer_size=8)
        for i in range(50):
            p = store.observe("a", float(i), endpoint="/x")
        assert len(p.timestamps) == 8
        assert p.n == 50
        # moments computed over the retained window only
        assert p.tau == pytest.approx(1.0)

    def test_moments_match_numpy_oracle(self):
        rng = np.random.default_rng(3)
        ts = np.cumsum(rng.exponential(2.0, size=40))
        store = ProfileStore()
        for t in ts:
            p = store.observe("a", float(t), endpoint="/x")
        gaps = np.diff(ts[-BUFFER_SIZE:])
        assert p.tau == pytest.approx(gaps.mean())
        assert p.sigma_tau == pytest.approx(gaps.std())


class TestClassification:
    def test_rule_examples(self):
        assert classify_timing(0.5, 0.1) is ProfileClass.AUTOMATED
        assert classify_timing(1.5, 0.8) is ProfileClass.RAPID
        assert classify_timing(30.0, 5.0) is ProfileClass.DELIBERATE
        assert classify_timing(5.0, 1.0) is ProfileClass.STANDARD

    def test_boundaries(self):
        # tau = 1 with low sigma is not automated
        assert classify_timing(1.0, 0.1) is ProfileClass.STANDARD
        # sigma = 0.5 exactly counts as high variance
        assert classify_timing(1.0, 0.5) is ProfileClass.RAPID
        # tau = 10 exactly is not deliberate
        assert classify_timing(10.0, 0.6) is ProfileClass.STANDARD
        assert classify_timing(10.0001, 0.0) is ProfileClass.DELIBERATE

    def test_grid_sweep_matches_reference(self):
        taus = np.linspace(0.0, 20.0, 201)
        sigmas = np.linspace(0.0, 5.0, 201)
        for tau in taus:
            for sigma in sigmas:
                got = classify_timing(float(tau), float(sigma)).value
                assert got == reference_classify(tau, sigma)

    @given(
        st.floats(min_value=0, max_value=100, allow_nan=False),
        st.floats(min_value=0, max_value=100, allow_nan=False),
    )
    @settings(max_examples=300)
    def test_total_and_deterministic(self, tau, sigma):
        got = classify_timing(tau, sigma)
        assert got.value == reference_classify(tau, sigma)

    def test_provisional_reports_standard(self):
        p = Profile(source="a", tau=0.1, sigma_tau=0.0, n=MIN_OBSERVATIONS - 1)
        assert classify_profile(p) is ProfileClass.STANDARD
        p.n = MIN_OBSERVATIONS
        assert classify_profile(p) is ProfileClass.AUTOMATED


class TestStore:
    def test_time_regression_rejected(self):
        store = ProfileStore()
        store.observe("a", 5.0, endpoint="/x")
        with pytest.raises(DataError):
            store.observe("a", 4.0, endpoint="/x")
        # profile left unchanged
        assert store.get("a").n == 1

    def test_equal_timestamp_allowed(self):
        store = ProfileStore()
        store.observe("a", 5.0, endpoint="/x")
        p = store.observe("a", 5.0, endpoint="/y")
        assert p.n == 2

    def test_eviction_strictly_older_than_ttl(self):
        store = ProfileStore()
        store.observe("old", 0.0, endpoint="/x")
        store.observe("edge", 100.0, endpoint="/x")
        store.observe("new", 500.0, endpoint="/x")
        evicted = store.evict_stale(now=600.0, ttl=500.0)
        assert evicted == 1
        assert store.get("old") is None
        assert store.get("edge") is not None
        assert store.get("new") is not None

    def test_sources_isolated(self):
        store = ProfileStore()
        store.observe("a", 0.0, endpoint="/x")
        store.observe("b", 100.0, endpoint="/y")
        store.observe("a", 1.0, endpoint="/x")
        assert store.get("a").n == 2
        assert store.get("b").n == 1

    def test_pattern_accumulation(self):
        store = ProfileStore()
        store.observe("a", 0.0, endpoint="/x", patterns={"scan"})
        p = store.observe("a", 1.0, endpoint="/x", patterns={"brute_force"})
        assert p.patterns == {"scan", "brute_force"}

    def test_dump_json_sorted_and_parseable(self):
        store = ProfileStore()
        store.observe("beta", 0.0, endpoint="/x")
        store.observe("alpha", 1.0, endpoint="/y")
        rows = json.loads(store.dump_json())
        assert [r["source"] for r in rows] == ["alpha", "beta"]
        assert all(r["provisional"] for r in rows)
