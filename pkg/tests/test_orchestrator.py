"""Tests for the streaming engine: event pipeline, replay, attack simulation."""

import numpy as np
import pytest

from netsentry.deception import QUIET_WINDOW
from netsentry.ensemble import DetectorScores, combine
from netsentry.errors import DataError, ScenarioError
from netsentry.orchestrator import (
    AttackScenario,
    Engine,
    TrafficEvent,
    simulate_attacker,
)
from netsentry.profiler import ProfileClass
from netsentry.signal_bus import SignalBus
from netsentry.synthetic import AttackerSpec, make_replay_events


@pytest.fixture
def engine(tuned_bundle):
    with SignalBus() as bus:
        yield Engine(bundle=tuned_bundle, bus=bus)


def event(t, source="203.0.113.7", endpoint="/api", features=None, n_features=77, **kw):
    if features is None:
        features = np.zeros(n_features)
    return TrafficEvent(timestamp=t, source=source, endpoint=endpoint,
                        features=features, **kw)


class TestProcessEvent:
    def test_max_scores_on_new_source_reaches_level_three(self, engine):
        # p = 1.0 >= 0.9, base increment 2, from L1 -> L3
        out = engine.process_event(
            event(0.0), scores=DetectorScores(1.0, 1.0, 1.0, 1.0)
        )
        assert out.probability == pytest.approx(1.0)
        assert out.is_attack is True
        assert out.level == 3

    def test_benign_event_stays_level_one(self, engine):
        out = engine.process_event(
            event(0.0), scores=DetectorScores(0.0, 0.0, 0.0, 0.0)
        )
        assert out.is_attack is False
        assert out.level == 1
        assert out.plan.actions == ("log",)

    def test_probability_matches_combiner(self, engine):
        s = DetectorScores(0.8, 0.6, 0.4, 0.2)
        out = engine.process_event(event(0.0), scores=s)
        assert out.probability == pytest.approx(combine(s, engine.bundle.weights))

    def test_dimension_mismatch_skipped(self, engine):
        out = engine.process_event(event(0.0, features=np.zeros(5)))
        assert out is None
        assert engine.skipped_events == 1

    def test_quiet_window_deescalates_between_events(self, engine):
        hot = DetectorScores(1.0, 1.0, 1.0, 1.0)
        cold = DetectorScores(0.0, 0.0, 0.0, 0.0)
        out = engine.process_event(event(0.0), scores=hot)
        assert out.level == 3
        out = engine.process_event(event(2 * QUIET_WINDOW), scores=cold)
        assert out.level == 1

    def test_signal_counts(self, tuned_bundle):
        counts = {"detection": 0, "escalation": 0, "response": 0}
        with SignalBus() as bus:
            for t in counts:
                bus.subscribe(t, "counter", lambda s, t=t: counts.__setitem__(t, counts[t] + 1))
            eng = Engine(bundle=tuned_bundle, bus=bus)
            hot = DetectorScores(1.0, 1.0, 1.0, 1.0)
            cold = DetectorScores(0.0, 0.0, 0.0, 0.0)
            for i in range(3):
                eng.process_event(event(float(i)), scores=hot)
            for i in range(2):
                eng.process_event(event(3.0 + i), scores=cold)
            bus.flush()
        assert counts == {"detection": 5, "escalation": 3, "response": 3}

    def test_untuned_bundle_rejected(self, small_result):
        with SignalBus() as bus:
            eng = Engine(bundle=small_result.bundle, bus=bus)
            with pytest.raises(DataError):
                eng.process_event(event(0.0), scores=DetectorScores(1, 1, 1, 1))


class TestReplay:
    @staticmethod
    def make_events(bundle, data, n=300, seed=5):
        specs = (
            AttackerSpec(source="attacker-auto", profile_class="automated"),
            AttackerSpec(source="attacker-slow", profile_class="deliberate"),
        )
        return make_replay_events(data.take(np.arange(n)), seed=seed, attackers=specs)

    def test_replay_decisions_match_single_event_pipeline(
        self, tuned_bundle, gaussian_data
    ):
        events = self.make_events(tuned_bundle, gaussian_data)
        with SignalBus() as bus:
            report, outcomes = Engine(bundle=tuned_bundle, bus=bus).replay(events)
        with SignalBus() as bus:
            eng = Engine(bundle=tuned_bundle, bus=bus)
            singles = [eng.process_event(e) for e in events]
        assert [o.is_attack for o in outcomes] == [s.is_attack for s in singles]
        assert [o.probability for o in outcomes] == pytest.approx(
            [s.probability for s in singles]
        )

    def test_replay_deterministic(self, tuned_bundle, gaussian_data):
        events = self.make_events(tuned_bundle, gaussian_data)
        reports = []
        for _ in range(2):
            with SignalBus() as bus:
                report, _ = Engine(bundle=tuned_bundle, bus=bus).replay(events)
            reports.append(report.to_json())
        assert reports[0] == reports[1]

    def test_replay_accuracy_on_separable_data(self, tuned_bundle, gaussian_data):
        events = self.make_events(tuned_bundle, gaussian_data, n=600)
        with SignalBus() as bus:
            report, _ = Engine(bundle=tuned_bundle, bus=bus).replay(events)
        assert report.metrics.accuracy >= 0.98
        assert report.matrix.total == 600

    def test_unordered_events_rejected(self, engine, gaussian_data):
        f = gaussian_data.features
        events = [event(1.0, features=f[0]), event(0.5, features=f[1])]
        with pytest.raises(DataError):
            engine.replay(events)

    def test_malformed_rows_counted_not_fatal(self, tuned_bundle, gaussian_data):
        events = self.make_events(tuned_bundle, gaussian_data, n=50)
        events.insert(10, event(events[9].timestamp, features=np.zeros(3), label=0))
        with SignalBus() as bus:
            eng = Engine(bundle=tuned_bundle, bus=bus)
            report, outcomes = eng.replay(events)
        assert report.skipped_events == 1
        assert len(outcomes) == 50


class TestSimulateAttacker:
    @pytest.fixture
    def pools(self, gaussian_data):
        attack = gaussian_data.features[gaussian_data.labels == 1]
        benign = gaussian_data.features[gaussian_data.labels == 0]
        return attack, benign

    @pytest.mark.parametrize(
        "pclass,expected",
        [
            ("automated", ProfileClass.AUTOMATED),
            ("rapid", ProfileClass.RAPID),
            ("deliberate", ProfileClass.DELIBERATE),
            ("standard", ProfileClass.STANDARD),
        ],
    )
    def test_simulated_source_lands_in_requested_class(
        self, engine, pools, pclass, expected
    ):
        attack, benign = pools
        outcomes = simulate_attacker(
            engine,
            AttackScenario(profile_class=pclass, n_events=40, source=f"sim-{pclass}"),
            attack, benign, seed=3,
        )
        assert outcomes[-1].profile_class is expected

    def test_full_attack_run_escalates_to_max_level(self, engine, pools):
        attack, benign = pools
        outcomes = simulate_attacker(
            engine,
            AttackScenario(profile_class="automated", n_events=40),
            attack, benign, seed=3,
        )
        assert outcomes[-1].level == 5
        levels = [o.level for o in outcomes]
        assert levels == sorted(levels)  # never drops during a sustained burst

    def test_infeasible_timing_rejected(self, engine, pools):
        attack, benign = pools
        with pytest.raises(ScenarioError):
            simulate_attacker(
                engine,
                AttackScenario(profile_class="automated", tau=5.0, sigma=0.1),
                attack, benign,
            )

    def test_unknown_class_rejected(self, engine, pools):
        attack, benign = pools
        with pytest.raises(ScenarioError):
            simulate_attacker(
                engine, AttackScenario(profile_class="stealthy"), attack, benign
            )

    def test_deterministic(self, tuned_bundle, pools):
        attack, benign = pools
        runs = []
        for _ in range(2):
            with SignalBus() as bus:
                eng = Engine(bundle=tuned_bundle, bus=bus)
                outs = simulate_attacker(
                    eng, AttackScenario(profile_class="rapid", n_events=25),
                    attack, benign, seed=9,
                )
            runs.append([(o.timestamp, o.probability, o.level) for o in outs])
        assert runs[0] == runs[1]
