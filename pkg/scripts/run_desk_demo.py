#!/usr/bin/env python3
"""Desk-scale demo: train the ensemble on synthetic flows, tune the decision
threshold, replay a 20k-event stream with injected attackers, and print the
evaluation report plus the final escalation levels.

Usage:
    python3 scripts/run_desk_demo.py [--seed N] [--events N] [--full-size]

--full-size uses the production detector sizes (slower); the default uses a
reduced ensemble that finishes in a few seconds.
"""

import argparse
import sys
import time

from netsentry.detectors import MlpConfig
from netsentry.evaluation import render_text_report
from netsentry.orchestrator import Engine
from netsentry.signal_bus import SignalBus
from netsentry.synthetic import make_gaussian_flows, make_replay_events
from netsentry.training import DetectorConfig, train_ensemble, tune_bundle_threshold

SMALL = DetectorConfig(
    rf_trees=15,
    gbt_trees=15,
    iso_trees=30,
    iso_subsample=128,
    mlp=MlpConfig(hidden_layers=(32, 16), learning_rate=0.05, max_epochs=30),
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--events", type=int, default=20_000)
    ap.add_argument("--full-size", action="store_true")
    args = ap.parse_args()

    t0 = time.perf_counter()
    train_data = make_gaussian_flows(3000, seed=args.seed)
    cfg = DetectorConfig() if args.full_size else SMALL
    result = train_ensemble(train_data, detector_cfg=cfg, seed=args.seed)
    bundle, theta, f1 = tune_bundle_threshold(
        result.bundle, result.test, seed=args.seed
    )
    print(f"trained in {time.perf_counter() - t0:.1f}s; "
          f"theta = {theta:.2f} (validation F1 = {f1:.3f})")

    stream_data = make_gaussian_flows(args.events, seed=args.seed + 1)
    events = make_replay_events(stream_data, seed=args.seed + 1)
    with SignalBus() as bus:
        engine = Engine(bundle=bundle, bus=bus)
        t1 = time.perf_counter()
        report, outcomes = engine.replay(events)
        elapsed = time.perf_counter() - t1
    print(f"replayed {len(events):,} events in {elapsed:.1f}s "
          f"({len(events) / elapsed:,.0f} events/s)\n")

    print(render_text_report(report))
    print("\nFinal escalation levels:")
    for src, level in sorted(engine.escalations.levels().items()):
        if level > 1:
            print(f"  {src}: L{level}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
