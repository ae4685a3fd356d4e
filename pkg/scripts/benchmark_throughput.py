#!/usr/bin/env python3
"""Measure scoring-path throughput of the streaming engine.

Trains a reduced ensemble, then replays synthetic event streams of growing
size and reports sustained events/s for the batch scorer alone and for the
full per-event pipeline (profiling, escalation, signal publication).
"""

import argparse
import sys
import time

import numpy as np

from netsentry.detectors import MlpConfig
from netsentry.orchestrator import Engine
from netsentry.signal_bus import SignalBus
from netsentry.synthetic import make_gaussian_flows, make_replay_events
from netsentry.training import DetectorConfig, train_ensemble, tune_bundle_threshold


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[2_000, 10_000, 50_000])
    args = ap.parse_args()

    cfg = DetectorConfig(
        rf_trees=15, gbt_trees=15, iso_trees=30, iso_subsample=128,
        mlp=MlpConfig(hidden_layers=(32, 16), learning_rate=0.05, max_epochs=30),
    )
    result = train_ensemble(make_gaussian_flows(3000, seed=args.seed),
                            detector_cfg=cfg, seed=args.seed)
    bundle, _, _ = tune_bundle_threshold(result.bundle, result.test, seed=args.seed)

    print(f"{'events':>8}  {'score-only ev/s':>16}  {'full pipeline ev/s':>19}")
    for n in args.sizes:
        data = make_gaussian_flows(n, seed=args.seed + 1)
        events = make_replay_events(data, seed=args.seed + 1)
        feats = np.array([e.features for e in events])

        with SignalBus() as bus:
            engine = Engine(bundle=bundle, bus=bus)
            t0 = time.perf_counter()
            engine.score_matrix(feats)
            score_rate = n / (time.perf_counter() - t0)

            t0 = time.perf_counter()
            engine.replay(events)
            full_rate = n / (time.perf_counter() - t0)
        print(f"{n:>8,}  {score_rate:>16,.0f}  {full_rate:>19,.0f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
