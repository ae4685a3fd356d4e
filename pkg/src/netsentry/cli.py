"""Command-line entry point.

Subcommands: train, tune-threshold, evaluate, simulate-attacker,
profile-report, stream. Exit codes: 0 success, 1 usage error, 2 data error,
3 internal error. Output files are written atomically (temp + rename).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .config import EngineConfig, load_config
from .deception import DecoyCatalog
from .errors import ConfigError, DataError, NetsentryError, ScenarioError
from .evaluation import render_text_report
from .flows import (
    Dataset,
    clean_dataset,
    load_schema,
    parse_flow_csv,
    split_dataset,
    stratified_sample,
)
from .orchestrator import AttackScenario, Engine, TrafficEvent, simulate_attacker
from .persistence import load_bundle, save_bundle
from .signal_bus import SignalBus
from .synthetic import make_replay_events
from .training import train_ensemble, tune_bundle_threshold

USAGE_ERROR, DATA_ERROR, INTERNAL_ERROR = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_dataset(cfg: EngineConfig) -> Dataset:
    if not cfg.dataset:
        raise ConfigError("no dataset path given (flag --dataset or config key)")
    schema = load_schema(cfg.schema) if cfg.schema else None
    data = parse_flow_csv(cfg.dataset, schema=schema, label_column=cfg.label_column)
    return clean_dataset(data, cfg.cleaning_policy)  # type: ignore[arg-type]


def _make_engine(cfg: EngineConfig, bundle) -> Engine:
    catalog = (
        DecoyCatalog.from_file(cfg.decoy_catalog)
        if cfg.decoy_catalog
        else DecoyCatalog.default()
    )
    return Engine(bundle=bundle, bus=SignalBus(), catalog=catalog)


def _require_model(cfg: EngineConfig):
    if not cfg.model:
        raise ConfigError("no model path given (flag --model or config key)")
    return load_bundle(cfg.model)


def cmd_train(cfg: EngineConfig) -> int:
    data = _load_dataset(cfg)
    result = train_ensemble(
        data,
        detector_cfg=cfg.detectors(),
        resample_cfg=cfg.resample(),
        weights=cfg.weights(),
        cleaning_policy=cfg.cleaning_policy,  # type: ignore[arg-type]
        train_fraction=cfg.train_fraction,
        seed=cfg.seed,
    )
    for name, acc in result.training_accuracy.items():
        print(f"training accuracy {name}: {acc:.4f}")
    if not cfg.model:
        raise ConfigError("no model output path given")
    save_bundle(cfg.model, result.bundle)
    print(f"model written to {cfg.model}")
    return 0


def cmd_tune_threshold(cfg: EngineConfig) -> int:
    bundle = _require_model(cfg)
    data = _load_dataset(cfg)
    _, test = split_dataset(data, cfg.train_fraction, seed=cfg.seed)
    tuned, theta, f1 = tune_bundle_threshold(
        bundle,
        test,
        grid=cfg.threshold_grid(),
        validation_fraction=cfg.tuning_validation_fraction,
        seed=cfg.seed,
    )
    save_bundle(cfg.model, tuned)
    print(f"theta_opt = {theta:.2f} (validation F1 = {f1:.3f})")
    return 0


def _replay_events(cfg: EngineConfig, data: Dataset):
    test_pool = split_dataset(data, cfg.train_fraction, seed=cfg.seed)[1]
    n = min(cfg.sample_size, len(test_pool))
    sample = stratified_sample(test_pool, n, seed=cfg.seed)
    return make_replay_events(sample, seed=cfg.seed, benign_rate=cfg.benign_rate)


def cmd_evaluate(cfg: EngineConfig) -> int:
    bundle = _require_model(cfg)
    data = _load_dataset(cfg)
    engine = _make_engine(cfg, bundle)
    with engine.bus:
        report, _ = engine.replay(
            _replay_events(cfg, data),
            n_bootstrap=cfg.bootstrap_resamples,
            config_echo=cfg.echo(),
        )
        engine.bus.flush()
    text = render_text_report(report)
    print(text, end="")
    if cfg.report_json:
        _atomic_write(cfg.report_json, report.to_json() + "\n")
    if cfg.report_text:
        _atomic_write(cfg.report_text, text)
    return 0


def _outcome_dict(o) -> dict:
    return {
        "ts": o.timestamp,
        "source": o.source,
        "scores": {"p_rf": o.scores.p_rf, "p_nn": o.scores.p_nn,
                   "p_xgb": o.scores.p_xgb, "p_anom": o.scores.p_anom},
        "probability": o.probability,
        "is_attack": o.is_attack,
        "profile_class": o.profile_class.value,
        "level": o.level,
        "plan": {"level": o.plan.level, "actions": list(o.plan.actions),
                 "delay_ms": o.plan.delay_ms, "decoy": o.plan.decoy},
    }


def cmd_simulate_attacker(cfg: EngineConfig, args: argparse.Namespace) -> int:
    bundle = _require_model(cfg)
    data = _load_dataset(cfg)
    attack_pool = data.features[data.labels == 1]
    benign_pool = data.features[data.labels == 0]
    if len(attack_pool) == 0 or len(benign_pool) == 0:
        raise DataError("simulation needs both classes in the dataset")
    engine = _make_engine(cfg, bundle)
    scenario = AttackScenario(
        profile_class=args.profile_class,
        n_events=args.events,
        attack_fraction=args.attack_fraction,
        tau=args.tau,
        sigma=args.sigma,
    )
    with engine.bus:
        outcomes = simulate_attacker(
            engine, scenario, attack_pool, benign_pool, seed=cfg.seed
        )
        engine.bus.flush()
    lines = "".join(
        json.dumps(_outcome_dict(o), sort_keys=True) + "\n" for o in outcomes
    )
    if args.out:
        _atomic_write(args.out, lines)
    else:
        print(lines, end="")
    return 0


def cmd_profile_report(cfg: EngineConfig, out: str | None) -> int:
    bundle = _require_model(cfg)
    data = _load_dataset(cfg)
    engine = _make_engine(cfg, bundle)
    with engine.bus:
        engine.replay(_replay_events(cfg, data), n_bootstrap=0)
        engine.bus.flush()
    text = engine.profiles.dump_json() + "\n"
    if out:
        _atomic_write(out, text)
    else:
        print(text, end="")
    return 0


def cmd_stream(cfg: EngineConfig) -> int:
    """Live mode: newline-delimited JSON events on stdin, outcomes on stdout."""
    bundle = _require_model(cfg)
    engine = _make_engine(cfg, bundle)
    with engine.bus:
        for line in sys.stdin:
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            event = TrafficEvent(
                timestamp=float(raw["ts"]),
                source=str(raw["src"]),
                endpoint=str(raw.get("endpoint", "/")),
                features=np.asarray(raw["features"], dtype=np.float64),
                label=raw.get("label"),
                category=raw.get("category"),
            )
            outcome = engine.process_event(event)
            if outcome is None:
                print(json.dumps({"skipped": True, "ts": event.timestamp}))
            else:
                print(json.dumps(_outcome_dict(outcome), sort_keys=True))
        engine.bus.flush()
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--dataset", help="flow CSV path")
    p.add_argument("--schema", help="feature-name schema file (one name per line)")
    p.add_argument("--model", help="model container path")
    p.add_argument("--seed", type=int, help="master RNG seed")
    p.add_argument("--label-column", dest="label_column")
    p.add_argument("--cleaning-policy", dest="cleaning_policy",
                   choices=["drop_row", "impute_zero"])
    p.add_argument("--sample-size", dest="sample_size", type=int)
    p.add_argument("--smote-ratio", dest="smote_ratio", type=float)
    p.add_argument("--under-ratio", dest="under_ratio", type=float)
    p.add_argument("--k-neighbors", dest="k_neighbors", type=int)
    p.add_argument("--decoy-catalog", dest="decoy_catalog")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netsentry")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the four-detector ensemble")
    _add_common(p)

    p = sub.add_parser("tune-threshold", help="grid-search theta on validation data")
    _add_common(p)

    p = sub.add_parser("evaluate", help="stratified-sample replay with reports")
    _add_common(p)
    p.add_argument("--bootstrap", dest="bootstrap_resamples", type=int)
    p.add_argument("--report-json", dest="report_json")
    p.add_argument("--report-text", dest="report_text")

    p = sub.add_parser("simulate-attacker", help="synthetic attacker scenario")
    _add_common(p)
    p.add_argument("--class", dest="profile_class", required=True,
                   choices=["automated", "rapid", "deliberate", "standard"])
    p.add_argument("--events", type=int, default=50)
    p.add_argument("--attack-fraction", type=float, default=1.0)
    p.add_argument("--tau", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--out", help="outcome NDJSON log path (default stdout)")

    p = sub.add_parser("profile-report", help="replay then dump behavioral profiles")
    _add_common(p)
    p.add_argument("--out", help="profile JSON path (default stdout)")

    p = sub.add_parser("stream", help="process NDJSON events from stdin")
    _add_common(p)

    return parser


_CONFIG_KEYS = (
    "dataset", "schema", "model", "seed", "label_column", "cleaning_policy",
    "sample_size", "smote_ratio", "under_ratio", "k_neighbors",
    "decoy_catalog", "bootstrap_resamples", "report_json", "report_text",
)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        overrides = {
            k: getattr(args, k) for k in _CONFIG_KEYS if hasattr(args, k)
        }
        cfg = load_config(args.config, overrides)
        if args.command == "train":
            return cmd_train(cfg)
        if args.command == "tune-threshold":
            return cmd_tune_threshold(cfg)
        if args.command == "evaluate":
            return cmd_evaluate(cfg)
        if args.command == "simulate-attacker":
            return cmd_simulate_attacker(cfg, args)
        if args.command == "profile-report":
            return cmd_profile_report(cfg, args.out)
        if args.command == "stream":
            return cmd_stream(cfg)
        raise AssertionError(f"unhandled command {args.command}")
    except (ConfigError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except NetsentryError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
