"""Synthetic desk-scale traffic: two-Gaussian flow datasets and replay streams.

Benign and attack flows are drawn from Gaussians separated along a subset of
informative feature dimensions. Replay streams attach synthetic sources and
timestamps: benign rows spread across a pool of background sources, attack
rows concentrated on a few persistent attacker sources whose inter-arrival
timing matches a requested behavioral class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .flows import Dataset, Provenance, default_schema
from .orchestrator import TrafficEvent

ATTACK_CATEGORIES = ("DoS", "PortScan", "BruteForce", "WebAttack")

# (tau, sigma) presets matching the profiler's class boundaries
CLASS_TIMING = {
    "automated": (0.3, 0.1),
    "rapid": (1.5, 1.0),
    "deliberate": (15.0, 2.0),
    "standard": (5.0, 2.0),
}


def make_gaussian_flows(
    n: int,
    attack_ratio: float = 0.2,
    n_features: int = 77,
    n_informative: int = 10,
    separation: float = 4.0,
    seed: int = 0,
) -> Dataset:
    """Two-Gaussian labeled flow dataset; attacks shifted on informative dims."""
    rng = np.random.default_rng(seed)
    n_attack = int(round(n * attack_ratio))
    labels = np.zeros(n, dtype=np.int64)
    labels[rng.choice(n, size=n_attack, replace=False)] = 1
    features = rng.normal(0.0, 1.0, size=(n, n_features))
    features[labels == 1, :n_informative] += separation
    categories = tuple(
        ATTACK_CATEGORIES[int(rng.integers(0, len(ATTACK_CATEGORIES)))]
        if lab
        else "BENIGN"
        for lab in labels
    )
    names = default_schema()
    if n_features != len(names):
        names = tuple(f"feature_{i}" for i in range(n_features))
    return Dataset(
        features=features,
        labels=labels,
        categories=categories,
        feature_names=names,
        provenance=Provenance(source=f"<synthetic seed={seed}>"),
    )


@dataclass(frozen=True)
class AttackerSpec:
    source: str
    profile_class: str  # key into CLASS_TIMING


def make_replay_events(
    data: Dataset,
    seed: int = 0,
    benign_sources: int = 50,
    benign_rate: float = 200.0,
    attackers: tuple[AttackerSpec, ...] = (
        AttackerSpec("attacker-automated", "automated"),
        AttackerSpec("attacker-rapid", "rapid"),
        AttackerSpec("attacker-deliberate", "deliberate"),
    ),
) -> list[TrafficEvent]:
    """Timestamp-ordered event stream over a labeled dataset.

    Attack rows are dealt round-robin to the attacker sources; each source's
    arrival gaps follow its class timing. Benign rows arrive as background
    traffic at benign_rate events/second across a source pool.
    """
    rng = np.random.default_rng(seed)
    attack_idx = np.flatnonzero(data.labels == 1)
    benign_idx = np.flatnonzero(data.labels == 0)
    events: list[TrafficEvent] = []

    t = 0.0
    for i in benign_idx:
        t += rng.exponential(1.0 / benign_rate)
        events.append(
            TrafficEvent(
                timestamp=t,
                source=f"benign-{int(rng.integers(0, benign_sources))}",
                endpoint=f"/page/{int(rng.integers(0, 20))}",
                features=data.features[i],
                label=0,
                category=data.categories[i],
            )
        )
    horizon = t

    for k, spec in enumerate(attackers):
        rows = attack_idx[k :: len(attackers)]
        if len(rows) == 0:
            continue
        tau, sigma = CLASS_TIMING[spec.profile_class]
        gaps = np.clip(rng.normal(tau, sigma, size=len(rows) - 1), 1e-3, None)
        if len(gaps) > 1:
            gaps = gaps - gaps.mean() + tau
            measured = gaps.std()
            if measured > 0:
                gaps = np.clip(tau + (gaps - tau) * (sigma / measured), 1e-3, None)
        start = float(rng.uniform(0.0, max(horizon * 0.05, 1.0)))
        times = start + np.concatenate([[0.0], np.cumsum(gaps)])
        for j, i in enumerate(rows):
            events.append(
                TrafficEvent(
                    timestamp=float(times[j]),
                    source=spec.source,
                    endpoint=f"/probe/{j % 3}",
                    features=data.features[i],
                    label=1,
                    category=data.categories[i],
                )
            )

    events.sort(key=lambda e: e.timestamp)
    return events
