"""Per-source behavioral profiles and timing-based classification.

A profile tracks mean inter-request time tau, its population std sigma_tau,
request count n, endpoint diversity rho, and the set of detected pattern
tags. Timing moments are computed over a bounded buffer of the most recent
arrivals (256 by default), a documented streaming approximation.

Classification cases are evaluated top to bottom with the first match
winning: automated (sigma < 0.5 and tau < 1), rapid (tau < 2 and
sigma >= 0.5), deliberate (tau > 10), otherwise standard.
"""

from __future__ import annotations

import json
import threading
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DataError

BUFFER_SIZE = 256
MIN_OBSERVATIONS = 3
DEFAULT_TTL = 3600.0


class ProfileClass(str, Enum):
    AUTOMATED = "automated"
    RAPID = "rapid"
    DELIBERATE = "deliberate"
    STANDARD = "standard"


@dataclass
class Profile:
    source: str
    tau: float = 0.0
    sigma_tau: float = 0.0
    n: int = 0
    rho: float = 1.0
    patterns: set[str] = field(default_factory=set)
    timestamps: deque = field(default_factory=lambda: deque(maxlen=BUFFER_SIZE))
    endpoints: set[str] = field(default_factory=set)
    last_seen: float = 0.0

    @property
    def provisional(self) -> bool:
        return self.n < MIN_OBSERVATIONS


def classify_timing(tau: float, sigma_tau: float) -> ProfileClass:
    """Ordered timing rules; pure in (tau, sigma_tau)."""
    if sigma_tau < 0.5 and tau < 1.0:
        return ProfileClass.AUTOMATED
    if tau < 2.0 and sigma_tau >= 0.5:
        return ProfileClass.RAPID
    if tau > 10.0:
        return ProfileClass.DELIBERATE
    return ProfileClass.STANDARD


def classify_profile(p: Profile) -> ProfileClass:
    """Profile class; provisional profiles (n < 3) report standard."""
    if p.provisional:
        return ProfileClass.STANDARD
    return classify_timing(p.tau, p.sigma_tau)


class ProfileStore:
    """Thread-safe map of source -> Profile with per-source update serialization."""

    def __init__(self, buffer_size: int = BUFFER_SIZE) -> None:
        self._buffer_size = buffer_size
        self._profiles: dict[str, Profile] = {}
        self._lock = threading.Lock()
        self._source_locks: dict[str, threading.Lock] = {}

    def __len__(self) -> int:
        return len(self._profiles)

    def get(self, source: str) -> Profile | None:
        return self._profiles.get(source)

    def sources(self) -> list[str]:
        return list(self._profiles)

    def _locked(self, source: str) -> threading.Lock:
        with self._lock:
            return self._source_locks.setdefault(source, threading.Lock())

    def observe(
        self,
        source: str,
        timestamp: float,
        endpoint: str,
        patterns: set[str] | frozenset[str] = frozenset(),
    ) -> Profile:
        """Record one arrival; recompute timing moments over the retained buffer.

        Timestamps must be monotone per source; a regression raises and
        leaves the profile unchanged.
        """
        with self._locked(source):
            profile = self._profiles.get(source)
            if profile is None:
                profile = Profile(
                    source=source,
                    timestamps=deque(maxlen=self._buffer_size),
                )
                self._profiles[source] = profile
            elif timestamp < profile.last_seen:
                raise DataError(
                    f"time regression for {source}: "
                    f"{timestamp} < {profile.last_seen}"
                )
            profile.n += 1
            profile.last_seen = timestamp
            profile.timestamps.append(timestamp)
            profile.endpoints.add(endpoint)
            profile.rho = len(profile.endpoints) / profile.n
            profile.patterns |= set(patterns)
            if len(profile.timestamps) >= 2:
                gaps = np.diff(np.asarray(profile.timestamps))
                profile.tau = float(gaps.mean())
                profile.sigma_tau = float(gaps.std())
            return profile

    def evict_stale(self, now: float, ttl: float = DEFAULT_TTL) -> int:
        """Drop profiles idle strictly longer than ttl; returns eviction count."""
        with self._lock:
            stale = [s for s, p in self._profiles.items() if now - p.last_seen > ttl]
            for s in stale:
                del self._profiles[s]
                self._source_locks.pop(s, None)
            return len(stale)

    def dump(self) -> list[dict]:
        """JSON-ready profile report, sorted by source."""
        out = []
        for source in sorted(self._profiles):
            p = self._profiles[source]
            out.append(
                {
                    "source": p.source,
                    "tau": p.tau,
                    "sigma_tau": p.sigma_tau,
                    "n": p.n,
                    "rho": p.rho,
                    "lambda": sorted(p.patterns),
                    "class": classify_profile(p).value,
                    "provisional": p.provisional,
                }
            )
        return out

    def dump_json(self) -> str:
        return json.dumps(self.dump(), indent=2, sort_keys=True)
