"""Per-source escalation state machine and deception response planning.

Levels run L1 (passive monitoring) through L5 (full deception). Upward
transitions follow level' = min(5, level + increment); the increment is 2
for confidence >= 0.9, 1 for confidence strictly between the detection
threshold and 0.9, 0 otherwise, plus 1 when the source profiles as
automated with at least 3 attacks in the last 60 s. Recovery: one level
per full 300 s quiet window, floored at L1.

Decoys are inert banner/content template identifiers keyed by profile
class; no real vulnerable surface is ever exposed.
"""

from __future__ import annotations

import json
import threading
import zlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .profiler import Profile, ProfileClass, classify_profile

MIN_LEVEL = 1
MAX_LEVEL = 5
HISTORY_SIZE = 64
QUIET_WINDOW = 300.0
BURST_WINDOW = 60.0
BURST_ATTACKS = 3
HIGH_CONFIDENCE = 0.9
JITTER_MAX_MS = 500.0
PROGRESSIVE_BASE_MS = 250.0
MAX_DELAY_MS = 8000.0


@dataclass(frozen=True)
class ThreatEvent:
    timestamp: float
    confidence: float
    was_attack: bool


@dataclass
class EscalationState:
    source: str
    level: int = MIN_LEVEL
    history: list[ThreatEvent] = field(default_factory=list)
    last_attack_time: float | None = None
    consecutive_attacks: int = 0

    def record(self, event: ThreatEvent) -> None:
        self.history.append(event)
        del self.history[:-HISTORY_SIZE]
        if event.was_attack:
            self.last_attack_time = event.timestamp
            self.consecutive_attacks += 1
        else:
            self.consecutive_attacks = 0


@dataclass(frozen=True)
class ResponsePlan:
    level: int
    actions: tuple[str, ...]
    delay_ms: float
    decoy: str | None = None


def delta(
    profile: Profile,
    history: list[ThreatEvent],
    confidence: float,
    theta: float,
) -> int:
    """Escalation increment in {0, 1, 2, 3}."""
    if not 0.0 <= confidence <= 1.0:
        raise ValueError(f"confidence={confidence} outside [0, 1]")
    if confidence >= HIGH_CONFIDENCE:
        base = 2
    elif confidence > theta:
        base = 1
    else:
        base = 0
    modifier = 0
    if base > 0 and classify_profile(profile) is ProfileClass.AUTOMATED and history:
        now = history[-1].timestamp
        recent = sum(
            1 for e in history if e.was_attack and now - e.timestamp <= BURST_WINDOW
        )
        if recent >= BURST_ATTACKS:
            modifier = 1
    return base + modifier


def escalate(state: EscalationState, increment: int) -> EscalationState:
    """level' = min(5, level + increment); mutates and returns the state."""
    if increment < 0:
        raise ValueError(f"increment must be >= 0, got {increment}")
    state.level = min(MAX_LEVEL, state.level + increment)
    return state


def deescalate(state: EscalationState, now: float, quiet_window: float = QUIET_WINDOW) -> EscalationState:
    """Drop one level per full quiet window since the last attack, floored at L1."""
    if state.last_attack_time is None or state.level == MIN_LEVEL:
        return state
    windows = int((now - state.last_attack_time) // quiet_window)
    if windows > 0:
        state.level = max(MIN_LEVEL, state.level - windows)
        # Consume the applied windows so repeated calls don't re-subtract.
        state.last_attack_time += windows * quiet_window
    return state


def progressive_delay_ms(consecutive_attacks: int) -> float:
    """L4 delay: doubles per consecutive attack, floored at the L2/L3 jitter
    ceiling (keeps delays monotone across levels) and saturated at 8000 ms."""
    raw = PROGRESSIVE_BASE_MS * 2 ** min(consecutive_attacks, 5)
    return min(MAX_DELAY_MS, max(JITTER_MAX_MS, raw))


class DecoyCatalog:
    """Profile-class -> decoy template identifiers, loaded from JSON."""

    def __init__(self, by_class: dict[str, list[str]]) -> None:
        if not by_class:
            raise ValueError("decoy catalog is empty")
        self._by_class = {k: list(v) for k, v in by_class.items()}

    @classmethod
    def default(cls) -> "DecoyCatalog":
        text = resources.files("netsentry.data").joinpath("decoy_catalog.json").read_text()
        return cls(json.loads(text))

    @classmethod
    def from_file(cls, path: str | Path) -> "DecoyCatalog":
        return cls(json.loads(Path(path).read_text()))

    def pick(self, profile_class: ProfileClass, rng: np.random.Generator) -> str:
        options = self._by_class.get(
            profile_class.value, self._by_class.get("standard", [])
        )
        if not options:
            options = next(iter(self._by_class.values()))
        return options[int(rng.integers(0, len(options)))]


def plan_response(
    level: int,
    profile: Profile,
    seed: int,
    catalog: DecoyCatalog | None = None,
    consecutive_attacks: int = 0,
) -> ResponsePlan:
    """Deterministic (given seed) response plan for an escalation level."""
    if not MIN_LEVEL <= level <= MAX_LEVEL:
        raise ValueError(f"level must be in [1, 5], got {level}")
    if catalog is None:
        catalog = DecoyCatalog.default()
    rng = np.random.default_rng(
        np.random.SeedSequence([seed & 0xFFFFFFFF, zlib.crc32(profile.source.encode())])
    )
    jitter = float(rng.uniform(0.0, JITTER_MAX_MS))
    pclass = classify_profile(profile)

    if level == 1:
        return ResponsePlan(1, ("log",), 0.0)
    if level == 2:
        return ResponsePlan(2, ("log", "jitter"), jitter)
    if level == 3:
        return ResponsePlan(3, ("log", "jitter", "decoy"), jitter,
                            decoy=catalog.pick(pclass, rng))
    if level == 4:
        return ResponsePlan(
            4,
            ("log", "progressive_delay", "decoy"),
            progressive_delay_ms(consecutive_attacks),
            decoy=catalog.pick(pclass, rng),
        )
    return ResponsePlan(
        5,
        ("log", "tarpit", "isolate", "endless_decoy"),
        MAX_DELAY_MS,
        decoy="content:endless-stream",
    )


class EscalationManager:
    """Per-source escalation states with the same serialization contract as profiles."""

    def __init__(self) -> None:
        self._states: dict[str, EscalationState] = {}
        self._lock = threading.Lock()

    def state(self, source: str) -> EscalationState:
        with self._lock:
            if source not in self._states:
                self._states[source] = EscalationState(source=source)
            return self._states[source]

    def sources(self) -> list[str]:
        return list(self._states)

    def levels(self) -> dict[str, int]:
        return {s: st.level for s, st in self._states.items()}
