"""In-process publish-subscribe bus for inter-component signals.

Routing is a dict lookup on the signal type, so publish cost is independent
of how many types are registered. Delivery is decoupled from publishing via
one bounded queue per subscriber (default 4096 entries); a full queue blocks
the publisher (back-pressure) rather than dropping signals. Each
subscriber's callbacks run on a dedicated worker thread, so a subscriber
never sees concurrent invocations, and signals of one type arrive in
publish order.
"""

from __future__ import annotations

import json
import queue
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, IO, Mapping

DEFAULT_QUEUE_SIZE = 4096

DEFAULT_TYPES = ("detection", "profile_update", "escalation", "response")


class BusError(Exception):
    """Unknown signal type, duplicate registration, or invalid signal."""


@dataclass(frozen=True)
class Signal:
    t: float
    src: str
    type: str
    sev: int
    data: Mapping[str, Any] = field(default_factory=dict)
    conf: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.conf <= 1.0:
            raise BusError(f"conf={self.conf} outside [0, 1]")
        if not 0 <= self.sev <= 10:
            raise BusError(f"sev={self.sev} outside [0, 10]")

    def to_json(self) -> str:
        return json.dumps(
            {"t": self.t, "src": self.src, "type": self.type,
             "sev": self.sev, "data": dict(self.data), "conf": self.conf},
            sort_keys=True,
        )


class _Subscriber:
    def __init__(self, subscriber_id: str, queue_size: int) -> None:
        self.id = subscriber_id
        self.queue: queue.Queue = queue.Queue(maxsize=queue_size)
        self.callbacks: dict[str, Callable[[Signal], None]] = {}
        self.thread = threading.Thread(
            target=self._run, name=f"bus-{subscriber_id}", daemon=True
        )
        self.thread.start()

    def _run(self) -> None:
        while True:
            item = self.queue.get()
            try:
                if item is None:
                    return
                self.callbacks[item.type](item)
            finally:
                self.queue.task_done()

    def stop(self) -> None:
        self.queue.put(None)
        self.thread.join()


class SignalBus:
    """Typed pub-sub bus; the type registry is fixed at construction."""

    def __init__(
        self,
        types: tuple[str, ...] = DEFAULT_TYPES,
        queue_size: int = DEFAULT_QUEUE_SIZE,
        tap: IO[str] | None = None,
    ) -> None:
        self._routes: dict[str, list[_Subscriber]] = {t: [] for t in types}
        self._subscribers: dict[str, _Subscriber] = {}
        self._queue_size = queue_size
        self._lock = threading.Lock()
        self._tap = tap
        self._closed = False

    @property
    def types(self) -> tuple[str, ...]:
        return tuple(self._routes)

    def subscribe(
        self,
        signal_type: str,
        subscriber_id: str,
        callback: Callable[[Signal], None],
    ) -> tuple[str, str]:
        """Register callback for one type; returns the (subscriber, type) id."""
        with self._lock:
            if signal_type not in self._routes:
                raise BusError(f"unknown signal type: {signal_type!r}")
            sub = self._subscribers.get(subscriber_id)
            if sub is None:
                sub = _Subscriber(subscriber_id, self._queue_size)
                self._subscribers[subscriber_id] = sub
            if signal_type in sub.callbacks:
                raise BusError(
                    f"{subscriber_id!r} already subscribed to {signal_type!r}"
                )
            sub.callbacks[signal_type] = callback
            self._routes[signal_type].append(sub)
            return (subscriber_id, signal_type)

    def publish(self, signal: Signal) -> int:
        """Deliver to every subscriber of signal.type; returns the fan-out count."""
        try:
            targets = self._routes[signal.type]
        except KeyError:
            raise BusError(f"unknown signal type: {signal.type!r}") from None
        if self._tap is not None:
            with self._lock:
                self._tap.write(signal.to_json() + "\n")
        for sub in targets:
            sub.queue.put(signal)  # blocks when full: back-pressure
        return len(targets)

    def flush(self) -> None:
        """Block until every queued signal has been handled."""
        for sub in self._subscribers.values():
            sub.queue.join()

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        for sub in self._subscribers.values():
            sub.stop()
        if self._tap is not None:
            self._tap.flush()

    def __enter__(self) -> "SignalBus":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()
