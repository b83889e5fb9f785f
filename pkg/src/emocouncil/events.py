"""Append-only per-session event log with live fan-out.

Every pipeline step lands here exactly once, with a strictly increasing
``seq``. Subscribers get each event pushed into a queue as it is appended
(that feed backs the server-sent event stream); the JSONL serialization is
deterministic, so two downloads of an unchanged log are byte-identical.
"""

from __future__ import annotations

import json
import queue
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path


class EventKind(str, Enum):
    SESSION_START = "session_start"
    ROUND_STARTED = "round_started"
    GENERATION = "generation"
    VOTE = "vote"
    TALLY = "tally"
    RETRIEVAL = "retrieval"
    CONTEXT_UPDATE = "context_update"
    IMAGE_DESCRIPTION = "image_description"
    SYNTHESIS = "synthesis"
    WARNING = "warning"
    ERROR = "error"


@dataclass(frozen=True)
class LogEvent:
    seq: int
    timestamp: str
    kind: EventKind
    emotion: str | None
    payload: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "seq": self.seq,
                "timestamp": self.timestamp,
                "kind": self.kind.value,
                "emotion": self.emotion,
                "payload": self.payload,
            },
            sort_keys=True,
            separators=(",", ":"),
            ensure_ascii=False,
        )

    @staticmethod
    def from_json(line: str) -> "LogEvent":
        data = json.loads(line)
        return LogEvent(
            seq=data["seq"],
            timestamp=data["timestamp"],
            kind=EventKind(data["kind"]),
            emotion=data.get("emotion"),
            payload=data.get("payload", {}),
        )


class Subscription:
    """Live event feed; iterate with ``get(timeout)`` until closed."""

    def __init__(self, log: "EventLog"):
        self._log = log
        self._queue: "queue.Queue[LogEvent]" = queue.Queue()

    def push(self, event: LogEvent) -> None:
        self._queue.put(event)

    def get(self, timeout: float | None = None) -> LogEvent | None:
        try:
            return self._queue.get(timeout=timeout)
        except queue.Empty:
            return None

    def close(self) -> None:
        self._log.unsubscribe(self)

    def __enter__(self) -> "Subscription":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class EventLog:
    """Thread-safe append-only log, optionally mirrored to a JSONL file."""

    def __init__(self, sink_path: str | Path | None = None):
        self._events: list[LogEvent] = []
        self._lock = threading.Lock()
        self._subscribers: list[Subscription] = []
        self._sink_path = Path(sink_path) if sink_path else None
        if self._sink_path:
            self._sink_path.parent.mkdir(parents=True, exist_ok=True)

    def append(
        self,
        kind: EventKind,
        emotion: str | None = None,
        payload: dict | None = None,
    ) -> LogEvent:
        with self._lock:
            event = LogEvent(
                seq=len(self._events) + 1,
                timestamp=datetime.now(timezone.utc).isoformat(),
                kind=kind,
                emotion=emotion,
                payload=payload or {},
            )
            self._events.append(event)
            if self._sink_path:
                with open(self._sink_path, "a", encoding="utf-8") as fh:
                    fh.write(event.to_json() + "\n")
            subscribers = list(self._subscribers)
        for sub in subscribers:
            sub.push(event)
        return event

    def events(self, after_seq: int = 0) -> tuple[LogEvent, ...]:
        with self._lock:
            return tuple(e for e in self._events if e.seq > after_seq)

    def __len__(self) -> int:
        with self._lock:
            return len(self._events)

    def subscribe(self) -> Subscription:
        sub = Subscription(self)
        with self._lock:
            self._subscribers.append(sub)
        return sub

    def unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)

    def to_jsonl(self) -> bytes:
        return "".join(e.to_json() + "\n" for e in self.events()).encode("utf-8")
