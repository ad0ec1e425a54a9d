"""Append-only topic logs with consumer-group cursors.

Semantics are the small subset of a partitioned broker the workers rely on:

* per-topic offsets are dense and monotone, starting at 0;
* each consumer group owns one committed cursor per topic;
* ``poll`` returns messages after the group's cursor, so anything polled but
  not committed is redelivered (at-least-once);
* commits below the cursor are ignored idempotently;
* retention may drop messages every group has committed past.

Everything is guarded by one lock per bus; polls can block on a condition
until a publish lands or the timeout runs out.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

REQUEST_TOPIC = "nlp_request_text"
RESPONSE_TOPIC = "nlp_response_text"
PUSH_TOPIC = "cent_push_message"
REPORTS_TOPIC = "reports_export_topic"

CORE_TOPICS = (REQUEST_TOPIC, RESPONSE_TOPIC, PUSH_TOPIC, REPORTS_TOPIC)


class UnknownTopic(KeyError):
    pass


@dataclass(frozen=True)
class BusEnvelope:
    topic: str
    offset: int
    payload: str
    correlation_id: str
    published_at: float


@dataclass
class _TopicLog:
    entries: list[BusEnvelope] = field(default_factory=list)
    base_offset: int = 0
    next_offset: int = 0
    # Committed offset per consumer group; -1 means nothing committed yet.
    cursors: dict[str, int] = field(default_factory=dict)


class InProcessBus:
    def __init__(self, topics: tuple[str, ...] = CORE_TOPICS, clock=time.time):
        self._clock = clock
        self._lock = threading.Lock()
        self._published = threading.Condition(self._lock)
        self._logs: dict[str, _TopicLog] = {name: _TopicLog() for name in topics}

    def create_topic(self, name: str) -> None:
        with self._lock:
            self._logs.setdefault(name, _TopicLog())

    def subscribe(self, topic: str, group: str) -> None:
        """Register a group's cursor so retention keeps its unread messages.

        Polling registers implicitly; consumers constructed before the first
        poll call this up front, otherwise another group's commit could
        truncate entries this group has not seen yet.
        """
        with self._lock:
            self._log(topic).cursors.setdefault(group, -1)

    def topics(self) -> list[str]:
        with self._lock:
            return list(self._logs)

    def _log(self, topic: str) -> _TopicLog:
        try:
            return self._logs[topic]
        except KeyError:
            raise UnknownTopic(topic) from None

    def publish(self, topic: str, payload: str, correlation_id: str = "") -> int:
        """Append a message; returns its offset."""
        with self._published:
            log = self._log(topic)
            envelope = BusEnvelope(
                topic=topic,
                offset=log.next_offset,
                payload=payload,
                correlation_id=correlation_id,
                published_at=self._clock(),
            )
            log.entries.append(envelope)
            log.next_offset += 1
            self._published.notify_all()
            return envelope.offset

    def poll(
        self,
        topic: str,
        group: str,
        max_messages: int = 32,
        block_ms: int = 0,
    ) -> list[BusEnvelope]:
        """Fetch messages after the group's committed cursor.

        Blocks up to ``block_ms`` for a publish when nothing is ready.
        Polling does not advance the cursor; only ``commit`` does.
        """
        if max_messages <= 0:
            return []
        deadline = time.monotonic() + block_ms / 1000.0
        with self._published:
            log = self._log(topic)
            log.cursors.setdefault(group, -1)
            while True:
                start = max(log.cursors[group] + 1, log.base_offset)
                if start < log.next_offset:
                    first = start - log.base_offset
                    return log.entries[first : first + max_messages]
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return []
                self._published.wait(remaining)

    def commit(self, topic: str, group: str, offset: int) -> None:
        """Advance the group's cursor to ``offset``. Stale commits are no-ops."""
        with self._lock:
            log = self._log(topic)
            if offset >= log.next_offset:
                raise ValueError(
                    f"cannot commit offset {offset}; log ends at {log.next_offset - 1}"
                )
            current = log.cursors.get(group, -1)
            if offset <= current:
                return
            log.cursors[group] = offset
            self._truncate(log)

    def committed(self, topic: str, group: str) -> int:
        with self._lock:
            return self._log(topic).cursors.get(group, -1)

    def end_offset(self, topic: str) -> int:
        with self._lock:
            return self._log(topic).next_offset

    def lag(self, topic: str, group: str) -> int:
        """Messages published but not yet committed by the group."""
        with self._lock:
            log = self._log(topic)
            return log.next_offset - 1 - log.cursors.get(group, -1)

    def _truncate(self, log: _TopicLog) -> None:
        # Retention: drop entries every known group has committed past.
        if not log.cursors:
            return
        floor = min(log.cursors.values()) + 1
        if floor <= log.base_offset:
            return
        drop = floor - log.base_offset
        del log.entries[:drop]
        log.base_offset = floor
