"""Realtime push delivery to connected clients.

The hub keeps a bounded replay buffer per user (drop-oldest at 256 events)
for the window where nobody is connected, and fans events out to every live
subscription otherwise. A reconnecting client first receives whatever was
buffered while it was away, in order. Duplicate suppression is the client's
job, keyed on correlation_id, since at-least-once delivery upstream can
replay events.
"""

from __future__ import annotations

import queue
import threading
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Any

BUFFER_LIMIT = 256


class PushKind(str, Enum):
    HINT_DELIVERED = "hint_delivered"
    SENTENCE_COMPLETED = "sentence_completed"
    SENTENCE_UNRESOLVED = "sentence_unresolved"
    REPORT_READY = "report_ready"


@dataclass(frozen=True)
class PushEvent:
    user_id: str
    kind: PushKind
    session_id: str
    sentence_index: int | None = None
    body: str = ""
    correlation_id: str = ""
    error: str | None = None

    def __post_init__(self) -> None:
        if self.kind is PushKind.HINT_DELIVERED and not self.body:
            raise ValueError("hint_delivered events must carry the hint text")

    def to_dict(self) -> dict[str, Any]:
        return {
            "user_id": self.user_id,
            "kind": self.kind.value,
            "session_id": self.session_id,
            "sentence_index": self.sentence_index,
            "body": self.body,
            "correlation_id": self.correlation_id,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PushEvent":
        return cls(
            user_id=data["user_id"],
            kind=PushKind(data["kind"]),
            session_id=data["session_id"],
            sentence_index=data.get("sentence_index"),
            body=data.get("body", ""),
            correlation_id=data.get("correlation_id", ""),
            error=data.get("error"),
        )


class Subscription:
    """One live client connection's event stream."""

    def __init__(self, hub: "PushHub", user_id: str):
        self._hub = hub
        self.user_id = user_id
        self._queue: queue.Queue[PushEvent] = queue.Queue()
        self.closed = False

    def deliver(self, event: PushEvent) -> None:
        self._queue.put(event)

    def get(self, timeout: float | None = None) -> PushEvent | None:
        """Next event, or None when the timeout passes first."""
        try:
            return self._queue.get(timeout=timeout)
        except queue.Empty:
            return None

    def close(self) -> None:
        self._hub._disconnect(self)


class PushHub:
    def __init__(self, buffer_limit: int = BUFFER_LIMIT):
        self._lock = threading.Lock()
        self._buffer_limit = buffer_limit
        self._subscriptions: dict[str, list[Subscription]] = {}
        self._buffers: dict[str, deque[PushEvent]] = {}

    def connect(self, user_id: str) -> Subscription:
        """Open a subscription, replaying anything buffered while offline."""
        subscription = Subscription(self, user_id)
        with self._lock:
            buffered = self._buffers.pop(user_id, None)
            self._subscriptions.setdefault(user_id, []).append(subscription)
        if buffered:
            for event in buffered:
                subscription.deliver(event)
        return subscription

    def _disconnect(self, subscription: Subscription) -> None:
        with self._lock:
            subscription.closed = True
            subscribers = self._subscriptions.get(subscription.user_id)
            if subscribers and subscription in subscribers:
                subscribers.remove(subscription)
                if not subscribers:
                    del self._subscriptions[subscription.user_id]

    def dispatch(self, event: PushEvent) -> bool:
        """Deliver to the user's live connections, else buffer. True if delivered."""
        with self._lock:
            subscribers = list(self._subscriptions.get(event.user_id, ()))
            if not subscribers:
                buffer = self._buffers.setdefault(
                    event.user_id, deque(maxlen=self._buffer_limit)
                )
                buffer.append(event)
                return False
        for subscription in subscribers:
            subscription.deliver(event)
        return True

    def buffered_count(self, user_id: str) -> int:
        with self._lock:
            buffer = self._buffers.get(user_id)
            return len(buffer) if buffer else 0

    def connection_count(self, user_id: str) -> int:
        with self._lock:
            return len(self._subscriptions.get(user_id, ()))
