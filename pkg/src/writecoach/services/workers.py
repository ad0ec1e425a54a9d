"""The four bus consumers.

Each worker follows the same loop shape: poll a batch, handle each message,
commit per message. Handling is idempotent or deduplicated, so a crash
anywhere between poll and commit only causes redelivery, never divergence.
The ``fault`` hook exists for exactly that test: it is called at the two
crash-sensitive points ("after_poll", "before_commit") and may raise
``WorkerKilled`` to simulate dying there.

Group names: the model workers use one group per backend kind, mirroring a
deployment where each model family has its own consumer; every group sees
the whole request topic and skip-commits messages that belong to a different
kind, so nothing is stolen and nothing is lost.
"""

from __future__ import annotations

import logging
import time
from typing import Callable, Iterable

from writecoach.bus import (
    PUSH_TOPIC,
    REPORTS_TOPIC,
    REQUEST_TOPIC,
    RESPONSE_TOPIC,
    BusEnvelope,
    CodecError,
    InProcessBus,
    decode_message,
    encode_message,
)
from writecoach.core import ladder
from writecoach.core.ladder import InvalidTransition, TransitionKind
from writecoach.gateway.config import ModelConfig
from writecoach.gateway.errors import (
    BackendTimeout,
    BackendUnavailable,
    MalformedReply,
    UnknownBackend,
)
from writecoach.gateway.messages import AnalysisRequest
from writecoach.gateway.registry import BackendRegistry, TransportKind, analyze
from writecoach.gateway.verdict import Verdict
from writecoach.persistence.store import BadFilter, ReportFilter, Store, TelemetryRecord
from writecoach.services.coordinator import LockRegistry
from writecoach.services.push import PushEvent, PushHub, PushKind

log = logging.getLogger(__name__)

FaultHook = Callable[[str], None]


class WorkerKilled(Exception):
    """Raised by a fault hook to simulate a crash at a specific point."""


def _no_fault(point: str) -> None:
    return None


class _Worker:
    topic: str

    def __init__(self, bus: InProcessBus, group: str, fault: FaultHook = _no_fault):
        self.bus = bus
        self.group = group
        self.fault = fault
        # Claim the cursor now; see InProcessBus.subscribe for why.
        bus.subscribe(self.topic, group)

    def step(self, max_messages: int = 32, block_ms: int = 0) -> int:
        """Process one poll batch; returns how many messages were committed."""
        envelopes = self.bus.poll(self.topic, self.group, max_messages, block_ms)
        handled = 0
        for envelope in envelopes:
            self.fault("after_poll")
            self.handle(envelope)
            self.fault("before_commit")
            self.bus.commit(self.topic, self.group, envelope.offset)
            handled += 1
        return handled

    def handle(self, envelope: BusEnvelope) -> None:
        raise NotImplementedError


class ModelWorker(_Worker):
    """Runs analyses for the backend kinds it serves."""

    topic = REQUEST_TOPIC

    def __init__(
        self,
        bus: InProcessBus,
        registry: BackendRegistry,
        kinds: Iterable[TransportKind] | None = None,
        group: str | None = None,
        fault: FaultHook = _no_fault,
        analysis_clock: Callable[[], float] = time.perf_counter,
    ):
        self.kinds = frozenset(kinds) if kinds is not None else None
        if group is None:
            suffix = (
                "-".join(sorted(k.value for k in self.kinds)) if self.kinds else "all"
            )
            group = f"model-workers-{suffix}"
        super().__init__(bus, group, fault)
        self.registry = registry
        self.analysis_clock = analysis_clock

    def handle(self, envelope: BusEnvelope) -> None:
        try:
            kind, body = decode_message(envelope.payload)
        except CodecError:
            log.warning("dropping undecodable request at offset %d", envelope.offset)
            return
        if kind != "analysis_request":
            return
        try:
            handle = self.registry.resolve(body["config"]["backend_id"])
        except UnknownBackend:
            self._publish(body, outcome="unavailable")
            return
        if self.kinds is not None and handle.descriptor.kind not in self.kinds:
            # Another kind's worker group owns this one; just move the cursor.
            return
        request = AnalysisRequest(
            correlation_id=body["correlation_id"],
            sentence=body["sentence"],
            level=body["level"],
            config=ModelConfig.from_dict(body["config"]),
            tracked_category=body.get("tracked_category"),
        )
        try:
            response = analyze(handle, request, clock=self.analysis_clock)
        except BackendTimeout:
            self._publish(body, outcome="timeout")
        except BackendUnavailable:
            self._publish(body, outcome="unavailable")
        except MalformedReply:
            self._publish(body, outcome="malformed")
        else:
            self._publish(
                body,
                outcome="ok",
                verdict=response.verdict.to_dict(),
                duration_ms=response.latency.duration_ms,
                raw_reply=response.raw_reply,
            )

    def _publish(self, request_body: dict, outcome: str, **extra) -> None:
        body = {
            "correlation_id": request_body["correlation_id"],
            "session_id": request_body["session_id"],
            "sentence_index": request_body["sentence_index"],
            "attempt": request_body["attempt"],
            "backend_id": request_body["config"]["backend_id"],
            "model_name": request_body["config"]["model_name"],
            "requested_level": request_body["level"],
            "outcome": outcome,
            "verdict": None,
            "duration_ms": None,
            "raw_reply": None,
        }
        body.update(extra)
        self.bus.publish(
            RESPONSE_TOPIC,
            encode_message("analysis_response", body),
            request_body["correlation_id"],
        )


class ResponseWorker(_Worker):
    """Applies verdicts to sessions and emits the resulting push events."""

    topic = RESPONSE_TOPIC

    def __init__(
        self,
        bus: InProcessBus,
        store: Store,
        locks: LockRegistry,
        group: str = "response-workers",
        fault: FaultHook = _no_fault,
        clock: Callable[[], float] = time.time,
    ):
        super().__init__(bus, group, fault)
        self.store = store
        self.locks = locks
        self.clock = clock

    _EVENT_KINDS = {
        TransitionKind.HINT_DELIVERED: PushKind.HINT_DELIVERED,
        TransitionKind.COMPLETED: PushKind.SENTENCE_COMPLETED,
        TransitionKind.UNRESOLVED: PushKind.SENTENCE_UNRESOLVED,
    }

    def handle(self, envelope: BusEnvelope) -> None:
        try:
            kind, body = decode_message(envelope.payload)
        except CodecError:
            log.warning("dropping undecodable response at offset %d", envelope.offset)
            return
        if kind != "analysis_response":
            return
        correlation_id = body["correlation_id"]
        entry = self.store.get_correlation(correlation_id)
        if entry is None:
            log.warning("orphan response %s; no correlation entry", correlation_id)
            return
        with self.locks.get(entry.session_id):
            # Redelivered duplicates must change nothing.
            if self.store.is_processed(correlation_id):
                return
            session = self.store.load_session(entry.session_id)
            result = None
            if body["outcome"] == "ok":
                verdict = Verdict.from_dict(body["verdict"])
                try:
                    result = ladder.apply_verdict(
                        session, entry.sentence_index, verdict, clock=self.clock
                    )
                except InvalidTransition:
                    log.warning(
                        "verdict %s no longer applies to session %s sentence %d",
                        correlation_id,
                        entry.session_id,
                        entry.sentence_index,
                    )
                    return
            else:
                try:
                    ladder.revert_analysis(session, entry.sentence_index, clock=self.clock)
                except InvalidTransition:
                    log.warning(
                        "failure response %s arrived for a settled sentence", correlation_id
                    )
                    return
            telemetry = TelemetryRecord(
                correlation_id=correlation_id,
                backend_id=body["backend_id"],
                model_name=body["model_name"],
                requested_level=body["requested_level"],
                outcome=body["outcome"],
                duration_ms=body["duration_ms"] if body["outcome"] == "ok" else None,
                created_at=self.clock(),
            )
            self.store.record_analysis_outcome(session, telemetry, correlation_id)
            if result is not None:
                self._publish_event(session.owner, session.id, correlation_id, result)

    def _publish_event(
        self, owner: str, session_id: str, correlation_id: str, result: ladder.TransitionResult
    ) -> None:
        if result.kind is TransitionKind.HINT_DELIVERED:
            body = result.hint or ""
        elif result.kind is TransitionKind.UNRESOLVED:
            body = result.correction or ""
        else:
            body = ""
        event = PushEvent(
            user_id=owner,
            kind=self._EVENT_KINDS[result.kind],
            session_id=session_id,
            sentence_index=result.sentence_index,
            body=body,
            correlation_id=correlation_id,
        )
        self.bus.publish(PUSH_TOPIC, encode_message("push_event", event.to_dict()), correlation_id)


class ExportWorker(_Worker):
    """Renders report exports and announces them."""

    topic = REPORTS_TOPIC

    def __init__(
        self,
        bus: InProcessBus,
        store: Store,
        group: str = "export-workers",
        fault: FaultHook = _no_fault,
    ):
        super().__init__(bus, group, fault)
        self.store = store

    def handle(self, envelope: BusEnvelope) -> None:
        from writecoach.persistence.reports import write_csv_report

        try:
            kind, body = decode_message(envelope.payload)
        except CodecError:
            log.warning("dropping undecodable export request at offset %d", envelope.offset)
            return
        if kind != "export_request":
            return
        report_id = body["report_id"]
        event_body = ""
        error = None
        try:
            report_filter = ReportFilter.from_dict(body.get("filter"))
            _, locator = write_csv_report(self.store, report_filter, report_id)
            event_body = locator
        except BadFilter as exc:
            error = str(exc)
        event = PushEvent(
            user_id=body["user_id"],
            kind=PushKind.REPORT_READY,
            session_id="",
            body=event_body,
            correlation_id=report_id,
            error=error,
        )
        self.bus.publish(PUSH_TOPIC, encode_message("push_event", event.to_dict()), report_id)


class PushWorker(_Worker):
    """Moves push events from the bus into the hub."""

    topic = PUSH_TOPIC

    def __init__(
        self,
        bus: InProcessBus,
        hub: PushHub,
        group: str = "push-workers",
        fault: FaultHook = _no_fault,
    ):
        super().__init__(bus, group, fault)
        self.hub = hub

    def handle(self, envelope: BusEnvelope) -> None:
        try:
            kind, body = decode_message(envelope.payload)
        except CodecError:
            log.warning("dropping undecodable push event at offset %d", envelope.offset)
            return
        if kind != "push_event":
            return
        self.hub.dispatch(PushEvent.from_dict(body))
