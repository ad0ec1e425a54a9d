"""Session coordination: the write path between clients and the bus.

All session mutations go through here under a per-session lock, so the state
machine never sees interleaved transitions. Analysis work itself happens in
the workers; the coordinator only records intent (correlation entries) and
publishes requests.
"""

from __future__ import annotations

import threading
import time
import uuid
from typing import Callable

from writecoach.bus import REPORTS_TOPIC, REQUEST_TOPIC, InProcessBus, encode_message
from writecoach.core import ladder
from writecoach.core.ladder import Session
from writecoach.gateway.config import ModelConfig
from writecoach.gateway.registry import BackendRegistry
from writecoach.persistence.store import (
    CorrelationEntry,
    Course,
    ReportFilter,
    Store,
    Task,
)


class LockRegistry:
    """One lock per session id, created on first use."""

    def __init__(self) -> None:
        self._guard = threading.Lock()
        self._locks: dict[str, threading.RLock] = {}

    def get(self, session_id: str) -> threading.RLock:
        with self._guard:
            lock = self._locks.get(session_id)
            if lock is None:
                lock = self._locks[session_id] = threading.RLock()
            return lock


def _default_id() -> str:
    return uuid.uuid4().hex


class SessionService:
    def __init__(
        self,
        store: Store,
        bus: InProcessBus,
        registry: BackendRegistry,
        locks: LockRegistry | None = None,
        clock: Callable[[], float] = time.time,
        id_factory: Callable[[], str] = _default_id,
    ):
        self.store = store
        self.bus = bus
        self.registry = registry
        self.locks = locks or LockRegistry()
        self.clock = clock
        self.id_factory = id_factory

    def _publish_request(self, session: Session, spec: ladder.AnalysisRequestSpec) -> str:
        record = session.sentences[spec.sentence_index]
        correlation_id = self.id_factory()
        attempt = len(record.revisions)
        self.store.record_correlation(
            CorrelationEntry(
                correlation_id=correlation_id,
                session_id=session.id,
                sentence_index=spec.sentence_index,
                attempt=attempt,
            )
        )
        body = {
            "correlation_id": correlation_id,
            "session_id": session.id,
            "sentence_index": spec.sentence_index,
            "attempt": attempt,
            "sentence": spec.text,
            "level": spec.level,
            "tracked_category": spec.tracked_category,
            "config": session.model_config.to_dict(),
        }
        self.bus.publish(
            REQUEST_TOPIC, encode_message("analysis_request", body), correlation_id
        )
        return correlation_id

    def start_document(
        self,
        owner: str,
        text: str,
        config: ModelConfig,
        task_ref: str | None = None,
    ) -> Session:
        """Open a session and queue the initial analysis of every sentence."""
        self.registry.resolve(config.backend_id)
        session = ladder.start_session(
            owner,
            text,
            config,
            task_ref=task_ref,
            clock=self.clock,
            id_factory=self.id_factory,
        )
        with self.locks.get(session.id):
            for record in session.sentences:
                spec = ladder.begin_analysis(session, record.unit.index, clock=self.clock)
                self._publish_request(session, spec)
            self.store.save_session(session)
        return session

    def get_session(self, session_id: str) -> Session:
        return self.store.load_session(session_id)

    def submit_revision(self, session_id: str, sentence_index: int, text: str) -> str:
        """Queue a revision's re-check; returns its correlation id."""
        with self.locks.get(session_id):
            session = self.store.load_session(session_id)
            spec = ladder.submit_revision(session, sentence_index, text, clock=self.clock)
            correlation_id = self._publish_request(session, spec)
            self.store.save_session(session)
        return correlation_id

    def request_report(self, user_id: str, filter_body: dict) -> str:
        """Queue a report export; validation happens in the export worker."""
        report_id = self.id_factory()
        body = {"report_id": report_id, "user_id": user_id, "filter": filter_body}
        self.bus.publish(REPORTS_TOPIC, encode_message("export_request", body), report_id)
        return report_id

    def create_course(self, owner: str, name: str) -> Course:
        course = Course(id=self.id_factory(), name=name, owner=owner, created_at=self.clock())
        self.store.save_course(course)
        return course

    def add_task(self, course_id: str, prompt_text: str, guidelines: str = "") -> Task:
        self.store.get_course(course_id)
        task = Task(
            id=self.id_factory(),
            course_id=course_id,
            prompt_text=prompt_text,
            guidelines=guidelines,
            created_at=self.clock(),
        )
        self.store.save_task(task)
        return task

    def start_task_session(
        self, owner: str, task_id: str, text: str, config: ModelConfig
    ) -> Session:
        """Start a session for the student's own text, linked to a course task."""
        task = self.store.get_task(task_id)
        return self.start_document(owner, text, config, task_ref=task.id)
