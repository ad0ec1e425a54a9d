"""Session, telemetry, and course storage.

Two interchangeable engines sit behind one contract: an in-memory store for
tests and single-process runs, and a file-backed store whose contents survive
a restart. Both serialize sessions through the same dict round-trip, so a
loaded session compares equal to the saved one.

``record_analysis_outcome`` exists because the response worker must persist
three facts as one step (the mutated session, the telemetry row, and the
processed marker for its correlation id); splitting them would open replay
windows where a duplicate response is half-applied.
"""

from __future__ import annotations

import json
import os
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

from writecoach.core.ladder import Session

_OUTCOMES = ("ok", "timeout", "unavailable", "malformed")


class NotFound(KeyError):
    pass


class BadFilter(ValueError):
    pass


@dataclass(frozen=True)
class TelemetryRecord:
    """One analysis request's fate, joined to sessions via correlation_id."""

    correlation_id: str
    backend_id: str
    model_name: str
    requested_level: int
    outcome: str
    # Wall-clock duration of the backend call; present exactly when outcome is ok.
    duration_ms: float | None
    created_at: float

    def __post_init__(self) -> None:
        if self.outcome not in _OUTCOMES:
            raise ValueError(f"outcome {self.outcome!r} not one of {_OUTCOMES}")
        if (self.outcome == "ok") != (self.duration_ms is not None):
            raise ValueError("duration_ms must be present exactly when outcome is ok")

    def to_dict(self) -> dict[str, Any]:
        return {
            "correlation_id": self.correlation_id,
            "backend_id": self.backend_id,
            "model_name": self.model_name,
            "requested_level": self.requested_level,
            "outcome": self.outcome,
            "duration_ms": self.duration_ms,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TelemetryRecord":
        return cls(
            correlation_id=data["correlation_id"],
            backend_id=data["backend_id"],
            model_name=data["model_name"],
            requested_level=int(data["requested_level"]),
            outcome=data["outcome"],
            duration_ms=data["duration_ms"],
            created_at=data["created_at"],
        )


@dataclass(frozen=True)
class CorrelationEntry:
    """Maps an analysis correlation id onto the attempt it belongs to."""

    correlation_id: str
    session_id: str
    sentence_index: int
    attempt: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "correlation_id": self.correlation_id,
            "session_id": self.session_id,
            "sentence_index": self.sentence_index,
            "attempt": self.attempt,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CorrelationEntry":
        return cls(
            correlation_id=data["correlation_id"],
            session_id=data["session_id"],
            sentence_index=int(data["sentence_index"]),
            attempt=int(data["attempt"]),
        )


@dataclass(frozen=True)
class Course:
    id: str
    name: str
    owner: str
    created_at: float

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.id, "name": self.name, "owner": self.owner, "created_at": self.created_at}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Course":
        return cls(id=data["id"], name=data["name"], owner=data["owner"], created_at=data["created_at"])


@dataclass(frozen=True)
class Task:
    id: str
    course_id: str
    prompt_text: str
    guidelines: str
    created_at: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "course_id": self.course_id,
            "prompt_text": self.prompt_text,
            "guidelines": self.guidelines,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Task":
        return cls(
            id=data["id"],
            course_id=data["course_id"],
            prompt_text=data["prompt_text"],
            guidelines=data["guidelines"],
            created_at=data["created_at"],
        )


@dataclass(frozen=True)
class ReportFilter:
    """Selects sessions for a report. At least one selector must be present."""

    session_ids: tuple[str, ...] | None = None
    user_ids: tuple[str, ...] | None = None
    backend_ids: tuple[str, ...] | None = None
    time_range: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if not any((self.session_ids, self.user_ids, self.backend_ids, self.time_range)):
            raise BadFilter("filter selects nothing; give at least one selector")
        if self.time_range is not None:
            start, end = self.time_range
            if end < start:
                raise BadFilter(f"time_range end {end} precedes start {start}")

    def matches(self, session: Session) -> bool:
        if self.session_ids is not None and session.id not in self.session_ids:
            return False
        if self.user_ids is not None and session.owner not in self.user_ids:
            return False
        if self.backend_ids is not None:
            if session.model_config.backend_id not in self.backend_ids:
                return False
        if self.time_range is not None:
            start, end = self.time_range
            if not start <= session.created_at <= end:
                return False
        return True

    def to_dict(self) -> dict[str, Any]:
        return {
            "session_ids": list(self.session_ids) if self.session_ids else None,
            "user_ids": list(self.user_ids) if self.user_ids else None,
            "backend_ids": list(self.backend_ids) if self.backend_ids else None,
            "time_range": list(self.time_range) if self.time_range else None,
        }

    @classmethod
    def from_dict(cls, data: Any) -> "ReportFilter":
        if not isinstance(data, dict):
            raise BadFilter("filter must be an object")
        def str_tuple(name: str) -> tuple[str, ...] | None:
            value = data.get(name)
            if value is None:
                return None
            if not isinstance(value, (list, tuple)) or not all(
                isinstance(item, str) for item in value
            ):
                raise BadFilter(f"{name} must be a list of strings")
            return tuple(value)

        time_range = data.get("time_range")
        if time_range is not None:
            if (
                not isinstance(time_range, (list, tuple))
                or len(time_range) != 2
                or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in time_range)
            ):
                raise BadFilter("time_range must be [start, end] numbers")
            time_range = (float(time_range[0]), float(time_range[1]))
        unknown = set(data) - {"session_ids", "user_ids", "backend_ids", "time_range"}
        if unknown:
            raise BadFilter(f"unknown filter fields: {sorted(unknown)}")
        return cls(
            session_ids=str_tuple("session_ids"),
            user_ids=str_tuple("user_ids"),
            backend_ids=str_tuple("backend_ids"),
            time_range=time_range,
        )


class Store(ABC):
    """What the service layer needs from storage."""

    @abstractmethod
    def save_session(self, session: Session) -> int:
        """Persist a session; returns its new version (1 on first save)."""

    @abstractmethod
    def load_session(self, session_id: str) -> Session: ...

    @abstractmethod
    def session_version(self, session_id: str) -> int: ...

    @abstractmethod
    def list_sessions(self, owner: str | None = None) -> list[Session]: ...

    @abstractmethod
    def record_correlation(self, entry: CorrelationEntry) -> None: ...

    @abstractmethod
    def get_correlation(self, correlation_id: str) -> CorrelationEntry | None: ...

    @abstractmethod
    def correlations_for_session(self, session_id: str) -> list[CorrelationEntry]: ...

    @abstractmethod
    def is_processed(self, correlation_id: str) -> bool: ...

    @abstractmethod
    def record_analysis_outcome(
        self, session: Session, telemetry: TelemetryRecord, correlation_id: str
    ) -> int:
        """Atomically save the session, append telemetry, mark the id processed."""

    @abstractmethod
    def append_telemetry(self, record: TelemetryRecord) -> None: ...

    @abstractmethod
    def list_telemetry(self) -> list[TelemetryRecord]: ...

    @abstractmethod
    def telemetry_by_correlation(self, correlation_id: str) -> TelemetryRecord | None: ...

    @abstractmethod
    def save_report(self, report_id: str, content: bytes) -> str:
        """Store a rendered report; returns a locator usable with load_report."""

    @abstractmethod
    def load_report(self, report_id: str) -> bytes: ...

    @abstractmethod
    def save_course(self, course: Course) -> None: ...

    @abstractmethod
    def get_course(self, course_id: str) -> Course: ...

    @abstractmethod
    def list_courses(self) -> list[Course]: ...

    @abstractmethod
    def save_task(self, task: Task) -> None: ...

    @abstractmethod
    def get_task(self, task_id: str) -> Task: ...

    @abstractmethod
    def list_tasks(self, course_id: str | None = None) -> list[Task]: ...


class MemoryStore(Store):
    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._sessions: dict[str, dict[str, Any]] = {}
        self._versions: dict[str, int] = {}
        self._correlations: dict[str, CorrelationEntry] = {}
        self._processed: set[str] = set()
        self._telemetry: list[TelemetryRecord] = []
        self._reports: dict[str, bytes] = {}
        self._courses: dict[str, Course] = {}
        self._tasks: dict[str, Task] = {}

    def save_session(self, session: Session) -> int:
        with self._lock:
            return self._save_session_locked(session)

    def _save_session_locked(self, session: Session) -> int:
        version = self._versions.get(session.id, 0) + 1
        self._versions[session.id] = version
        self._sessions[session.id] = session.to_dict()
        return version

    def load_session(self, session_id: str) -> Session:
        with self._lock:
            try:
                return Session.from_dict(self._sessions[session_id])
            except KeyError:
                raise NotFound(f"session {session_id}") from None

    def session_version(self, session_id: str) -> int:
        with self._lock:
            if session_id not in self._versions:
                raise NotFound(f"session {session_id}")
            return self._versions[session_id]

    def list_sessions(self, owner: str | None = None) -> list[Session]:
        with self._lock:
            sessions = [Session.from_dict(data) for data in self._sessions.values()]
        if owner is not None:
            sessions = [s for s in sessions if s.owner == owner]
        return sorted(sessions, key=lambda s: (s.created_at, s.id))

    def record_correlation(self, entry: CorrelationEntry) -> None:
        with self._lock:
            self._correlations[entry.correlation_id] = entry

    def get_correlation(self, correlation_id: str) -> CorrelationEntry | None:
        with self._lock:
            return self._correlations.get(correlation_id)

    def correlations_for_session(self, session_id: str) -> list[CorrelationEntry]:
        with self._lock:
            return [e for e in self._correlations.values() if e.session_id == session_id]

    def is_processed(self, correlation_id: str) -> bool:
        with self._lock:
            return correlation_id in self._processed

    def record_analysis_outcome(
        self, session: Session, telemetry: TelemetryRecord, correlation_id: str
    ) -> int:
        with self._lock:
            version = self._save_session_locked(session)
            self._telemetry.append(telemetry)
            self._processed.add(correlation_id)
            return version

    def append_telemetry(self, record: TelemetryRecord) -> None:
        with self._lock:
            self._telemetry.append(record)

    def list_telemetry(self) -> list[TelemetryRecord]:
        with self._lock:
            return list(self._telemetry)

    def telemetry_by_correlation(self, correlation_id: str) -> TelemetryRecord | None:
        with self._lock:
            for record in reversed(self._telemetry):
                if record.correlation_id == correlation_id:
                    return record
            return None

    def save_report(self, report_id: str, content: bytes) -> str:
        with self._lock:
            self._reports[report_id] = bytes(content)
        return f"memory://reports/{report_id}"

    def load_report(self, report_id: str) -> bytes:
        with self._lock:
            try:
                return self._reports[report_id]
            except KeyError:
                raise NotFound(f"report {report_id}") from None

    def save_course(self, course: Course) -> None:
        with self._lock:
            self._courses[course.id] = course

    def get_course(self, course_id: str) -> Course:
        with self._lock:
            try:
                return self._courses[course_id]
            except KeyError:
                raise NotFound(f"course {course_id}") from None

    def list_courses(self) -> list[Course]:
        with self._lock:
            return sorted(self._courses.values(), key=lambda c: (c.created_at, c.id))

    def save_task(self, task: Task) -> None:
        with self._lock:
            if task.course_id not in self._courses:
                raise NotFound(f"course {task.course_id}")
            self._tasks[task.id] = task

    def get_task(self, task_id: str) -> Task:
        with self._lock:
            try:
                return self._tasks[task_id]
            except KeyError:
                raise NotFound(f"task {task_id}") from None

    def list_tasks(self, course_id: str | None = None) -> list[Task]:
        with self._lock:
            tasks = list(self._tasks.values())
        if course_id is not None:
            tasks = [t for t in tasks if t.course_id == course_id]
        return sorted(tasks, key=lambda t: (t.created_at, t.id))


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _append_jsonl(path: Path, record: dict[str, Any]) -> None:
    with open(path, "a", encoding="utf-8") as handle:
        handle.write(json.dumps(record, sort_keys=True) + "\n")


def _read_jsonl(path: Path) -> Iterable[dict[str, Any]]:
    if not path.exists():
        return
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                yield json.loads(line)


class FileStore(Store):
    """Directory-backed store; every record lands on disk before the call returns."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = threading.RLock()
        (self.root / "sessions").mkdir(parents=True, exist_ok=True)
        (self.root / "reports").mkdir(parents=True, exist_ok=True)

    def _session_path(self, session_id: str) -> Path:
        if not session_id or "/" in session_id or session_id.startswith("."):
            raise NotFound(f"session {session_id}")
        return self.root / "sessions" / f"{session_id}.json"

    def save_session(self, session: Session) -> int:
        with self._lock:
            return self._save_session_locked(session)

    def _save_session_locked(self, session: Session) -> int:
        path = self._session_path(session.id)
        version = 1
        if path.exists():
            version = json.loads(path.read_text("utf-8"))["version"] + 1
        _write_atomic(
            path,
            json.dumps({"version": version, "session": session.to_dict()}, sort_keys=True),
        )
        return version

    def _load_envelope(self, session_id: str) -> dict[str, Any]:
        path = self._session_path(session_id)
        if not path.exists():
            raise NotFound(f"session {session_id}")
        return json.loads(path.read_text("utf-8"))

    def load_session(self, session_id: str) -> Session:
        with self._lock:
            return Session.from_dict(self._load_envelope(session_id)["session"])

    def session_version(self, session_id: str) -> int:
        with self._lock:
            return self._load_envelope(session_id)["version"]

    def list_sessions(self, owner: str | None = None) -> list[Session]:
        with self._lock:
            sessions = [
                Session.from_dict(json.loads(p.read_text("utf-8"))["session"])
                for p in sorted((self.root / "sessions").glob("*.json"))
            ]
        if owner is not None:
            sessions = [s for s in sessions if s.owner == owner]
        return sorted(sessions, key=lambda s: (s.created_at, s.id))

    def record_correlation(self, entry: CorrelationEntry) -> None:
        with self._lock:
            _append_jsonl(self.root / "correlations.jsonl", entry.to_dict())

    def get_correlation(self, correlation_id: str) -> CorrelationEntry | None:
        with self._lock:
            found = None
            for data in _read_jsonl(self.root / "correlations.jsonl"):
                if data["correlation_id"] == correlation_id:
                    found = CorrelationEntry.from_dict(data)
            return found

    def correlations_for_session(self, session_id: str) -> list[CorrelationEntry]:
        with self._lock:
            return [
                CorrelationEntry.from_dict(data)
                for data in _read_jsonl(self.root / "correlations.jsonl")
                if data["session_id"] == session_id
            ]

    def is_processed(self, correlation_id: str) -> bool:
        with self._lock:
            return any(
                data["correlation_id"] == correlation_id
                for data in _read_jsonl(self.root / "processed.jsonl")
            )

    def record_analysis_outcome(
        self, session: Session, telemetry: TelemetryRecord, correlation_id: str
    ) -> int:
        with self._lock:
            version = self._save_session_locked(session)
            _append_jsonl(self.root / "telemetry.jsonl", telemetry.to_dict())
            _append_jsonl(self.root / "processed.jsonl", {"correlation_id": correlation_id})
            return version

    def append_telemetry(self, record: TelemetryRecord) -> None:
        with self._lock:
            _append_jsonl(self.root / "telemetry.jsonl", record.to_dict())

    def list_telemetry(self) -> list[TelemetryRecord]:
        with self._lock:
            return [
                TelemetryRecord.from_dict(data)
                for data in _read_jsonl(self.root / "telemetry.jsonl")
            ]

    def telemetry_by_correlation(self, correlation_id: str) -> TelemetryRecord | None:
        with self._lock:
            found = None
            for data in _read_jsonl(self.root / "telemetry.jsonl"):
                if data["correlation_id"] == correlation_id:
                    found = TelemetryRecord.from_dict(data)
            return found

    def save_report(self, report_id: str, content: bytes) -> str:
        with self._lock:
            path = self.root / "reports" / f"{report_id}.csv"
            tmp = path.with_suffix(".csv.tmp")
            tmp.write_bytes(content)
            os.replace(tmp, path)
            return str(path)

    def load_report(self, report_id: str) -> bytes:
        with self._lock:
            path = self.root / "reports" / f"{report_id}.csv"
            if not path.exists():
                raise NotFound(f"report {report_id}")
            return path.read_bytes()

    def _read_table(self, name: str) -> dict[str, dict[str, Any]]:
        path = self.root / name
        if not path.exists():
            return {}
        return json.loads(path.read_text("utf-8"))

    def _write_table(self, name: str, table: dict[str, dict[str, Any]]) -> None:
        _write_atomic(self.root / name, json.dumps(table, sort_keys=True))

    def save_course(self, course: Course) -> None:
        with self._lock:
            table = self._read_table("courses.json")
            table[course.id] = course.to_dict()
            self._write_table("courses.json", table)

    def get_course(self, course_id: str) -> Course:
        with self._lock:
            table = self._read_table("courses.json")
            if course_id not in table:
                raise NotFound(f"course {course_id}")
            return Course.from_dict(table[course_id])

    def list_courses(self) -> list[Course]:
        with self._lock:
            courses = [Course.from_dict(d) for d in self._read_table("courses.json").values()]
        return sorted(courses, key=lambda c: (c.created_at, c.id))

    def save_task(self, task: Task) -> None:
        with self._lock:
            if task.course_id not in self._read_table("courses.json"):
                raise NotFound(f"course {task.course_id}")
            table = self._read_table("tasks.json")
            table[task.id] = task.to_dict()
            self._write_table("tasks.json", table)

    def get_task(self, task_id: str) -> Task:
        with self._lock:
            table = self._read_table("tasks.json")
            if task_id not in table:
                raise NotFound(f"task {task_id}")
            return Task.from_dict(table[task_id])

    def list_tasks(self, course_id: str | None = None) -> list[Task]:
        with self._lock:
            tasks = [Task.from_dict(d) for d in self._read_table("tasks.json").values()]
        if course_id is not None:
            tasks = [t for t in tasks if t.course_id == course_id]
        return sorted(tasks, key=lambda t: (t.created_at, t.id))
