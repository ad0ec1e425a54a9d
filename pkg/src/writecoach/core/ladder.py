"""Session state machine for the graduated feedback ladder.

A sentence climbs a four-step ladder. The first analysis of a flagged
sentence delivers a level-1 hint; each failed revision escalates by exactly
one level, so the check after revision k is requested at level k+1. The
level-4 verdict must carry a full correction: it ends the ladder with the
sentence Unresolved. A clean verdict at any point ends it Completed.

Invariants maintained here and leaned on everywhere else:

* a sentence accepts at most ``MAX_REVISIONS`` revisions;
* ``current_level`` is present exactly while status is AwaitingRevision and
  equals the last hint level the learner saw;
* delivered hint levels form a strictly increasing prefix of 1..4;
* level 4 is delivered at most once, and only on the check that follows the
  third revision.

The module is pure: no I/O, no globals, clocks and id factories are injected.
State is mutated in place; callers are expected to serialize transitions per
session (the service layer holds a lock per session id).
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import TYPE_CHECKING, Any, Callable

from writecoach.core.segmentation import SentenceUnit, segment_text

if TYPE_CHECKING:
    from writecoach.gateway.verdict import Verdict

MAX_REVISIONS = 3
MAX_HINT_LEVEL = 4


class HintLevel(IntEnum):
    """The four rungs of the feedback ladder, least to most explicit."""

    IMPLICIT_HINT = 1
    PROBING_QUESTION = 2
    ERROR_LOCATION = 3
    EXPLICIT_CORRECTION = 4


class SentenceStatus(str, Enum):
    PENDING = "pending"
    ANALYZING = "analyzing"
    AWAITING_REVISION = "awaiting_revision"
    COMPLETED = "completed"
    UNRESOLVED = "unresolved"


TERMINAL_STATUSES = frozenset({SentenceStatus.COMPLETED, SentenceStatus.UNRESOLVED})


class LadderError(Exception):
    """Base class for state machine violations."""


class EmptyDocument(LadderError):
    pass


class InvalidTransition(LadderError):
    pass


class RevisionLimitExceeded(LadderError):
    pass


class EmptyRevision(LadderError):
    pass


class MissingCorrection(LadderError):
    pass


class TransitionKind(str, Enum):
    HINT_DELIVERED = "hint_delivered"
    COMPLETED = "completed"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class TransitionResult:
    """What a verdict did to a sentence, in terms the caller can act on."""

    kind: TransitionKind
    sentence_index: int
    hint_level: int | None = None
    hint: str | None = None
    correction: str | None = None
    explanation: str | None = None
    hint_level_used: int | None = None


@dataclass(frozen=True)
class AnalysisRequestSpec:
    """Everything a backend needs to check one sentence at one ladder rung."""

    sentence_index: int
    text: str
    level: int
    tracked_category: str | None = None


@dataclass
class SentenceRecord:
    unit: SentenceUnit
    status: SentenceStatus = SentenceStatus.PENDING
    # Last hint level delivered to the learner; present iff AwaitingRevision.
    current_level: int | None = None
    # Level asked of the backend; present iff Analyzing.
    requested_level: int | None = None
    revisions: list[str] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)
    # Highest hint level seen before the successful revision; set on Completed.
    hint_level_used: int | None = None

    @property
    def active_text(self) -> str:
        """The text currently under assessment: latest revision, else the original."""
        return self.revisions[-1] if self.revisions else self.unit.text

    def delivered_hints(self) -> list[tuple[int, str]]:
        """(level, hint) pairs in delivery order, derived from the verdict log."""
        return [(v.level, v.hint) for v in self.verdicts if v.has_error and v.hint]

    def to_dict(self) -> dict[str, Any]:
        return {
            "unit": {
                "index": self.unit.index,
                "text": self.unit.text,
                "start": self.unit.start,
                "end": self.unit.end,
            },
            "status": self.status.value,
            "current_level": self.current_level,
            "requested_level": self.requested_level,
            "revisions": list(self.revisions),
            "verdicts": [v.to_dict() for v in self.verdicts],
            "hint_level_used": self.hint_level_used,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SentenceRecord":
        from writecoach.gateway.verdict import Verdict

        unit = data["unit"]
        return cls(
            unit=SentenceUnit(
                index=unit["index"], text=unit["text"], start=unit["start"], end=unit["end"]
            ),
            status=SentenceStatus(data["status"]),
            current_level=data.get("current_level"),
            requested_level=data.get("requested_level"),
            revisions=list(data.get("revisions", ())),
            verdicts=[Verdict.from_dict(v) for v in data.get("verdicts", ())],
            hint_level_used=data.get("hint_level_used"),
        )


def _default_id() -> str:
    return uuid.uuid4().hex


@dataclass
class Session:
    id: str
    owner: str
    document: str
    model_config: Any  # gateway ModelConfig; core treats it as opaque
    sentences: list[SentenceRecord]
    task_ref: str | None = None
    created_at: float = 0.0
    updated_at: float = 0.0

    def record(self, sentence_index: int) -> SentenceRecord:
        if not 0 <= sentence_index < len(self.sentences):
            raise InvalidTransition(
                f"sentence index {sentence_index} out of range for session {self.id}"
            )
        return self.sentences[sentence_index]

    def touch(self, clock: Callable[[], float]) -> None:
        self.updated_at = max(self.updated_at, clock())

    def to_dict(self) -> dict[str, Any]:
        config = self.model_config
        return {
            "id": self.id,
            "owner": self.owner,
            "document": self.document,
            "model_config": config.to_dict() if hasattr(config, "to_dict") else config,
            "sentences": [s.to_dict() for s in self.sentences],
            "task_ref": self.task_ref,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Session":
        from writecoach.gateway.config import ModelConfig

        raw_config = data["model_config"]
        config = ModelConfig.from_dict(raw_config) if isinstance(raw_config, dict) else raw_config
        return cls(
            id=data["id"],
            owner=data["owner"],
            document=data["document"],
            model_config=config,
            sentences=[SentenceRecord.from_dict(s) for s in data["sentences"]],
            task_ref=data.get("task_ref"),
            created_at=data.get("created_at", 0.0),
            updated_at=data.get("updated_at", 0.0),
        )


def start_session(
    owner: str,
    document: str,
    model_config: Any,
    *,
    task_ref: str | None = None,
    session_id: str | None = None,
    clock: Callable[[], float] = time.time,
    id_factory: Callable[[], str] = _default_id,
) -> Session:
    """Segment a document and open a session with every sentence Pending."""
    units = segment_text(document)
    if not units:
        raise EmptyDocument("document contains no sentences")
    now = clock()
    return Session(
        id=session_id or id_factory(),
        owner=owner,
        document=document,
        model_config=model_config,
        sentences=[SentenceRecord(unit=u) for u in units],
        task_ref=task_ref,
        created_at=now,
        updated_at=now,
    )


def begin_analysis(
    session: Session, sentence_index: int, *, clock: Callable[[], float] = time.time
) -> AnalysisRequestSpec:
    """Move a Pending sentence to Analyzing; the first check is level 1."""
    record = session.record(sentence_index)
    if record.status is not SentenceStatus.PENDING:
        raise InvalidTransition(
            f"sentence {sentence_index} is {record.status.value}, not pending"
        )
    record.status = SentenceStatus.ANALYZING
    record.requested_level = 1
    session.touch(clock)
    return AnalysisRequestSpec(
        sentence_index=sentence_index, text=record.unit.text, level=1, tracked_category=None
    )


def submit_revision(
    session: Session,
    sentence_index: int,
    revision: str,
    *,
    clock: Callable[[], float] = time.time,
) -> AnalysisRequestSpec:
    """Accept a revision for a flagged sentence and request its re-check.

    The re-check is requested one level above the hint the learner just acted
    on, so revision k is checked at level k+1.
    """
    record = session.record(sentence_index)
    if record.status is not SentenceStatus.AWAITING_REVISION:
        raise InvalidTransition(
            f"sentence {sentence_index} is {record.status.value}, not awaiting a revision"
        )
    if len(record.revisions) >= MAX_REVISIONS:
        # Unreachable through the public flow (AwaitingRevision implies fewer
        # than MAX_REVISIONS) but kept as a hard stop for hand-built states.
        raise RevisionLimitExceeded(
            f"sentence {sentence_index} already has {MAX_REVISIONS} revisions"
        )
    if not revision or not revision.strip():
        raise EmptyRevision("revision text is empty")
    assert record.current_level is not None
    level = record.current_level + 1
    record.revisions.append(revision)
    assert level == len(record.revisions) + 1
    record.status = SentenceStatus.ANALYZING
    record.requested_level = level
    record.current_level = None
    tracked = next((v.category.value for v in record.verdicts if v.has_error), None)
    session.touch(clock)
    return AnalysisRequestSpec(
        sentence_index=sentence_index, text=revision, level=level, tracked_category=tracked
    )


def apply_verdict(
    session: Session,
    sentence_index: int,
    verdict: "Verdict",
    *,
    clock: Callable[[], float] = time.time,
) -> TransitionResult:
    """Fold a backend verdict into the session and say what happened."""
    record = session.record(sentence_index)
    if record.status is not SentenceStatus.ANALYZING:
        raise InvalidTransition(
            f"sentence {sentence_index} is {record.status.value}, not analyzing"
        )
    if verdict.level != record.requested_level:
        raise InvalidTransition(
            f"verdict level {verdict.level} does not echo requested level "
            f"{record.requested_level}"
        )
    final_attempt = len(record.revisions) >= MAX_REVISIONS
    if verdict.has_error and final_attempt and not verdict.correction:
        raise MissingCorrection(
            "a level-4 error verdict must carry a full corrected sentence"
        )

    record.verdicts.append(verdict)
    record.requested_level = None
    session.touch(clock)

    if not verdict.has_error:
        seen = verdict.level - 1
        record.hint_level_used = seen if seen >= 1 else None
        record.status = SentenceStatus.COMPLETED
        record.current_level = None
        return TransitionResult(
            kind=TransitionKind.COMPLETED,
            sentence_index=sentence_index,
            hint_level_used=record.hint_level_used,
        )

    if final_attempt:
        record.status = SentenceStatus.UNRESOLVED
        record.current_level = None
        return TransitionResult(
            kind=TransitionKind.UNRESOLVED,
            sentence_index=sentence_index,
            hint_level=verdict.level,
            hint=verdict.hint,
            correction=verdict.correction,
            explanation=verdict.explanation,
        )

    record.status = SentenceStatus.AWAITING_REVISION
    record.current_level = verdict.level
    return TransitionResult(
        kind=TransitionKind.HINT_DELIVERED,
        sentence_index=sentence_index,
        hint_level=verdict.level,
        hint=verdict.hint,
    )


def revert_analysis(
    session: Session, sentence_index: int, *, clock: Callable[[], float] = time.time
) -> None:
    """Undo an in-flight analysis after a backend failure.

    The submitted revision (if any) is handed back to the learner: it is
    popped so the attempt is not consumed, and the sentence returns to the
    state it was in before the request went out.
    """
    record = session.record(sentence_index)
    if record.status is not SentenceStatus.ANALYZING:
        raise InvalidTransition(
            f"sentence {sentence_index} is {record.status.value}, not analyzing"
        )
    assert record.requested_level is not None
    if record.requested_level == 1:
        record.status = SentenceStatus.PENDING
        record.current_level = None
    else:
        record.revisions.pop()
        record.status = SentenceStatus.AWAITING_REVISION
        record.current_level = record.requested_level - 1
    record.requested_level = None
    session.touch(clock)
