"""Progress summaries derived from session state.

Everything here is a pure projection of the verdict log; nothing is stored
separately, so summaries can never drift out of sync with the session.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from writecoach.core.ladder import SentenceStatus, Session


@dataclass(frozen=True)
class RevisionOutcome:
    text: str
    # True/False once the re-check verdict is in; None while still in flight.
    correct: bool | None


@dataclass(frozen=True)
class SentenceTimeline:
    sentence_index: int
    original: str
    status: SentenceStatus
    revisions: tuple[RevisionOutcome, ...]


@dataclass(frozen=True)
class ProgressSummary:
    total_sentences: int
    errors_identified: int
    errors_corrected: int
    unresolved: int
    per_level_counts: dict[int, int] = field(default_factory=dict)
    per_sentence_timeline: tuple[SentenceTimeline, ...] = ()


def session_summary(session: Session) -> ProgressSummary:
    """Summarize how far a session has progressed.

    errors_identified counts sentences whose first verdict flagged an error;
    errors_corrected counts those that later reached Completed. Hint levels
    are tallied from delivered hints, so per_level_counts[4] equals the number
    of Unresolved sentences.
    """
    identified = 0
    corrected = 0
    unresolved = 0
    level_counts: dict[int, int] = {1: 0, 2: 0, 3: 0, 4: 0}
    timelines: list[SentenceTimeline] = []

    for record in session.sentences:
        flagged = bool(record.verdicts) and record.verdicts[0].has_error
        if flagged:
            identified += 1
            if record.status is SentenceStatus.COMPLETED:
                corrected += 1
        if record.status is SentenceStatus.UNRESOLVED:
            unresolved += 1
        for level, _ in record.delivered_hints():
            level_counts[level] += 1

        outcomes = []
        for attempt, text in enumerate(record.revisions, start=1):
            # Verdict k checks revision k (verdict 0 checked the original).
            verdict = record.verdicts[attempt] if attempt < len(record.verdicts) else None
            outcomes.append(
                RevisionOutcome(
                    text=text, correct=None if verdict is None else not verdict.has_error
                )
            )
        timelines.append(
            SentenceTimeline(
                sentence_index=record.unit.index,
                original=record.unit.text,
                status=record.status,
                revisions=tuple(outcomes),
            )
        )

    return ProgressSummary(
        total_sentences=len(session.sentences),
        errors_identified=identified,
        errors_corrected=corrected,
        unresolved=unresolved,
        per_level_counts=level_counts,
        per_sentence_timeline=tuple(timelines),
    )
