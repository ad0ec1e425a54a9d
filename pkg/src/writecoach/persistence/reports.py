"""CSV report exports for teachers and researchers.

One row per sentence attempt: attempt 0 is the original text's analysis,
attempt k its k-th revision. Rows are ordered by (session_id,
sentence_index, revision_number) and rendered as RFC-4180 CSV with CRLF
line endings and UTF-8 text. Telemetry columns are joined in through each
attempt's correlation id and stay empty when no analysis completed.
"""

from __future__ import annotations

import csv
import hashlib
import io
import uuid

from writecoach.core.ladder import Session
from writecoach.persistence.store import ReportFilter, Store

REPORT_COLUMNS = (
    "session_id",
    "sentence_index",
    "original_text",
    "revision_number",
    "revision_text",
    "verdict_has_error",
    "category",
    "hint_level",
    "backend_id",
    "model_name",
    "duration_ms",
    "outcome",
    "status",
)


def anonymize_user_id(user_id: str, salt: str) -> str:
    """Stable pseudonym for a user id; same salt and id, same pseudonym."""
    digest = hashlib.sha256(f"{salt}:{user_id}".encode("utf-8")).hexdigest()
    return f"u{digest[:12]}"


def _session_rows(session: Session, store: Store) -> list[list[str]]:
    by_attempt: dict[tuple[int, int], str] = {}
    for entry in store.correlations_for_session(session.id):
        by_attempt[(entry.sentence_index, entry.attempt)] = entry.correlation_id

    config = session.model_config
    rows = []
    for record in session.sentences:
        attempts = len(record.revisions) + 1
        for attempt in range(attempts):
            verdict = record.verdicts[attempt] if attempt < len(record.verdicts) else None
            duration = ""
            outcome = ""
            correlation_id = by_attempt.get((record.unit.index, attempt))
            if correlation_id:
                telemetry = store.telemetry_by_correlation(correlation_id)
                if telemetry is not None:
                    outcome = telemetry.outcome
                    if telemetry.duration_ms is not None:
                        duration = str(telemetry.duration_ms)
            rows.append(
                [
                    session.id,
                    str(record.unit.index),
                    record.unit.text,
                    str(attempt),
                    record.revisions[attempt - 1] if attempt else "",
                    "" if verdict is None else ("true" if verdict.has_error else "false"),
                    verdict.category.value if verdict and verdict.category else "",
                    str(verdict.level) if verdict and verdict.has_error else "",
                    config.backend_id,
                    config.model_name,
                    duration,
                    outcome,
                    record.status.value,
                ]
            )
    return rows


def render_report_rows(store: Store, report_filter: ReportFilter) -> list[list[str]]:
    """Collect and order the data rows for every session the filter matches."""
    rows: list[list[str]] = []
    for session in store.list_sessions():
        if report_filter.matches(session):
            rows.extend(_session_rows(session, store))
    rows.sort(key=lambda row: (row[0], int(row[1]), int(row[3])))
    return rows


def render_report_csv(store: Store, report_filter: ReportFilter) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(REPORT_COLUMNS)
    writer.writerows(render_report_rows(store, report_filter))
    return buffer.getvalue().encode("utf-8")


def write_csv_report(
    store: Store, report_filter: ReportFilter, report_id: str | None = None
) -> tuple[str, str]:
    """Render a report and persist it; returns (report_id, locator)."""
    report_id = report_id or uuid.uuid4().hex
    locator = store.save_report(report_id, render_report_csv(store, report_filter))
    return report_id, locator
