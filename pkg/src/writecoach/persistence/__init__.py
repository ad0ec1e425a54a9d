"""Storage contracts and the report export path."""

from writecoach.persistence.store import (
    BadFilter,
    CorrelationEntry,
    Course,
    FileStore,
    MemoryStore,
    NotFound,
    ReportFilter,
    Store,
    Task,
    TelemetryRecord,
)
from writecoach.persistence.reports import (
    REPORT_COLUMNS,
    anonymize_user_id,
    render_report_csv,
    render_report_rows,
    write_csv_report,
)

__all__ = [
    "BadFilter",
    "CorrelationEntry",
    "Course",
    "FileStore",
    "MemoryStore",
    "NotFound",
    "REPORT_COLUMNS",
    "ReportFilter",
    "Store",
    "Task",
    "TelemetryRecord",
    "anonymize_user_id",
    "render_report_csv",
    "render_report_rows",
    "write_csv_report",
]
