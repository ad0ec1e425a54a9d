"""Pure domain state: sentence segmentation, the feedback ladder, progress summaries.

Nothing in this package talks to the network, the clock (beyond an injected
callable), or any store. Everything is plain dataclasses so callers can copy
and serialize sessions freely.
"""

from writecoach.core.segmentation import SentenceUnit, segment_text
from writecoach.core.ladder import (
    MAX_HINT_LEVEL,
    MAX_REVISIONS,
    AnalysisRequestSpec,
    EmptyDocument,
    EmptyRevision,
    HintLevel,
    InvalidTransition,
    LadderError,
    MissingCorrection,
    RevisionLimitExceeded,
    SentenceRecord,
    SentenceStatus,
    Session,
    TransitionKind,
    TransitionResult,
    apply_verdict,
    begin_analysis,
    revert_analysis,
    start_session,
    submit_revision,
)
from writecoach.core.summary import ProgressSummary, session_summary

__all__ = [
    "MAX_HINT_LEVEL",
    "MAX_REVISIONS",
    "AnalysisRequestSpec",
    "EmptyDocument",
    "EmptyRevision",
    "HintLevel",
    "InvalidTransition",
    "LadderError",
    "MissingCorrection",
    "ProgressSummary",
    "RevisionLimitExceeded",
    "SentenceRecord",
    "SentenceStatus",
    "SentenceUnit",
    "Session",
    "TransitionKind",
    "TransitionResult",
    "apply_verdict",
    "begin_analysis",
    "revert_analysis",
    "segment_text",
    "session_summary",
    "start_session",
    "submit_revision",
]
