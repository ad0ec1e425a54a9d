"""Request/response records exchanged with analysis backends."""

from __future__ import annotations

from dataclasses import dataclass

from writecoach.gateway.config import ModelConfig
from writecoach.gateway.verdict import Verdict


@dataclass(frozen=True)
class LatencySample:
    """Wall-clock duration of the backend call(s) for one request."""

    duration_ms: float
    started_at: float


@dataclass(frozen=True)
class AnalysisRequest:
    correlation_id: str
    sentence: str
    level: int
    config: ModelConfig
    tracked_category: str | None = None


@dataclass(frozen=True)
class AnalysisResponse:
    correlation_id: str
    verdict: Verdict
    latency: LatencySample
    raw_reply: str
