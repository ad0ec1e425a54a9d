"""Benchmark harness: run a labelled corpus through one or more backends.

For every sentence the harness performs the full assessment procedure: an
initial level-1 check, then, when the sentence is flagged, the escalating
re-checks at levels 2..4 against the unchanged text (a benchmark has no
learner to revise anything, so flagged sentences walk the whole ladder).
Each backend gets detection counts, derived metrics, latency stats, and the
per-sentence verdict transcripts for rubric scoring.

Backend failures are confined to the sentence that hit them: the outcome
records the failure code, the sentence counts as predicted-clean, and no
latency sample is recorded for it.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from writecoach.analytics.classification import (
    ClassificationCounts,
    MetricsTriple,
    accuracy,
    classify_outcomes,
    false_negative_rate,
    false_positive_rate,
    precision_recall_f1,
)
from writecoach.analytics.corpus import LabeledSentence
from writecoach.analytics.latency import EmptySamples, LatencyStats, latency_stats
from writecoach.core.ladder import MAX_HINT_LEVEL
from writecoach.gateway.config import ModelConfig
from writecoach.gateway.errors import BackendTimeout, BackendUnavailable, MalformedReply
from writecoach.gateway.messages import AnalysisRequest
from writecoach.gateway.registry import BackendHandle, analyze
from writecoach.gateway.verdict import Verdict


@dataclass(frozen=True)
class SentenceOutcome:
    sentence_id: str
    predicted_error: bool
    transcript: tuple[Verdict, ...]
    failure: str | None = None


@dataclass(frozen=True)
class BackendReport:
    backend_id: str
    model_name: str
    counts: ClassificationCounts
    metrics: MetricsTriple
    accuracy: float
    fp_rate: float
    fn_rate: float
    latency: LatencyStats | None
    outcomes: tuple[SentenceOutcome, ...]
    failures: int


@dataclass(frozen=True)
class BenchmarkReport:
    corpus_size: int
    repetitions: int
    backends: tuple[BackendReport, ...] = field(default_factory=tuple)


_FAILURE_CODES = (
    (BackendTimeout, "timeout"),
    (BackendUnavailable, "unavailable"),
    (MalformedReply, "malformed"),
)
_FAILURE_TYPES = tuple(exc_type for exc_type, _ in _FAILURE_CODES)


def _failure_code(exc: Exception) -> str:
    for exc_type, code in _FAILURE_CODES:
        if isinstance(exc, exc_type):
            return code
    raise exc


def _assess_sentence(
    handle: BackendHandle,
    config: "ModelConfig",
    sentence: LabeledSentence,
    correlation_prefix: str,
    clock: Callable[[], float],
    samples: list[float],
) -> SentenceOutcome:
    transcript: list[Verdict] = []
    tracked = None
    for level in range(1, MAX_HINT_LEVEL + 1):
        request = AnalysisRequest(
            correlation_id=f"{correlation_prefix}-L{level}",
            sentence=sentence.text,
            level=level,
            config=config,
            tracked_category=tracked,
        )
        try:
            response = analyze(handle, request, clock=clock)
        except _FAILURE_TYPES as exc:
            return SentenceOutcome(
                sentence_id=sentence.id,
                predicted_error=bool(transcript and transcript[0].has_error),
                transcript=tuple(transcript),
                failure=_failure_code(exc),
            )
        samples.append(response.latency.duration_ms)
        transcript.append(response.verdict)
        if not response.verdict.has_error:
            break
        tracked = response.verdict.category.value if response.verdict.category else None
    return SentenceOutcome(
        sentence_id=sentence.id,
        predicted_error=transcript[0].has_error,
        transcript=tuple(transcript),
    )


def run_benchmark(
    corpus: Sequence[LabeledSentence],
    backends: Sequence[tuple[BackendHandle, str]],
    repetitions: int = 1,
    clock: Callable[[], float] = time.perf_counter,
) -> BenchmarkReport:
    """Assess the corpus with each (handle, model_name) pair.

    Every repetition runs the full procedure, so latency sample counts scale
    with ``repetitions``. Detection outcomes come from the first repetition;
    with a deterministic backend the rest agree.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    reports = []
    for handle, model_name in backends:
        config = ModelConfig(
            backend_id=handle.descriptor.backend_id, model_name=model_name
        )
        samples: list[float] = []
        first_pass: list[SentenceOutcome] = []
        for rep in range(repetitions):
            for sentence in corpus:
                outcome = _assess_sentence(
                    handle,
                    config,
                    sentence,
                    correlation_prefix=f"bench-{handle.descriptor.backend_id}-r{rep}-{sentence.id}",
                    clock=clock,
                    samples=samples,
                )
                if rep == 0:
                    first_pass.append(outcome)
        counts = classify_outcomes(
            [o.predicted_error for o in first_pass],
            [s.gold_has_error for s in corpus],
        )
        try:
            stats = latency_stats(samples)
        except EmptySamples:
            stats = None
        reports.append(
            BackendReport(
                backend_id=handle.descriptor.backend_id,
                model_name=model_name,
                counts=counts,
                metrics=precision_recall_f1(counts),
                accuracy=accuracy(counts),
                fp_rate=false_positive_rate(counts),
                fn_rate=false_negative_rate(counts),
                latency=stats,
                outcomes=tuple(first_pass),
                failures=sum(1 for o in first_pass if o.failure),
            )
        )
    return BenchmarkReport(
        corpus_size=len(corpus), repetitions=repetitions, backends=tuple(reports)
    )


def write_benchmark_csvs(report: BenchmarkReport, out_dir: str | Path) -> list[Path]:
    """Write the report as CSV files; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name: str, header: list[str], rows: list[list]) -> None:
        path = out / name
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\r\n")
            writer.writerow(header)
            writer.writerows(rows)
        written.append(path)

    emit(
        "accuracy.csv",
        ["backend_id", "model_name", "tp", "fp", "tn", "fn", "accuracy"],
        [
            [b.backend_id, b.model_name, b.counts.tp, b.counts.fp, b.counts.tn, b.counts.fn, f"{b.accuracy:.6f}"]
            for b in report.backends
        ],
    )
    emit(
        "metrics.csv",
        ["backend_id", "model_name", "precision", "recall", "f1"],
        [
            [b.backend_id, b.model_name, f"{b.metrics.precision:.6f}", f"{b.metrics.recall:.6f}", f"{b.metrics.f1:.6f}"]
            for b in report.backends
        ],
    )
    emit(
        "rates.csv",
        ["backend_id", "model_name", "fp_rate", "fn_rate"],
        [
            [b.backend_id, b.model_name, f"{b.fp_rate:.6f}", f"{b.fn_rate:.6f}"]
            for b in report.backends
        ],
    )
    emit(
        "latency.csv",
        ["backend_id", "model_name", "n", "mean_ms", "stddev_ms", "p25_ms", "p50_ms", "p75_ms"],
        [
            [
                b.backend_id,
                b.model_name,
                b.latency.n if b.latency else 0,
                f"{b.latency.mean_ms:.6f}" if b.latency else "",
                f"{b.latency.stddev_ms:.6f}" if b.latency else "",
                f"{b.latency.p25_ms:.6f}" if b.latency else "",
                f"{b.latency.p50_ms:.6f}" if b.latency else "",
                f"{b.latency.p75_ms:.6f}" if b.latency else "",
            ]
            for b in report.backends
        ],
    )
    emit(
        "outcomes.csv",
        ["backend_id", "model_name", "sentence_id", "predicted_error", "levels", "failure"],
        [
            [
                b.backend_id,
                b.model_name,
                o.sentence_id,
                "true" if o.predicted_error else "false",
                " ".join(str(v.level) for v in o.transcript),
                o.failure or "",
            ]
            for b in report.backends
            for o in b.outcomes
        ],
    )
    return written
