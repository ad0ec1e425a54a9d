"""Evaluation machinery: detection metrics, latency stats, feedback rubric, benchmarks."""

from writecoach.analytics.classification import (
    ClassificationCounts,
    LengthMismatch,
    MetricsTriple,
    accuracy,
    classify_outcomes,
    false_negative_rate,
    false_positive_rate,
    precision_recall_f1,
)
from writecoach.analytics.latency import EmptySamples, LatencyStats, latency_stats
from writecoach.analytics.rubric import (
    EmptyTranscript,
    NonMonotoneLevels,
    RubricResult,
    evaluate_feedback_transcript,
)
from writecoach.analytics.corpus import (
    CorpusFormatError,
    CorpusIssue,
    LabeledSentence,
    load_corpus,
    validate_corpus,
)
from writecoach.analytics.benchmark import (
    BackendReport,
    BenchmarkReport,
    SentenceOutcome,
    run_benchmark,
    write_benchmark_csvs,
)

__all__ = [
    "BackendReport",
    "BenchmarkReport",
    "ClassificationCounts",
    "CorpusFormatError",
    "CorpusIssue",
    "EmptySamples",
    "EmptyTranscript",
    "LabeledSentence",
    "LatencyStats",
    "LengthMismatch",
    "MetricsTriple",
    "NonMonotoneLevels",
    "RubricResult",
    "SentenceOutcome",
    "accuracy",
    "classify_outcomes",
    "evaluate_feedback_transcript",
    "false_negative_rate",
    "false_positive_rate",
    "latency_stats",
    "load_corpus",
    "precision_recall_f1",
    "run_benchmark",
    "validate_corpus",
    "write_benchmark_csvs",
]
