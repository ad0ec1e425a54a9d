import csv

import pytest

from writecoach.analytics.benchmark import (
    BenchmarkReport,
    run_benchmark,
    write_benchmark_csvs,
)
from writecoach.analytics.classification import ClassificationCounts
from writecoach.analytics.corpus import bundled_corpus_path, load_corpus
from writecoach.analytics.rubric import evaluate_feedback_transcript
from writecoach.gateway.errors import BackendTimeout, BackendUnavailable
from writecoach.gateway.registry import (
    BackendDescriptor,
    BackendHandle,
    TransportKind,
)
from writecoach.gateway.transports import OracleTransport


@pytest.fixture
def corpus():
    return load_corpus(bundled_corpus_path())


@pytest.fixture
def oracle_handle():
    return BackendHandle(
        BackendDescriptor(backend_id="oracle", kind=TransportKind.ORACLE),
        OracleTransport(),
    )


def test_oracle_reproduces_hand_tally(corpus, oracle_handle):
    report = run_benchmark(corpus, [(oracle_handle, "rules-v1")], clock=lambda: 0.0)
    assert report.corpus_size == 8
    [backend] = report.backends
    assert backend.counts == ClassificationCounts(tp=4, fp=0, tn=4, fn=0)
    assert backend.metrics.precision == 1.0
    assert backend.metrics.recall == 1.0
    assert backend.metrics.f1 == 1.0
    assert backend.accuracy == 1.0
    assert backend.fp_rate == 0.0
    assert backend.fn_rate == 0.0
    assert backend.failures == 0


def test_flagged_sentences_walk_the_whole_ladder(corpus, oracle_handle):
    report = run_benchmark(corpus, [(oracle_handle, "rules-v1")], clock=lambda: 0.0)
    [backend] = report.backends
    for outcome, sentence in zip(backend.outcomes, corpus):
        levels = [v.level for v in outcome.transcript]
        if sentence.gold_has_error:
            # No learner revises anything, so the error is re-flagged at 2..4.
            assert levels == [1, 2, 3, 4]
            assert all(v.has_error for v in outcome.transcript)
        else:
            assert levels == [1]
            assert not outcome.transcript[0].has_error


def test_transcripts_score_usable(corpus, oracle_handle):
    report = run_benchmark(corpus, [(oracle_handle, "rules-v1")], clock=lambda: 0.0)
    for outcome, sentence in zip(report.backends[0].outcomes, corpus):
        assert evaluate_feedback_transcript(list(outcome.transcript), sentence.text).usable


def test_latency_samples_scale_with_repetitions(corpus, oracle_handle):
    ticks = iter(range(100000))
    clock = lambda: float(next(ticks))  # noqa: E731
    single = run_benchmark(corpus, [(oracle_handle, "rules-v1")], repetitions=1, clock=clock)
    # 4 clean sentences x 1 call + 4 flagged x 4 calls = 20 per repetition.
    assert single.backends[0].latency.n == 20

    doubled = run_benchmark(
        corpus, [(oracle_handle, "rules-v1")], repetitions=2, clock=lambda: 0.0
    )
    assert doubled.backends[0].latency.n == 40
    assert doubled.repetitions == 2
    # Outcomes stay one-per-sentence regardless of repetitions.
    assert len(doubled.backends[0].outcomes) == 8


def test_repetitions_must_be_positive(corpus, oracle_handle):
    with pytest.raises(ValueError):
        run_benchmark(corpus, [(oracle_handle, "rules-v1")], repetitions=0)


class FlakyTransport:
    """Fails on sentences containing a marker; otherwise defers to the oracle."""

    def __init__(self, marker, exc):
        self.marker = marker
        self.exc = exc
        self.inner = OracleTransport()

    def complete(self, request, payload):
        if self.marker in request.sentence:
            raise self.exc
        return self.inner.complete(request, payload)


def test_backend_failure_is_confined_to_its_sentence(corpus, oracle_handle):
    flaky = BackendHandle(
        BackendDescriptor(backend_id="flaky", kind=TransportKind.ORACLE),
        FlakyTransport("internet", BackendTimeout("slow")),
    )
    report = run_benchmark(
        corpus, [(flaky, "m"), (oracle_handle, "rules-v1")], clock=lambda: 0.0
    )
    flaky_report, oracle_report = report.backends

    # s3 is the only sentence mentioning "internet"; its level-1 call failed.
    failed = [o for o in flaky_report.outcomes if o.failure]
    assert [o.sentence_id for o in failed] == ["s3"]
    assert failed[0].failure == "timeout"
    assert failed[0].predicted_error is False
    assert failed[0].transcript == ()
    assert flaky_report.failures == 1
    # The failure costs one true positive, nothing else.
    assert flaky_report.counts == ClassificationCounts(tp=3, fp=0, tn=4, fn=1)
    # The healthy backend in the same run is untouched.
    assert oracle_report.counts == ClassificationCounts(tp=4, fp=0, tn=4, fn=0)


def test_mid_ladder_failure_keeps_partial_transcript(corpus):
    class FailAtLevel3:
        def __init__(self):
            self.inner = OracleTransport()

        def complete(self, request, payload):
            if request.level >= 3:
                raise BackendUnavailable("down")
            return self.inner.complete(request, payload)

    handle = BackendHandle(
        BackendDescriptor(backend_id="b", kind=TransportKind.ORACLE), FailAtLevel3()
    )
    report = run_benchmark(corpus, [(handle, "m")], clock=lambda: 0.0)
    [backend] = report.backends
    flagged = [o for o in backend.outcomes if o.transcript and o.transcript[0].has_error]
    for outcome in flagged:
        assert outcome.failure == "unavailable"
        assert [v.level for v in outcome.transcript] == [1, 2]
        # The level-1 verdict already flagged it, so detection still counts.
        assert outcome.predicted_error is True
    assert backend.counts.tp == 4


def test_csv_outputs(tmp_path, corpus, oracle_handle):
    report = run_benchmark(corpus, [(oracle_handle, "rules-v1")], clock=lambda: 0.0)
    written = write_benchmark_csvs(report, tmp_path)
    names = sorted(p.name for p in written)
    assert names == ["accuracy.csv", "latency.csv", "metrics.csv", "outcomes.csv", "rates.csv"]

    with open(tmp_path / "accuracy.csv", newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["backend_id", "model_name", "tp", "fp", "tn", "fn", "accuracy"]
    assert rows[1] == ["oracle", "rules-v1", "4", "0", "4", "0", "1.000000"]

    with open(tmp_path / "metrics.csv", newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert rows[1] == ["oracle", "rules-v1", "1.000000", "1.000000", "1.000000"]

    with open(tmp_path / "outcomes.csv", newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert len(rows) == 1 + 8
    s3_row = next(r for r in rows if r[2] == "s3")
    assert s3_row[3] == "true"
    assert s3_row[4] == "1 2 3 4"

    raw = (tmp_path / "accuracy.csv").read_bytes()
    assert b"\r\n" in raw


def test_empty_backend_list(corpus):
    report = run_benchmark(corpus, [], clock=lambda: 0.0)
    assert report == BenchmarkReport(corpus_size=8, repetitions=1, backends=())
