"""Acceptance gate: the seven checks the package must pass before release.

Each test prints one ``acceptance: PASS/FAIL`` line on the terminal (past
pytest's capture) so the gate's outcome is readable at a glance.
"""

import csv
import dataclasses
import io
import itertools
import math
import random
import socket
import time
from contextlib import contextmanager

import pytest
from click.testing import CliRunner
from hypothesis import given, settings
from hypothesis import strategies as st

from writecoach.analytics.benchmark import run_benchmark
from writecoach.analytics.classification import ClassificationCounts, precision_recall_f1
from writecoach.analytics.corpus import bundled_corpus_path, load_corpus
from writecoach.analytics.latency import latency_stats
from writecoach.analytics.rubric import evaluate_feedback_transcript
from writecoach.cli import main as cli_main
from writecoach.config import AppConfig, HttpConfig, StoreConfig
from writecoach.core import ladder
from writecoach.core.ladder import (
    InvalidTransition,
    SentenceStatus,
    TransitionKind,
)
from writecoach.gateway.config import ModelConfig
from writecoach.gateway.messages import AnalysisRequest
from writecoach.gateway.oracle import oracle_check
from writecoach.gateway.registry import (
    BackendDescriptor,
    BackendRegistry,
    TransportKind,
    analyze,
)
from writecoach.gateway.verdict import ErrorCategory, Verdict
from writecoach.persistence.reports import write_csv_report
from writecoach.persistence.store import MemoryStore, ReportFilter
from writecoach.services.runtime import build_runtime
from writecoach.services.workers import (
    ExportWorker,
    ModelWorker,
    PushWorker,
    ResponseWorker,
    WorkerKilled,
)

FIXED_TIME = 1_700_000_000.0
CONFIG = ModelConfig(backend_id="oracle", model_name="rules-v1", timeout_ms=5000)
OWNER = "student-1"
TEACHER = "teacher-1"


@contextmanager
def _criterion(capsys, label):
    try:
        yield
    except BaseException:
        with capsys.disabled():
            print(f"\nacceptance: FAIL  {label}")
        raise
    with capsys.disabled():
        print(f"\nacceptance: PASS  {label}")


# --- 1. frozen detection metrics -------------------------------------------

FROZEN_METRIC_ROWS = [
    (ClassificationCounts(tp=87, tn=53, fp=46, fn=14), (0.654, 0.861, 0.743)),
    (ClassificationCounts(tp=82, tn=59, fp=41, fn=18), (0.667, 0.820, 0.735)),
]


def test_detection_metrics_reproduce_frozen_rows(capsys):
    with _criterion(capsys, "detection metrics reproduce both frozen count rows"):
        started = time.perf_counter()
        for counts, (precision, recall, f1) in FROZEN_METRIC_ROWS:
            triple = precision_recall_f1(counts)
            assert triple.precision == pytest.approx(precision, abs=1e-3)
            assert triple.recall == pytest.approx(recall, abs=1e-3)
            assert triple.f1 == pytest.approx(f1, abs=1e-3)
        assert time.perf_counter() - started < 1.0


# --- 2. hint ladder conformance --------------------------------------------


def _error_verdict(level: int) -> Verdict:
    return Verdict(
        has_error=True,
        level=level,
        category=ErrorCategory.ARTICLE,
        span=(0, 3) if level >= 2 else None,
        hint="look again" + " harder" * level,
        correction="Use the internet." if level == 4 else None,
        explanation="an explanation" if level == 4 else None,
    )


@settings(max_examples=1000, deadline=None)
@given(data=st.data())
def _ladder_walk(data):
    session = ladder.start_session(
        "learner",
        "One sentence only.",
        CONFIG,
        clock=lambda: FIXED_TIME,
        id_factory=lambda: "sid",
    )
    record = session.record(0)
    delivered = []
    terminal = None
    for round_no in range(4):
        if round_no == 0:
            spec = ladder.begin_analysis(session, 0, clock=lambda: FIXED_TIME)
        else:
            spec = ladder.submit_revision(
                session, 0, f"revision {round_no}", clock=lambda: FIXED_TIME
            )
        assert spec.level == len(record.revisions) + 1
        clean = data.draw(st.booleans(), label=f"clean at level {spec.level}")
        verdict = (
            Verdict(has_error=False, level=spec.level)
            if clean
            else _error_verdict(spec.level)
        )
        result = ladder.apply_verdict(session, 0, verdict, clock=lambda: FIXED_TIME)
        if clean:
            expected_used = spec.level - 1 if spec.level > 1 else None
            assert result.kind is TransitionKind.COMPLETED
            assert record.status is SentenceStatus.COMPLETED
            assert record.hint_level_used == expected_used
            assert result.hint_level_used == expected_used
            terminal = "completed"
            break
        delivered.append(result.hint_level)
        if result.kind is TransitionKind.UNRESOLVED:
            assert result.correction is not None
            terminal = "unresolved"
            break
        assert result.kind is TransitionKind.HINT_DELIVERED

    assert terminal in ("completed", "unresolved")
    # Levels climb one rung at a time; 4 appears at most once, as the last
    # delivery, and only once three revisions failed.
    assert delivered == list(range(1, len(delivered) + 1))
    assert len(record.revisions) <= 3
    if 4 in delivered:
        assert terminal == "unresolved"
        assert delivered[-1] == 4
        assert len(record.revisions) == 3
    else:
        assert terminal == "completed"
    with pytest.raises(InvalidTransition):
        ladder.submit_revision(session, 0, "one more", clock=lambda: FIXED_TIME)


def test_hint_ladder_conformance(capsys):
    with _criterion(
        capsys, "hint ladder conforms over 1000 generated verdict sequences"
    ):
        _ladder_walk()


# --- 3 & 4. full-pipeline equivalence and crash replay ----------------------

CORPUS_ROWS = load_corpus(bundled_corpus_path())
DOCUMENT = " ".join(row.text for row in CORPUS_ROWS)
FLAGGED = [i for i, row in enumerate(CORPUS_ROWS) if row.gold_has_error]


def _corrected(text: str) -> str:
    verdict = oracle_check(text, level=4)
    assert verdict.correction is not None
    return verdict.correction


# Revision script per flagged sentence: resubmitting the original text fails
# the re-check, the oracle's own correction passes it.
REVISION_SCRIPT = [
    (2, [CORPUS_ROWS[2].text, CORPUS_ROWS[2].text, _corrected(CORPUS_ROWS[2].text)]),
    (3, [_corrected(CORPUS_ROWS[3].text)]),
    (5, [CORPUS_ROWS[5].text] * 3),
    (6, [CORPUS_ROWS[6].text, _corrected(CORPUS_ROWS[6].text)]),
]

EXPECTED_END_STATES = {
    0: (SentenceStatus.COMPLETED, None),
    1: (SentenceStatus.COMPLETED, None),
    2: (SentenceStatus.COMPLETED, 3),
    3: (SentenceStatus.COMPLETED, 1),
    4: (SentenceStatus.COMPLETED, None),
    5: (SentenceStatus.UNRESOLVED, None),
    6: (SentenceStatus.COMPLETED, 2),
    7: (SentenceStatus.COMPLETED, None),
}


def _recording_ids():
    issued = []
    counter = itertools.count(1)

    def factory():
        value = f"id{next(counter):04d}"
        issued.append(value)
        return value

    return issued, factory


def _fresh_runtime(id_factory):
    config = AppConfig(
        http=HttpConfig(auth_secret="test-secret"),
        store=StoreConfig(engine="memory"),
        backends=(
            BackendDescriptor(
                backend_id="oracle", kind=TransportKind.ORACLE, default_model="rules-v1"
            ),
        ),
    )
    runtime = build_runtime(config, clock=lambda: FIXED_TIME, id_factory=id_factory)
    for worker in runtime.workers:
        if hasattr(worker, "analysis_clock"):
            worker.analysis_clock = lambda: 0.0
    return runtime


class _KillOnce:
    """Fault hook that raises at the nth visit to one point, once ever."""

    def __init__(self, point: str, nth: int):
        self.point = point
        self.nth = nth
        self.seen = 0
        self.fired = False

    def __call__(self, point: str) -> None:
        if self.fired or point != self.point:
            return
        self.seen += 1
        if self.seen == self.nth:
            self.fired = True
            raise WorkerKilled(f"{self.point} #{self.nth}")


def _settle(workers):
    """Step every worker until a full pass moves nothing and nothing dies."""
    for _ in range(500):
        moved = 0
        killed = False
        for worker in workers:
            try:
                moved += worker.step()
            except WorkerKilled:
                killed = True
        if moved == 0 and not killed:
            return
    raise AssertionError("pipeline never settled")


def _drain_events(hub, user_id):
    subscription = hub.connect(user_id)
    events = []
    while (event := subscription.get(timeout=0)) is not None:
        events.append(event)
    subscription.close()
    return events


def _event_key(event):
    return (
        event.kind.value,
        event.correlation_id,
        event.session_id,
        event.sentence_index,
        event.body,
        event.error,
    )


def _run_pipeline(kill=None):
    """Drive the scripted learner through the bus; returns the terminal state.

    ``kill`` is (worker kind, fault point, nth occurrence) or None. Crashes
    land between poll and commit, so the killed message is redelivered; the
    snapshot must come out the same either way.
    """
    issued, id_factory = _recording_ids()
    runtime = _fresh_runtime(id_factory)
    if kill is not None:
        kind, point, nth = kill
        victims = [w for w in runtime.workers if isinstance(w, kind)]
        assert len(victims) == 1
        victims[0].fault = _KillOnce(point, nth)

    session = runtime.service.start_document(OWNER, DOCUMENT, CONFIG)
    _settle(runtime.workers)
    for index, revisions in REVISION_SCRIPT:
        for text in revisions:
            runtime.service.submit_revision(session.id, index, text)
            _settle(runtime.workers)
    report_id = runtime.service.request_report(TEACHER, {"user_ids": [OWNER]})
    _settle(runtime.workers)

    store = runtime.store
    telemetry = [
        record
        for record in (store.telemetry_by_correlation(i) for i in issued)
        if record is not None
    ]
    # Events may be duplicated by a crash after dispatch (at-least-once);
    # clients dedup on correlation id, so the comparison does too.
    events = {
        key
        for user in (OWNER, TEACHER)
        for key in map(_event_key, _drain_events(runtime.hub, user))
    }
    return {
        "session": store.load_session(session.id).to_dict(),
        "issued": list(issued),
        "telemetry": telemetry,
        "processed": [i for i in issued if store.is_processed(i)],
        "report": store.load_report(report_id),
        "events": events,
    }


def _run_direct():
    """The same script without the bus: ladder plus gateway, nothing else."""
    _, id_factory = _recording_ids()
    registry = BackendRegistry()
    registry.register(
        BackendDescriptor(
            backend_id="oracle", kind=TransportKind.ORACLE, default_model="rules-v1"
        )
    )
    handle = registry.resolve("oracle")
    session = ladder.start_session(
        OWNER, DOCUMENT, CONFIG, clock=lambda: FIXED_TIME, id_factory=id_factory
    )

    def check(spec):
        request = AnalysisRequest(
            correlation_id="direct",
            sentence=spec.text,
            level=spec.level,
            config=CONFIG,
            tracked_category=spec.tracked_category,
        )
        response = analyze(
            handle, request, clock=lambda: 0.0, wall_clock=lambda: FIXED_TIME
        )
        ladder.apply_verdict(
            session, spec.sentence_index, response.verdict, clock=lambda: FIXED_TIME
        )

    for record in session.sentences:
        check(ladder.begin_analysis(session, record.unit.index, clock=lambda: FIXED_TIME))
    for index, revisions in REVISION_SCRIPT:
        for text in revisions:
            check(ladder.submit_revision(session, index, text, clock=lambda: FIXED_TIME))
    return session


def _assert_expected_end_states(session_dict):
    for index, (status, used) in EXPECTED_END_STATES.items():
        sentence = session_dict["sentences"][index]
        assert sentence["status"] == status.value, index
        assert sentence["hint_level_used"] == used, index


def test_pipeline_matches_direct_assessment(capsys, monkeypatch, tmp_path):
    with _criterion(
        capsys,
        "bus pipeline equals direct assessment; corpus tally 4/4/0/0 (offline, <10s)",
    ):
        monkeypatch.setattr(
            socket,
            "socket",
            lambda *a, **k: pytest.fail("network use is forbidden here"),
        )
        started = time.monotonic()
        assert FLAGGED == [2, 3, 5, 6]

        snapshot = _run_pipeline()
        direct = _run_direct()
        assert snapshot["session"] == direct.to_dict()
        _assert_expected_end_states(snapshot["session"])

        analyses = 8 + sum(len(r) for _, r in REVISION_SCRIPT)
        assert len(snapshot["telemetry"]) == analyses
        assert all(t.outcome == "ok" for t in snapshot["telemetry"])

        out_dir = tmp_path / "bench"
        result = CliRunner().invoke(
            cli_main, ["bench", "--backend", "oracle", "--out", str(out_dir)]
        )
        assert result.exit_code == 0, result.output
        assert "tp=4 fp=0 tn=4 fn=0" in result.output
        accuracy = (out_dir / "accuracy.csv").read_text(encoding="utf-8")
        assert "oracle,rules-v1,4,0,4,0,1.000000" in accuracy

        assert time.monotonic() - started < 10.0


KILL_TARGETS = (ModelWorker, ResponseWorker, ExportWorker, PushWorker)
KILL_POINTS = ("after_poll", "before_commit")


def test_crash_replay_converges(capsys):
    with _criterion(
        capsys, "crash replay converges to the uninterrupted state, 100 kill points"
    ):
        baseline = _run_pipeline()
        _assert_expected_end_states(baseline["session"])
        assert baseline["report"]
        assert baseline["events"]
        assert baseline["processed"]

        plans = [
            (target, point, 1) for target in KILL_TARGETS for point in KILL_POINTS
        ]
        rng = random.Random(0xACCE55)
        while len(plans) < 100:
            plans.append(
                (rng.choice(KILL_TARGETS), rng.choice(KILL_POINTS), rng.randint(1, 8))
            )
        for plan in plans:
            snapshot = _run_pipeline(kill=plan)
            label = (plan[0].__name__, plan[1], plan[2])
            assert snapshot["issued"] == baseline["issued"], label
            assert snapshot["session"] == baseline["session"], label
            assert snapshot["telemetry"] == baseline["telemetry"], label
            assert snapshot["processed"] == baseline["processed"], label
            assert snapshot["report"] == baseline["report"], label
            assert snapshot["events"] == baseline["events"], label


# --- 5. latency statistics ---------------------------------------------------


def _brute_force_stats(samples):
    ordered = sorted(samples)
    n = len(ordered)
    mean = sum(ordered) / n
    stddev = (
        math.sqrt(sum((value - mean) ** 2 for value in ordered) / (n - 1))
        if n > 1
        else 0.0
    )

    def percentile(p):
        k = (n - 1) * p / 100.0
        lower, upper = math.floor(k), math.ceil(k)
        if lower == upper:
            return ordered[lower]
        return ordered[lower] + (ordered[upper] - ordered[lower]) * (k - lower)

    return mean, stddev, percentile(25), percentile(50), percentile(75)


def test_latency_statistics_match_brute_force(capsys):
    with _criterion(
        capsys, "latency stats match a brute-force oracle on 1000 sample sets"
    ):
        fixed = latency_stats([100.0, 200.0, 300.0, 400.0])
        assert fixed.mean_ms == pytest.approx(250.0)
        assert fixed.stddev_ms == pytest.approx(math.sqrt(50000.0 / 3.0), rel=1e-9)
        assert (fixed.p25_ms, fixed.p50_ms, fixed.p75_ms) == (175.0, 250.0, 325.0)

        rng = random.Random(987654321)
        sizes = [1, 10000] + [
            min(10000, max(1, round(10 ** rng.uniform(0.0, 4.0))))
            for _ in range(998)
        ]
        for size in sizes:
            samples = [rng.uniform(0.1, 5000.0) for _ in range(size)]
            got = latency_stats(samples)
            mean, stddev, p25, p50, p75 = _brute_force_stats(samples)
            assert got.n == size
            assert got.mean_ms == pytest.approx(mean, rel=1e-9)
            assert got.stddev_ms == pytest.approx(stddev, rel=1e-9, abs=1e-12)
            assert got.p25_ms == pytest.approx(p25, rel=1e-9)
            assert got.p50_ms == pytest.approx(p50, rel=1e-9)
            assert got.p75_ms == pytest.approx(p75, rel=1e-9)


# --- 6. golden report file ---------------------------------------------------


def test_report_matches_golden_file_and_reparses(capsys):
    with _criterion(
        capsys, "session report is byte-identical to the golden CSV and re-parses"
    ):
        from test_reports import GOLDEN, build_golden_store

        store, session = build_golden_store()
        report_id, _ = write_csv_report(
            store, ReportFilter(session_ids=(session.id,)), report_id="acceptance"
        )
        assert store.load_report(report_id) == GOLDEN.read_bytes()

        # Hostile cell content must survive a round trip through the writer.
        nasty = 'She said "yes, please",\nthen left.'
        store2 = MemoryStore()
        hostile = ladder.start_session(
            owner=OWNER,
            document="Second is Online games.",
            model_config=CONFIG,
            clock=lambda: FIXED_TIME,
            id_factory=lambda: "sess-x",
        )
        spec = ladder.begin_analysis(hostile, 0, clock=lambda: FIXED_TIME)
        verdict = oracle_check(spec.text, spec.level)
        ladder.apply_verdict(hostile, 0, verdict, clock=lambda: FIXED_TIME)
        ladder.submit_revision(hostile, 0, nasty, clock=lambda: FIXED_TIME)
        store2.save_session(hostile)
        report_id_2, _ = write_csv_report(
            store2, ReportFilter(session_ids=(hostile.id,)), report_id="hostile"
        )
        raw = store2.load_report(report_id_2).decode("utf-8")
        rows = list(csv.reader(io.StringIO(raw)))
        assert any(nasty in row for row in rows[1:])
        assert all(len(row) == len(rows[0]) for row in rows[1:])


# --- 7. feedback rubric ------------------------------------------------------


def test_rubric_judges_oracle_transcripts_usable(capsys):
    with _criterion(
        capsys, "oracle transcripts rate usable; each single mutation flips the rubric"
    ):
        registry = BackendRegistry()
        registry.register(
            BackendDescriptor(
                backend_id="oracle", kind=TransportKind.ORACLE, default_model="rules-v1"
            )
        )
        handle = registry.resolve("oracle")
        report = run_benchmark(
            CORPUS_ROWS, [(handle, "rules-v1")], clock=lambda: 0.0
        ).backends[0]

        flagged = [o for o in report.outcomes if o.predicted_error]
        assert len(flagged) == 4
        by_id = {row.id: row.text for row in CORPUS_ROWS}
        for outcome in flagged:
            result = evaluate_feedback_transcript(
                outcome.transcript, by_id[outcome.sentence_id]
            )
            assert result.usable, outcome.sentence_id

        sample = flagged[0]
        transcript = list(sample.transcript)
        final_text = by_id[sample.sentence_id]

        switched = list(transcript)
        other = (
            ErrorCategory.TENSE
            if transcript[1].category is not ErrorCategory.TENSE
            else ErrorCategory.ARTICLE
        )
        switched[1] = dataclasses.replace(transcript[1], category=other)
        result = evaluate_feedback_transcript(switched, final_text)
        assert not result.consistency and not result.usable

        gapped = [transcript[0]] + transcript[2:]
        result = evaluate_feedback_transcript(gapped, final_text)
        assert not result.gradation and not result.usable

        stripped = list(transcript)
        stripped[-1] = dataclasses.replace(
            transcript[-1], correction=None, explanation=None
        )
        result = evaluate_feedback_transcript(stripped, final_text)
        assert not result.resolution and not result.usable
