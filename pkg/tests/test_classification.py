import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from writecoach.analytics.classification import (
    ClassificationCounts,
    LengthMismatch,
    accuracy,
    classify_outcomes,
    false_negative_rate,
    false_positive_rate,
    precision_recall_f1,
)


def test_classify_outcomes():
    predicted = [True, True, False, False, True]
    gold = [True, False, False, True, True]
    counts = classify_outcomes(predicted, gold)
    assert counts == ClassificationCounts(tp=2, fp=1, tn=1, fn=1)
    assert counts.total == 5


def test_classify_length_mismatch():
    with pytest.raises(LengthMismatch):
        classify_outcomes([True], [True, False])


def test_counts_add():
    a = ClassificationCounts(tp=1, fp=2, tn=3, fn=4)
    b = ClassificationCounts(tp=10, fp=20, tn=30, fn=40)
    assert a + b == ClassificationCounts(tp=11, fp=22, tn=33, fn=44)


# Hand-checked rows, tolerance one part in a thousand.
FROZEN_ROWS = [
    (ClassificationCounts(tp=87, fp=46, tn=53, fn=14), 0.654, 0.861, 0.743),
    (ClassificationCounts(tp=82, fp=41, tn=59, fn=18), 0.667, 0.820, 0.735),
]


@pytest.mark.parametrize("counts,p,r,f1", FROZEN_ROWS)
def test_frozen_metric_rows(counts, p, r, f1):
    triple = precision_recall_f1(counts)
    assert triple.precision == pytest.approx(p, abs=1e-3)
    assert triple.recall == pytest.approx(r, abs=1e-3)
    assert triple.f1 == pytest.approx(f1, abs=1e-3)


def test_perfect_and_degenerate_cases():
    perfect = precision_recall_f1(ClassificationCounts(tp=4, fp=0, tn=4, fn=0))
    assert (perfect.precision, perfect.recall, perfect.f1) == (1.0, 1.0, 1.0)

    nothing = precision_recall_f1(ClassificationCounts(tp=0, fp=0, tn=5, fn=0))
    assert (nothing.precision, nothing.recall, nothing.f1) == (0.0, 0.0, 0.0)

    all_wrong = precision_recall_f1(ClassificationCounts(tp=0, fp=3, tn=0, fn=2))
    assert (all_wrong.precision, all_wrong.recall, all_wrong.f1) == (0.0, 0.0, 0.0)


def test_rates():
    counts = ClassificationCounts(tp=2, fp=1, tn=3, fn=4)
    assert accuracy(counts) == pytest.approx(0.5)
    assert false_positive_rate(counts) == pytest.approx(1 / 4)
    assert false_negative_rate(counts) == pytest.approx(4 / 6)

    empty = ClassificationCounts()
    assert accuracy(empty) == 0.0
    assert false_positive_rate(empty) == 0.0
    assert false_negative_rate(empty) == 0.0


counts_strategy = st.builds(
    ClassificationCounts,
    tp=st.integers(0, 200),
    fp=st.integers(0, 200),
    tn=st.integers(0, 200),
    fn=st.integers(0, 200),
)


@given(counts_strategy)
def test_metrics_match_longhand(counts):
    triple = precision_recall_f1(counts)
    p = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    r = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    assert math.isclose(triple.precision, p, rel_tol=1e-12, abs_tol=1e-12)
    assert math.isclose(triple.recall, r, rel_tol=1e-12, abs_tol=1e-12)
    assert math.isclose(triple.f1, f1, rel_tol=1e-12, abs_tol=1e-12)
    assert 0.0 <= triple.precision <= 1.0
    assert 0.0 <= triple.recall <= 1.0
    assert 0.0 <= triple.f1 <= 1.0


@given(st.lists(st.tuples(st.booleans(), st.booleans()), max_size=60))
def test_classification_partitions_the_outcomes(pairs):
    predicted = [p for p, _ in pairs]
    gold = [g for _, g in pairs]
    counts = classify_outcomes(predicted, gold)
    assert counts.total == len(pairs)
    assert counts.tp == sum(1 for p, g in pairs if p and g)
    assert counts.fp == sum(1 for p, g in pairs if p and not g)
    assert counts.tn == sum(1 for p, g in pairs if not p and not g)
    assert counts.fn == sum(1 for p, g in pairs if not p and g)
