"""Latency distribution summary.

Percentiles use linear interpolation between closest ranks with inclusive
endpoints: the rank of percentile p in n sorted samples is k = (n-1) * p/100,
and the value is interpolated between floor(k) and ceil(k). Spread is the
sample standard deviation (n-1 denominator); a single sample has spread 0.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Sequence


class EmptySamples(ValueError):
    pass


@dataclass(frozen=True)
class LatencyStats:
    n: int
    mean_ms: float
    stddev_ms: float
    p25_ms: float
    p50_ms: float
    p75_ms: float


def _percentile(ordered: Sequence[float], p: float) -> float:
    k = (len(ordered) - 1) * p / 100.0
    lower = math.floor(k)
    upper = math.ceil(k)
    if lower == upper:
        return ordered[lower]
    return ordered[lower] + (ordered[upper] - ordered[lower]) * (k - lower)


def latency_stats(samples: Sequence[float]) -> LatencyStats:
    """Summarize duration samples in milliseconds."""
    if not samples:
        raise EmptySamples("no latency samples")
    ordered = sorted(samples)
    mean = statistics.fmean(ordered)
    stddev = statistics.stdev(ordered) if len(ordered) > 1 else 0.0
    return LatencyStats(
        n=len(ordered),
        mean_ms=mean,
        stddev_ms=stddev,
        p25_ms=_percentile(ordered, 25),
        p50_ms=_percentile(ordered, 50),
        p75_ms=_percentile(ordered, 75),
    )
