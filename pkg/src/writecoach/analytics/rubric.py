"""Usability rubric for a feedback transcript.

A transcript is the ordered verdict sequence one sentence received. It is
judged on three criteria, and it is usable only when all three hold:

* consistency: every error verdict reports the same category;
* gradation: delivered levels step up one at a time and each step is more
  explicit than the last (a longer hint, a newly added span, or a newly
  added correction);
* resolution: the level-4 correction, when one was delivered, actually
  differs from the text it replaces and re-checks clean.

Human labels, when supplied, override the structural judgement per criterion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from writecoach.gateway.oracle import RuleTable, oracle_check
from writecoach.gateway.verdict import Verdict

CRITERIA = ("consistency", "gradation", "resolution")


class EmptyTranscript(ValueError):
    pass


class NonMonotoneLevels(ValueError):
    pass


@dataclass(frozen=True)
class RubricResult:
    consistency: bool
    gradation: bool
    resolution: bool

    @property
    def usable(self) -> bool:
        return self.consistency and self.gradation and self.resolution


def _more_explicit(earlier: Verdict, later: Verdict) -> bool:
    if later.span is not None and earlier.span is None:
        return True
    if later.correction is not None and earlier.correction is None:
        return True
    return len(later.hint or "") > len(earlier.hint or "")


def evaluate_feedback_transcript(
    transcript: Sequence[Verdict],
    final_text: str,
    oracle: RuleTable | None = None,
    human_labels: Mapping[str, bool] | None = None,
) -> RubricResult:
    """Score one sentence's feedback transcript against the rubric.

    ``final_text`` is the last learner text the feedback applied to, which a
    delivered correction must improve on. Verdict levels must be strictly
    increasing (that is a transcript integrity requirement, not a criterion).
    """
    if not transcript:
        raise EmptyTranscript("transcript has no verdicts")
    levels = [v.level for v in transcript]
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise NonMonotoneLevels(f"levels {levels} are not strictly increasing")

    flagged = [v for v in transcript if v.has_error]

    categories = {v.category for v in flagged}
    consistency = len(categories) <= 1

    flagged_levels = [v.level for v in flagged]
    consecutive = all(b == a + 1 for a, b in zip(flagged_levels, flagged_levels[1:]))
    escalating = all(
        _more_explicit(a, b) for a, b in zip(flagged, flagged[1:])
    )
    gradation = consecutive and escalating

    resolution = True
    final_verdict = flagged[-1] if flagged else None
    if final_verdict is not None and final_verdict.correction is not None:
        correction = final_verdict.correction
        recheck = oracle_check(correction, level=1, table=oracle)
        resolution = correction != final_text and not recheck.has_error
    elif flagged and flagged[-1].level == 4:
        # A level-4 error verdict without a correction resolved nothing.
        resolution = False

    computed = {
        "consistency": consistency,
        "gradation": gradation,
        "resolution": resolution,
    }
    if human_labels:
        for name in CRITERIA:
            if name in human_labels:
                computed[name] = bool(human_labels[name])
    return RubricResult(**computed)
