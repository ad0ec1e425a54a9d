"""Prompt construction for the graduated feedback ladder.

Each hint level gets its own instruction block; the reply format is the same
flat JSON object at every level so parsing stays uniform. The sentence under
review is embedded verbatim exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass

from writecoach.core.ladder import MAX_HINT_LEVEL
from writecoach.gateway.messages import AnalysisRequest
from writecoach.gateway.verdict import ErrorCategory

_SYSTEM = (
    "You are a writing tutor for English learners. You check one sentence at a "
    "time for a grammatical or usage error and respond with feedback at the "
    "requested explicitness level. Reply with exactly one JSON object and "
    "nothing else, using these fields: has_error (boolean), category (string), "
    "span_start (integer), span_end (integer), hint (string), correction "
    "(string), explanation (string). Omit a field when it does not apply. "
    "category must be one of: "
    + ", ".join(c.value for c in ErrorCategory)
    + ". span_start and span_end are character offsets into the sentence, "
    "half-open. If the sentence has no error, set has_error to false and omit "
    "every other field."
)

_LEVEL_INSTRUCTIONS = {
    1: (
        "Feedback level 1. If the sentence has an error, set hint to a short "
        "message saying only that something is wrong. Do not name the error, "
        "quote the faulty words, or reveal where it is. Do not include "
        "span_start, span_end, or correction."
    ),
    2: (
        "Feedback level 2. If the sentence has an error, set hint to one "
        "probing question that points the writer toward the kind of problem "
        "without stating it outright. Include span_start and span_end for the "
        "faulty words. Do not include correction."
    ),
    3: (
        "Feedback level 3. If the sentence has an error, set hint to a message "
        "that identifies the exact faulty words and names the kind of error. "
        "Include span_start and span_end. Do not include correction."
    ),
    4: (
        "Feedback level 4. If the sentence has an error, set correction to the "
        "full corrected sentence, set hint to a message presenting that "
        "suggestion, and set explanation to a brief explanation of the error. "
        "Include span_start and span_end."
    ),
}


@dataclass(frozen=True)
class PromptPayload:
    system: str
    user: str

    def messages(self) -> list[dict[str, str]]:
        return [
            {"role": "system", "content": self.system},
            {"role": "user", "content": self.user},
        ]


def build_prompt(request: AnalysisRequest) -> PromptPayload:
    """Render the instruction pair for one sentence at one level."""
    if not 1 <= request.level <= MAX_HINT_LEVEL:
        raise ValueError(f"level {request.level} outside 1..{MAX_HINT_LEVEL}")
    parts = [_LEVEL_INSTRUCTIONS[request.level]]
    if request.tracked_category:
        parts.append(
            "This sentence is a revision. Check only whether the previously "
            f"reported {request.tracked_category} error is fixed; ignore any "
            "other issue. If it is fixed, set has_error to false."
        )
    parts.append("Sentence to check:\n" + request.sentence)
    return PromptPayload(system=_SYSTEM, user="\n\n".join(parts))
