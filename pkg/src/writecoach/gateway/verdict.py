"""The normalized result of checking one sentence at one hint level."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

from writecoach.core.ladder import MAX_HINT_LEVEL


class ErrorCategory(str, Enum):
    AGREEMENT = "agreement"
    ARTICLE = "article"
    COMPARATIVE = "comparative"
    PREPOSITION = "preposition"
    WORD_ORDER = "word-order"
    TENSE = "tense"
    OTHER = "other"

    @classmethod
    def coerce(cls, value: str | None) -> "ErrorCategory":
        """Map free-form category text onto the closed set; unknown -> OTHER."""
        if value is None:
            return cls.OTHER
        try:
            return cls(value.strip().lower())
        except ValueError:
            return cls.OTHER


@dataclass(frozen=True)
class Verdict:
    """A backend's judgement of one sentence at one requested level.

    ``level`` always echoes the requested level. When ``has_error`` is false
    every feedback field is absent. When it is true, ``hint`` carries the
    feedback for that level and, at level 4 only, ``correction`` carries the
    full suggested sentence.
    """

    has_error: bool
    level: int
    category: ErrorCategory | None = None
    span: tuple[int, int] | None = None
    hint: str | None = None
    correction: str | None = None
    explanation: str | None = None

    def problem(self, sentence: str | None = None) -> str | None:
        """Describe the first invariant this verdict violates, or None."""
        if not 1 <= self.level <= MAX_HINT_LEVEL:
            return f"level {self.level} outside 1..{MAX_HINT_LEVEL}"
        if not self.has_error:
            for name in ("category", "span", "hint", "correction", "explanation"):
                if getattr(self, name) is not None:
                    return f"clean verdict carries {name}"
            return None
        if self.category is None:
            return "error verdict without a category"
        if not self.hint or not self.hint.strip():
            return "error verdict without a hint"
        if self.level == MAX_HINT_LEVEL and not self.correction:
            return "level-4 error verdict without a correction"
        if self.span is not None:
            start, end = self.span
            if start < 0 or end <= start:
                return f"span ({start}, {end}) is not a valid range"
            if sentence is not None and end > len(sentence):
                return f"span ({start}, {end}) exceeds sentence length {len(sentence)}"
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "has_error": self.has_error,
            "level": self.level,
            "category": self.category.value if self.category else None,
            "span": list(self.span) if self.span else None,
            "hint": self.hint,
            "correction": self.correction,
            "explanation": self.explanation,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Verdict":
        span = data.get("span")
        category = data.get("category")
        return cls(
            has_error=bool(data["has_error"]),
            level=int(data["level"]),
            category=ErrorCategory(category) if category else None,
            span=(int(span[0]), int(span[1])) if span else None,
            hint=data.get("hint"),
            correction=data.get("correction"),
            explanation=data.get("explanation"),
        )
