"""Parse free-form model replies into normalized verdicts.

Parsing is total: any input string either yields a valid ``Verdict`` or
raises ``MalformedReply``. Recoverable sloppiness (code fences, prose around
the JSON, string booleans, unknown categories, out-of-range spans) is
normalized away; structural problems (no JSON object, missing has_error, an
error verdict without a hint, a level-4 error verdict without a correction)
are malformed.
"""

from __future__ import annotations

import json
from typing import Any

from writecoach.core.ladder import MAX_HINT_LEVEL
from writecoach.gateway.errors import MalformedReply
from writecoach.gateway.verdict import ErrorCategory, Verdict

_TRUE_WORDS = frozenset({"true", "yes", "y", "1"})
_FALSE_WORDS = frozenset({"false", "no", "n", "0"})


def _extract_object(raw: str) -> dict[str, Any]:
    """Find and decode the first balanced JSON object in the reply."""
    depth = 0
    start = -1
    in_string = False
    escaped = False
    for i, ch in enumerate(raw):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"' and depth > 0:
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}" and depth > 0:
            depth -= 1
            if depth == 0:
                candidate = raw[start : i + 1]
                try:
                    decoded = json.loads(candidate)
                except json.JSONDecodeError as exc:
                    raise MalformedReply(f"reply JSON does not decode: {exc}") from exc
                if not isinstance(decoded, dict):
                    raise MalformedReply("reply JSON is not an object")
                return decoded
    raise MalformedReply("reply contains no JSON object")


def _coerce_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        word = value.strip().lower()
        if word in _TRUE_WORDS:
            return True
        if word in _FALSE_WORDS:
            return False
    raise MalformedReply(f"has_error value {value!r} is not a boolean")


def _coerce_int(value: Any) -> int | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            return None
    return None


def _clean_text(value: Any) -> str | None:
    if isinstance(value, str) and value.strip():
        return value.strip()
    return None


def parse_model_reply(raw: str, requested_level: int, sentence: str | None = None) -> Verdict:
    """Turn a raw model reply into a Verdict at the requested level.

    The verdict's level is always the requested level (the ladder decides
    levels, not the model). ``sentence`` enables span bounds checking; spans
    that fail it are dropped rather than rejected.
    """
    if not 1 <= requested_level <= MAX_HINT_LEVEL:
        raise ValueError(f"requested level {requested_level} outside 1..{MAX_HINT_LEVEL}")
    data = _extract_object(raw)
    if "has_error" not in data:
        raise MalformedReply("reply lacks has_error")
    has_error = _coerce_bool(data["has_error"])

    if not has_error:
        return Verdict(has_error=False, level=requested_level)

    hint = _clean_text(data.get("hint"))
    if hint is None:
        raise MalformedReply("error verdict lacks a hint")
    correction = _clean_text(data.get("correction"))
    if requested_level == MAX_HINT_LEVEL and correction is None:
        raise MalformedReply("level-4 error verdict lacks a correction")
    if requested_level < MAX_HINT_LEVEL:
        correction = None

    span = None
    start = _coerce_int(data.get("span_start"))
    end = _coerce_int(data.get("span_end"))
    if start is not None and end is not None:
        if 0 <= start < end and (sentence is None or end <= len(sentence)):
            span = (start, end)

    return Verdict(
        has_error=True,
        level=requested_level,
        category=ErrorCategory.coerce(_clean_text(data.get("category"))),
        span=span,
        hint=hint,
        correction=correction,
        explanation=_clean_text(data.get("explanation")),
    )
