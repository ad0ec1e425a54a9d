"""Deterministic rule-based analysis backend.

The oracle checks a sentence against an ordered table of regex rules; the
first match wins. It produces the same graduated feedback shape as a model
backend, which makes it the reference implementation for tests, benchmarks,
and offline runs: same sentence, same level, same table, same verdict,
every time.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

from writecoach.core.ladder import MAX_HINT_LEVEL
from writecoach.gateway.verdict import ErrorCategory, Verdict

_HINT_LEVELS = (1, 2, 3)


class RuleTableError(ValueError):
    pass


@dataclass(frozen=True)
class OracleRule:
    id: str
    category: ErrorCategory
    pattern: re.Pattern[str]
    replacement: str
    hints: dict[int, str]
    explanation: str

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "OracleRule":
        try:
            pattern = re.compile(data["pattern"])
        except re.error as exc:
            raise RuleTableError(f"rule {data.get('id')!r}: bad pattern: {exc}") from exc
        hints = {int(level): text for level, text in data["hints"].items()}
        if sorted(hints) != list(_HINT_LEVELS):
            raise RuleTableError(f"rule {data['id']!r}: hints must cover levels 1..3")
        return cls(
            id=data["id"],
            category=ErrorCategory(data["category"]),
            pattern=pattern,
            replacement=data["replacement"],
            hints=hints,
            explanation=data["explanation"],
        )


@dataclass(frozen=True)
class RuleTable:
    version: str
    rules: tuple[OracleRule, ...]

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RuleTable":
        if "version" not in data or "rules" not in data:
            raise RuleTableError("rule table needs 'version' and 'rules'")
        rules = tuple(OracleRule.from_dict(r) for r in data["rules"])
        ids = [r.id for r in rules]
        if len(set(ids)) != len(ids):
            raise RuleTableError("rule ids must be unique")
        return cls(version=str(data["version"]), rules=rules)

    @classmethod
    def load(cls, path: str | Path) -> "RuleTable":
        with open(path, encoding="utf-8") as handle:
            return cls.from_dict(json.load(handle))


@lru_cache(maxsize=1)
def default_rule_table() -> RuleTable:
    """The rule table bundled with the package."""
    text = resources.files("writecoach.data").joinpath("rules.json").read_text("utf-8")
    return RuleTable.from_dict(json.loads(text))


def correct_with_rule(rule: OracleRule, sentence: str) -> str:
    """Apply a rule's replacement to the first match in the sentence."""
    return rule.pattern.sub(rule.replacement, sentence, count=1)


def oracle_check(
    sentence: str,
    level: int,
    table: RuleTable | None = None,
    tracked_category: str | None = None,
) -> Verdict:
    """Check one sentence at one hint level against the rule table.

    With ``tracked_category`` set only rules of that category are consulted,
    mirroring a revision re-check that cares about one previously reported
    error. Spans appear from level 2 up; the correction only at level 4.
    """
    if not 1 <= level <= MAX_HINT_LEVEL:
        raise ValueError(f"level {level} outside 1..{MAX_HINT_LEVEL}")
    if table is None:
        table = default_rule_table()

    for rule in table.rules:
        if tracked_category is not None and rule.category.value != tracked_category:
            continue
        match = rule.pattern.search(sentence)
        if match is None:
            continue
        span = (match.start(), match.end()) if level >= 2 else None
        if level < MAX_HINT_LEVEL:
            hint = rule.hints[level].format(match=match.group(0))
            return Verdict(
                has_error=True,
                level=level,
                category=rule.category,
                span=span,
                hint=hint,
                correction=None,
                explanation=None,
            )
        correction = correct_with_rule(rule, sentence)
        return Verdict(
            has_error=True,
            level=level,
            category=rule.category,
            span=span,
            hint=f"Here is a suggested correction: '{correction}'",
            correction=correction,
            explanation=rule.explanation,
        )
    return Verdict(has_error=False, level=level)
