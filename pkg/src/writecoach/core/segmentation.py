"""Deterministic sentence segmentation with exact source offsets.

The splitter is intentionally simple: a terminator run (".", "?", "!") ends a
sentence when it is followed by whitespace and an uppercase letter, or by the
end of the text. A small abbreviation list suppresses false splits. Offsets
are preserved so every sentence can be traced back to its place in the
original document.
"""

from __future__ import annotations

from dataclasses import dataclass

TERMINATORS = ".?!"

# Checked against the token ending at the period, after stripping any opening
# bracket or quote. Case-sensitive: "Mr." splits differently from "mr.".
ABBREVIATIONS = frozenset(
    {
        "e.g.",
        "i.e.",
        "etc.",
        "cf.",
        "vs.",
        "Mr.",
        "Mrs.",
        "Ms.",
        "Dr.",
        "Prof.",
        "St.",
    }
)

_OPENERS = "([{\"'“‘"


@dataclass(frozen=True)
class SentenceUnit:
    """One sentence of a document, with its half-open [start, end) char range."""

    index: int
    text: str
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end <= self.start:
            raise ValueError("char range must be non-empty and non-negative")
        if self.text != self.text.strip() or not self.text:
            raise ValueError("sentence text must be non-empty and trimmed")


def _token_ending_at(document: str, pos: int) -> str:
    """Return the whitespace-delimited token whose last char is document[pos]."""
    begin = pos
    while begin > 0 and not document[begin - 1].isspace():
        begin -= 1
    return document[begin : pos + 1].lstrip(_OPENERS)


def _is_boundary(document: str, run_end: int) -> bool:
    """True when the terminator run ending just before run_end closes a sentence."""
    n = len(document)
    if run_end >= n:
        return True
    if not document[run_end].isspace():
        return False
    look = run_end
    while look < n and document[look].isspace():
        look += 1
    if look >= n:
        return True
    return document[look].isupper()


def segment_text(document: str) -> list[SentenceUnit]:
    """Split a document into ordered sentence units.

    Whitespace between sentences belongs to no unit; every non-whitespace
    character of the document falls inside exactly one unit's range. An empty
    or all-whitespace document yields an empty list.
    """
    units: list[SentenceUnit] = []
    n = len(document)
    pos = 0
    start = -1
    while pos < n:
        ch = document[pos]
        if start < 0:
            if ch.isspace():
                pos += 1
                continue
            start = pos
        if ch in TERMINATORS:
            run_end = pos + 1
            while run_end < n and document[run_end] in TERMINATORS:
                run_end += 1
            sole_period = run_end - pos == 1 and ch == "."
            abbreviated = sole_period and _token_ending_at(document, pos) in ABBREVIATIONS
            if not abbreviated and _is_boundary(document, run_end):
                units.append(
                    SentenceUnit(
                        index=len(units),
                        text=document[start:run_end],
                        start=start,
                        end=run_end,
                    )
                )
                start = -1
            pos = run_end
        else:
            pos += 1
    if start >= 0:
        end = n
        while end > start and document[end - 1].isspace():
            end -= 1
        units.append(
            SentenceUnit(index=len(units), text=document[start:end], start=start, end=end)
        )
    return units
