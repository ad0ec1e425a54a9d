"""Labelled sentence corpora for benchmarking.

Corpus files are CSV with header ``id,sentence,gold_has_error,category,span``;
category and span are optional per row, span is ``start:end``. A small
bundled corpus ships with the package so the bench command works offline out
of the box.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

_HEADER = ("id", "sentence", "gold_has_error", "category", "span")
_BOOL = {"true": True, "false": False}


@dataclass(frozen=True)
class LabeledSentence:
    id: str
    text: str
    gold_has_error: bool
    category: str | None = None
    span: tuple[int, int] | None = None


@dataclass(frozen=True)
class CorpusIssue:
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


class CorpusFormatError(ValueError):
    def __init__(self, issues: list[CorpusIssue]):
        self.issues = issues
        super().__init__("; ".join(str(issue) for issue in issues[:5]))


def bundled_corpus_path() -> Path:
    return Path(str(resources.files("writecoach.data").joinpath("corpus_sample.csv")))


def _parse_span(raw: str, sentence: str) -> tuple[int, int]:
    start_text, _, end_text = raw.partition(":")
    start, end = int(start_text), int(end_text)
    if not 0 <= start < end <= len(sentence):
        raise ValueError(f"span {start}:{end} outside sentence of length {len(sentence)}")
    return start, end


def validate_corpus(path: str | Path) -> tuple[list[LabeledSentence], list[CorpusIssue]]:
    """Read a corpus, collecting per-line diagnostics instead of failing fast."""
    sentences: list[LabeledSentence] = []
    issues: list[CorpusIssue] = []
    seen_ids: set[str] = set()
    try:
        handle = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        return [], [CorpusIssue(line=0, message=str(exc))]
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            return [], [CorpusIssue(line=0, message="file is empty")]
        if tuple(header) != _HEADER:
            issues.append(
                CorpusIssue(line=1, message=f"header must be {','.join(_HEADER)}")
            )
            return [], issues
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(_HEADER):
                issues.append(
                    CorpusIssue(line=line_no, message=f"expected {len(_HEADER)} fields, got {len(row)}")
                )
                continue
            sentence_id, text, flag_text, category, span_text = (field.strip() for field in row)
            problems = []
            if not sentence_id:
                problems.append("empty id")
            elif sentence_id in seen_ids:
                problems.append(f"duplicate id {sentence_id!r}")
            if not text:
                problems.append("empty sentence")
            flag = _BOOL.get(flag_text.lower())
            if flag is None:
                problems.append(f"gold_has_error must be true or false, got {flag_text!r}")
            span = None
            if span_text:
                try:
                    span = _parse_span(span_text, text)
                except ValueError as exc:
                    problems.append(str(exc))
            if flag is False and category:
                problems.append("category given for a sentence labelled error-free")
            if problems:
                issues.extend(CorpusIssue(line=line_no, message=p) for p in problems)
                continue
            seen_ids.add(sentence_id)
            sentences.append(
                LabeledSentence(
                    id=sentence_id,
                    text=text,
                    gold_has_error=bool(flag),
                    category=category or None,
                    span=span,
                )
            )
    if not sentences and not issues:
        issues.append(CorpusIssue(line=1, message="corpus has no rows"))
    return sentences, issues


def load_corpus(path: str | Path) -> list[LabeledSentence]:
    """Read a corpus or raise with every diagnostic collected."""
    sentences, issues = validate_corpus(path)
    if issues:
        raise CorpusFormatError(issues)
    return sentences
