"""Two-pass corpus filter.

Pass one builds a word-frequency lexicon over the whole candidate corpus.
Pass two applies a fixed cascade of rules to each line and keeps only the
lines that pass all of them:

1. no digits (ASCII or Arabic-Indic)
2. no citation marker from the configurable blocklist
3. no floating character (a token of length one)
4. word count within [min_words, max_words]
5. codepoint count within [min_chars, max_chars]
6. at most max_hapax tokens that occur exactly once in the whole corpus

The first failing rule decides the verdict, so drop reports are stable and
comparable across runs.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

from .normalize import CandidateLine

_DIGIT = re.compile(r"\d")


class Reason(str, Enum):
    """Why a line was kept or dropped."""

    KEPT = "kept"
    TOO_FEW_WORDS = "too_few_words"
    TOO_MANY_WORDS = "too_many_words"
    TOO_SHORT = "too_short"
    TOO_LONG = "too_long"
    CONTAINS_DIGIT = "contains_digit"
    FLOATING_CHAR = "floating_char"
    CITATION = "citation"
    TOO_MANY_UNIQUE = "too_many_unique"


# Bracket-like markers that would indicate citation or reference debris.
# The default normalizer whitelist strips all of these beforehand, so under
# default config this rule never fires; it exists for custom whitelists.
DEFAULT_CITATION_MARKERS: tuple[str, ...] = (
    "[", "]", "(", ")", "{", "}", "«", "»", "﴾", "﴿",
)


@dataclass(frozen=True)
class FilterConfig:
    min_words: int = 3
    max_words: int = 20
    min_chars: int = 15
    max_chars: int = 128
    max_hapax: int = 2
    citation_markers: tuple[str, ...] = DEFAULT_CITATION_MARKERS

    def __post_init__(self) -> None:
        if self.min_words < 1 or self.min_words > self.max_words:
            raise ValueError("word bounds must satisfy 1 <= min <= max")
        if self.min_chars < 1 or self.min_chars > self.max_chars:
            raise ValueError("char bounds must satisfy 1 <= min <= max")
        if self.max_hapax < 0:
            raise ValueError("max_hapax must be >= 0")

    def to_json(self) -> str:
        data = {
            "min_words": self.min_words,
            "max_words": self.max_words,
            "min_chars": self.min_chars,
            "max_chars": self.max_chars,
            "max_hapax": self.max_hapax,
            "citation_markers": list(self.citation_markers),
        }
        return json.dumps(data, ensure_ascii=True, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FilterConfig":
        data = json.loads(text)
        return cls(
            min_words=data.get("min_words", 3),
            max_words=data.get("max_words", 20),
            min_chars=data.get("min_chars", 15),
            max_chars=data.get("max_chars", 128),
            max_hapax=data.get("max_hapax", 2),
            citation_markers=tuple(
                data.get("citation_markers", DEFAULT_CITATION_MARKERS)
            ),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "FilterConfig":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class Verdict:
    keep: bool
    reason: Reason

    def __post_init__(self) -> None:
        if self.keep != (self.reason is Reason.KEPT):
            raise ValueError("keep flag must match reason")


@dataclass(frozen=True)
class CleanLine:
    """A line that passed every filter rule."""

    text: str
    source_article: str = ""


@dataclass
class Lexicon:
    """Word -> occurrence count over the whole candidate corpus."""

    counts: Counter = field(default_factory=Counter)

    def add_line(self, text: str) -> None:
        self.counts.update(text.split())

    def merge(self, other: "Lexicon") -> "Lexicon":
        self.counts.update(other.counts)
        return self

    def is_hapax(self, word: str) -> bool:
        return self.counts.get(word, 0) <= 1

    def __len__(self) -> int:
        return len(self.counts)


@dataclass
class DropReport:
    kept: int = 0
    dropped: Counter = field(default_factory=Counter)

    def add(self, verdict: Verdict) -> None:
        if verdict.keep:
            self.kept += 1
        else:
            self.dropped[verdict.reason] += 1

    @property
    def total(self) -> int:
        return self.kept + sum(self.dropped.values())

    def rows(self) -> list[tuple[str, int]]:
        out = [(Reason.KEPT.value, self.kept)]
        out.extend(
            (reason.value, self.dropped[reason])
            for reason in Reason
            if reason is not Reason.KEPT and self.dropped[reason]
        )
        return out

    def to_tsv(self) -> str:
        return "".join(f"{name}\t{count}\n" for name, count in self.rows())


def _text_of(line: CandidateLine | CleanLine | str) -> str:
    return line if isinstance(line, str) else line.text


def build_lexicon(lines: Iterable[CandidateLine | str]) -> Lexicon:
    """First pass: exact token counts across all lines."""
    lexicon = Lexicon()
    for line in lines:
        lexicon.add_line(_text_of(line))
    return lexicon


def check_line(
    line: CandidateLine | str,
    lexicon: Lexicon,
    config: FilterConfig = FilterConfig(),
) -> Verdict:
    """Apply the rule cascade and return the first failure, or a keep."""
    text = _text_of(line)
    if _DIGIT.search(text):
        return Verdict(False, Reason.CONTAINS_DIGIT)
    for marker in config.citation_markers:
        if marker in text:
            return Verdict(False, Reason.CITATION)
    words = text.split()
    if any(len(word) == 1 for word in words):
        return Verdict(False, Reason.FLOATING_CHAR)
    if len(words) < config.min_words:
        return Verdict(False, Reason.TOO_FEW_WORDS)
    if len(words) > config.max_words:
        return Verdict(False, Reason.TOO_MANY_WORDS)
    if len(text) < config.min_chars:
        return Verdict(False, Reason.TOO_SHORT)
    if len(text) > config.max_chars:
        return Verdict(False, Reason.TOO_LONG)
    hapax = sum(1 for word in words if lexicon.is_hapax(word))
    if hapax > config.max_hapax:
        return Verdict(False, Reason.TOO_MANY_UNIQUE)
    return Verdict(True, Reason.KEPT)


def iter_filtered(
    lines: Iterable[CandidateLine | str],
    lexicon: Lexicon,
    config: FilterConfig = FilterConfig(),
    report: DropReport | None = None,
) -> Iterator[CleanLine]:
    """Second pass: stream kept lines, tallying verdicts into report."""
    for line in lines:
        verdict = check_line(line, lexicon, config)
        if report is not None:
            report.add(verdict)
        if verdict.keep:
            source = "" if isinstance(line, str) else line.source_article
            yield CleanLine(_text_of(line), source)


def filter_corpus(
    lines: Iterable[CandidateLine | str],
    config: FilterConfig = FilterConfig(),
    lexicon: Lexicon | None = None,
) -> tuple[list[CleanLine], DropReport]:
    """Run both passes over an in-memory corpus.

    When lexicon is None the input is buffered so it can be read twice.
    Callers that must stay streaming should build the lexicon themselves
    (first file read) and drive iter_filtered (second read).
    """
    if lexicon is None:
        lines = list(lines)
        lexicon = build_lexicon(lines)
    report = DropReport()
    kept = list(iter_filtered(lines, lexicon, config, report))
    return kept, report
