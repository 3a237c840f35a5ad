"""Normalization of raw Arabic article text into candidate corpus lines.

A raw article passes through a fixed sequence of transforms: lam-alef
ligatures are expanded to their letter pairs, diacritics are deleted,
character runs longer than two are squeezed, everything outside the
letter whitelist becomes a space, and whitespace is collapsed.  The
result is a stream of candidate lines containing only whitelist letters
and single spaces, ready for corpus filtering.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable

# Arabic letters: hamza block U+0621-U+063A plus feh..yeh U+0641-U+064A.
ARABIC_LETTERS = "".join(chr(c) for c in range(0x0621, 0x063B)) + "".join(
    chr(c) for c in range(0x0641, 0x064B)
)
DEFAULT_VALID_CHARS = ARABIC_LETTERS + " "

# Tashkeel U+064B-U+0652 plus the dagger alif.
DEFAULT_DIACRITICS = "".join(chr(c) for c in range(0x064B, 0x0653)) + "ٰ"

# Lam-alef presentation forms mapped back to their two-letter spellings.
DEFAULT_LIGATURES = {
    "ﻻ": "لا",  # lam + alef
    "ﻷ": "لأ",  # lam + alef w/ hamza above
    "ﻹ": "لإ",  # lam + alef w/ hamza below
    "ﻵ": "لآ",  # lam + alef madda
}

# Sentence terminators used when carving articles into lines: newline is
# handled separately; these are the Latin and Arabic-script full stops.
_FULL_STOPS = ".۔"


@dataclass(frozen=True)
class NormalizerConfig:
    """Character policy for the cleaning transforms.

    ``valid_chars`` is the closed alphabet of the whole toolchain: the
    injector and any downstream model vocabulary must use the same set.
    """

    valid_chars: str = DEFAULT_VALID_CHARS
    diacritics: str = DEFAULT_DIACRITICS
    ligatures: tuple[tuple[str, str], ...] = tuple(sorted(DEFAULT_LIGATURES.items()))
    max_repeat: int = 2

    def ligature_map(self) -> dict[str, str]:
        return dict(self.ligatures)

    def to_json(self) -> str:
        doc = {
            "valid_chars": self.valid_chars,
            "diacritics": self.diacritics,
            "ligatures": self.ligature_map(),
            "max_repeat": self.max_repeat,
        }
        # ensure_ascii keeps every non-ASCII codepoint escaped, so the file
        # is diffable and editor-encoding-proof.
        return json.dumps(doc, ensure_ascii=True, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NormalizerConfig":
        doc = json.loads(text)
        return cls(
            valid_chars=doc.get("valid_chars", DEFAULT_VALID_CHARS),
            diacritics=doc.get("diacritics", DEFAULT_DIACRITICS),
            ligatures=tuple(sorted(doc.get("ligatures", DEFAULT_LIGATURES).items())),
            max_repeat=int(doc.get("max_repeat", 2)),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "NormalizerConfig":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class RawArticle:
    """One input document as it arrives from a dump."""

    id: str
    text: str


@dataclass(frozen=True)
class CandidateLine:
    """A normalized line awaiting corpus-level filtering."""

    text: str
    source_article: str = ""


@lru_cache(maxsize=8)
def _compiled(config: NormalizerConfig):
    lig_table = {ord(k): v for k, v in config.ligatures}
    diac_table = {ord(c): None for c in config.diacritics}
    repeat = re.compile(
        r"(.)\1{%d,}" % config.max_repeat, re.DOTALL
    )
    repeat_sub = "\\1" * config.max_repeat
    invalid = re.compile("[^%s]" % re.escape(config.valid_chars))
    return lig_table, diac_table, repeat, repeat_sub, invalid


def normalize_line(text: str, config: NormalizerConfig = NormalizerConfig()) -> str:
    """Run the full transform chain on one piece of text.

    Steps, in order: expand ligatures, delete diacritics, squeeze runs of
    one codepoint down to ``max_repeat``, replace every out-of-whitelist
    codepoint with a space, collapse whitespace and trim.  Ligatures are
    expanded before run squeezing so a legitimate double letter created
    by the expansion survives.  Invalid codepoints become spaces rather
    than vanishing so that stripping a foreign token never fuses two
    Arabic words.  Idempotent.
    """
    lig_table, diac_table, repeat, repeat_sub, invalid = _compiled(config)
    text = text.translate(lig_table)
    text = text.translate(diac_table)
    text = repeat.sub(repeat_sub, text)
    text = invalid.sub(" ", text)
    return " ".join(text.split())


_SEGMENT_SPLIT = re.compile("[\n%s]" % _FULL_STOPS)


def segment_article(
    article: RawArticle, config: NormalizerConfig = NormalizerConfig()
) -> list[CandidateLine]:
    """Split an article on newlines and full stops, then normalize.

    Segments that normalize to the empty string are dropped.  Order of
    the surviving lines follows the original text.
    """
    lines = []
    for segment in _SEGMENT_SPLIT.split(article.text):
        normalized = normalize_line(segment, config)
        if normalized:
            lines.append(CandidateLine(text=normalized, source_article=article.id))
    return lines


def normalize_stream(
    articles: Iterable[RawArticle], config: NormalizerConfig = NormalizerConfig()
) -> Iterable[CandidateLine]:
    """Segment and normalize a stream of articles, preserving order."""
    for article in articles:
        yield from segment_article(article, config)
