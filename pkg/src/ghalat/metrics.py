"""Exact edit-distance error rates at character and word granularity.

The distance is unit-cost Levenshtein (substitution, deletion, insertion;
a transposition therefore costs 2). The (S, D, I) decomposition is made
deterministic by a fixed tie-break applied in every DP cell: prefer
substitution/match, then deletion, then insertion. The decomposition is
carried forward through the DP so only two rolling rows are kept, which
matches what a full-table backtrace with the same per-cell preference
would produce.

Rates follow the usual convention: (S + D + I) / reference_length. The
reduction rate of a correction system is (before - after) / before.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap if not (args and callable(args[0])) else args[0]


class EmptyReference(ValueError):
    """Reference side has zero tokens, so no rate is defined."""


class EmptyCorpus(ValueError):
    """corpus_rates needs at least one pair."""


class Granularity(str, Enum):
    CHARACTER = "character"
    WORD = "word"


@dataclass(frozen=True)
class EditCounts:
    substitutions: int
    deletions: int
    insertions: int
    reference_length: int

    @property
    def distance(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def rate(self) -> float:
        if self.reference_length == 0:
            raise EmptyReference("reference length is zero")
        return self.distance / self.reference_length

    def __add__(self, other: "EditCounts") -> "EditCounts":
        return EditCounts(
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
            self.reference_length + other.reference_length,
        )


ZERO_COUNTS = EditCounts(0, 0, 0, 0)


@dataclass(frozen=True)
class RateReport:
    cer: float
    wer: float
    counts_char: EditCounts
    counts_word: EditCounts

    def to_dict(self) -> dict:
        return {
            "cer": self.cer,
            "wer": self.wer,
            "counts_char": vars(self.counts_char),
            "counts_word": vars(self.counts_word),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


@dataclass(frozen=True)
class ReductionReport:
    er_before: float
    er_after: float

    @property
    def err(self) -> float:
        return err(self.er_before, self.er_after)


@njit(cache=True)
def _edit_kernel(ref, hyp):  # pragma: no cover - jitted
    """Distance plus (S, D, I) under the sub > del > ins tie-break.

    ref and hyp are int32 arrays. Cell (i, j) holds the result for
    ref[:i] vs hyp[:j]; a deletion consumes a reference token, an
    insertion consumes a hypothesis token.
    """
    n = len(ref)
    m = len(hyp)
    prev_d = np.empty(m + 1, np.int64)
    prev_s = np.empty(m + 1, np.int64)
    prev_dd = np.empty(m + 1, np.int64)
    prev_ii = np.empty(m + 1, np.int64)
    cur_d = np.empty(m + 1, np.int64)
    cur_s = np.empty(m + 1, np.int64)
    cur_dd = np.empty(m + 1, np.int64)
    cur_ii = np.empty(m + 1, np.int64)
    for j in range(m + 1):
        prev_d[j] = j
        prev_s[j] = 0
        prev_dd[j] = 0
        prev_ii[j] = j
    for i in range(1, n + 1):
        cur_d[0] = i
        cur_s[0] = 0
        cur_dd[0] = i
        cur_ii[0] = 0
        for j in range(1, m + 1):
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            best = prev_d[j - 1] + cost
            s = prev_s[j - 1] + cost
            d = prev_dd[j - 1]
            ins = prev_ii[j - 1]
            if prev_d[j] + 1 < best:
                best = prev_d[j] + 1
                s = prev_s[j]
                d = prev_dd[j] + 1
                ins = prev_ii[j]
            if cur_d[j - 1] + 1 < best:
                best = cur_d[j - 1] + 1
                s = cur_s[j - 1]
                d = cur_dd[j - 1]
                ins = cur_ii[j - 1] + 1
            cur_d[j] = best
            cur_s[j] = s
            cur_dd[j] = d
            cur_ii[j] = ins
        prev_d, cur_d = cur_d, prev_d
        prev_s, cur_s = cur_s, prev_s
        prev_dd, cur_dd = cur_dd, prev_dd
        prev_ii, cur_ii = cur_ii, prev_ii
    return prev_d[m], prev_s[m], prev_dd[m], prev_ii[m]


def _edit_python(ref: Sequence[int], hyp: Sequence[int]) -> tuple[int, int, int, int]:
    """Pure-Python twin of _edit_kernel, used when numba is unavailable."""
    m = len(hyp)
    prev = [(j, 0, 0, j) for j in range(m + 1)]
    for i in range(1, len(ref) + 1):
        cur = [(i, 0, i, 0)]
        r = ref[i - 1]
        for j in range(1, m + 1):
            cost = 0 if r == hyp[j - 1] else 1
            pd, ps, pdd, pii = prev[j - 1]
            best = (pd + cost, ps + cost, pdd, pii)
            vd, vs, vdd, vii = prev[j]
            if vd + 1 < best[0]:
                best = (vd + 1, vs, vdd + 1, vii)
            hd, hs, hdd, hii = cur[j - 1]
            if hd + 1 < best[0]:
                best = (hd + 1, hs, hdd, hii + 1)
            cur.append(best)
        prev = cur
    return prev[m]


def _char_ids(text: str) -> np.ndarray:
    return np.frombuffer(text.encode("utf-32-le"), dtype=np.int32)


def _token_ids(tokens: Sequence, vocab: dict) -> np.ndarray:
    out = np.empty(len(tokens), np.int32)
    for k, token in enumerate(tokens):
        out[k] = vocab.setdefault(token, len(vocab))
    return out


def edit_counts(reference: Sequence, hypothesis: Sequence) -> EditCounts:
    """Exact Levenshtein distance with deterministic (S, D, I) split.

    Accepts any token sequences; strings are treated as codepoint
    sequences. Raises EmptyReference when the reference is empty.
    """
    if len(reference) == 0:
        raise EmptyReference("reference has zero tokens")
    if isinstance(reference, str) and isinstance(hypothesis, str):
        a, b = _char_ids(reference), _char_ids(hypothesis)
    else:
        vocab: dict = {}
        a = _token_ids(list(reference), vocab)
        b = _token_ids(list(hypothesis), vocab)
    core = _edit_kernel if _HAVE_NUMBA else _edit_python
    _, s, d, i = core(a, b)
    return EditCounts(int(s), int(d), int(i), len(reference))


def _tokens(text: str, granularity: Granularity) -> Sequence:
    if Granularity(granularity) is Granularity.WORD:
        return text.split()
    return text


def rate(
    reference: str,
    hypothesis: str,
    granularity: Granularity = Granularity.CHARACTER,
) -> float:
    """(S + D + I) / N at the chosen granularity."""
    return edit_counts(
        _tokens(reference, granularity), _tokens(hypothesis, granularity)
    ).rate


def err(er_before: float, er_after: float) -> float:
    """Relative error reduction (before - after) / before."""
    if er_before < 0 or er_after < 0:
        raise ValueError("error rates must be non-negative")
    if er_before == 0:
        raise ZeroDivisionError("er_before must be > 0")
    return (er_before - er_after) / er_before


def corpus_rates(
    pairs: Iterable[tuple[str, str]],
    average: str = "micro",
) -> RateReport:
    """Aggregate CER/WER over (reference, hypothesis) pairs.

    micro pools edit and token counts across the corpus; macro averages
    the per-pair rates. Counts in the report are pooled either way.
    """
    if average not in ("micro", "macro"):
        raise ValueError(f"unknown average: {average!r}")
    total_char = ZERO_COUNTS
    total_word = ZERO_COUNTS
    cers: list[float] = []
    wers: list[float] = []
    n_pairs = 0
    for reference, hypothesis in pairs:
        counts_char = edit_counts(reference, hypothesis)
        counts_word = edit_counts(reference.split(), hypothesis.split())
        total_char = total_char + counts_char
        total_word = total_word + counts_word
        if average == "macro":
            cers.append(counts_char.rate)
            wers.append(counts_word.rate)
        n_pairs += 1
    if n_pairs == 0:
        raise EmptyCorpus("no pairs to score")
    if average == "macro":
        cer = sum(cers) / n_pairs
        wer = sum(wers) / n_pairs
    else:
        cer = total_char.rate
        wer = total_word.rate
    return RateReport(cer, wer, total_char, total_word)
