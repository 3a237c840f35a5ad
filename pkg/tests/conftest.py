"""Shared synthetic-corpus builders for the test suite.

make_clean_lines produces encyclopedia-like sentences: Zipf-distributed
vocabulary, word lengths centered near 5 characters, 6..14 words per
sentence, total length within the filter bounds. make_messy_lines
produces deliberately varied lines (floating chars, digit debris, out of
bound lengths) for filter conformance checks.
"""

import random

import pytest

from ghalat.filtering import filter_corpus
from ghalat.normalize import ARABIC_LETTERS

_WORD_LENGTHS = (2, 3, 4, 5, 6, 7, 8, 9)
_WORD_LENGTH_WEIGHTS = (4, 10, 18, 22, 20, 14, 8, 4)


def _zipf_vocab(rng, size):
    vocab = []
    for _ in range(size):
        n = rng.choices(_WORD_LENGTHS, weights=_WORD_LENGTH_WEIGHTS)[0]
        vocab.append("".join(rng.choice(ARABIC_LETTERS) for _ in range(n)))
    cum_weights = []
    total = 0.0
    for i in range(size):
        total += 1.0 / (i + 1) ** 0.9
        cum_weights.append(total)
    return vocab, cum_weights


def make_clean_lines(n, seed=11, vocab_size=3000):
    """Sentences that should pass the default filter."""
    rng = random.Random(seed)
    vocab, cum_weights = _zipf_vocab(rng, vocab_size)
    lines = []
    while len(lines) < n:
        k = rng.randint(6, 14)
        line = " ".join(rng.choices(vocab, cum_weights=cum_weights, k=k))
        if 15 <= len(line) <= 128:
            lines.append(line)
    return lines


def make_messy_lines(n, seed=23):
    """Lines spanning every filter rule, including ones that must drop."""
    rng = random.Random(seed)
    vocab, cum_weights = _zipf_vocab(rng, 500)
    lines = []
    for _ in range(n):
        k = rng.randint(1, 24)
        words = rng.choices(vocab, cum_weights=cum_weights, k=k)
        roll = rng.random()
        if roll < 0.05:
            words[rng.randrange(len(words))] = rng.choice(ARABIC_LETTERS)
        elif roll < 0.08:
            words.append(rng.choice("0123456789٠١٥"))
        elif roll < 0.10:
            words = [w * 4 for w in words]  # push over the char bound
        lines.append(" ".join(words))
    return lines


@pytest.fixture(scope="session")
def clean_corpus_10k():
    """At least 10K sentences that survived the real filter."""
    candidates = make_clean_lines(12500, seed=11)
    kept, _report = filter_corpus(candidates)
    texts = [line.text for line in kept]
    assert len(texts) >= 10000, f"fixture yielded only {len(texts)} lines"
    return texts[:10000]
