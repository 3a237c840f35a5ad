"""Shared helpers: toy corpora, a reference CER, miniature specs."""

import random

import pytest

from musahih import ModelSpec, Vocabulary
from musahih.vocab import ARABIC_LETTERS


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance, two-row DP."""
    if not a:
        return len(b)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(
                prev[j - 1] + (ca != cb),
                prev[j] + 1,
                cur[j - 1] + 1,
            ))
        prev = cur
    return prev[-1]


def corpus_cer(refs: list[str], hyps: list[str]) -> float:
    """Pooled character error rate."""
    total = sum(levenshtein(r, h) for r, h in zip(refs, hyps))
    return total / sum(len(r) for r in refs)


def toy_words(rng: random.Random, count=60, lo=3, hi=6) -> list[str]:
    words = set()
    while len(words) < count:
        k = rng.randint(lo, hi)
        words.add("".join(rng.choice(ARABIC_LETTERS) for _ in range(k)))
    return sorted(words)


def toy_clean_lines(n: int, seed: int, vocab_size=60,
                    words_per_line=(3, 6)) -> list[str]:
    rng = random.Random(seed)
    words = toy_words(rng, vocab_size)
    return [
        " ".join(rng.choice(words)
                 for _ in range(rng.randint(*words_per_line)))
        for _ in range(n)
    ]


def simple_corrupt(line: str, rng: random.Random, ops=None) -> str:
    """Random char substitutions/deletions/insertions, for tests that
    must not depend on the corpus toolkit."""
    if ops is None:
        ops = rng.randint(1, 3)
    chars = list(line)
    for _ in range(ops):
        kind = rng.randrange(3)
        if kind == 0 and chars:
            chars[rng.randrange(len(chars))] = rng.choice(ARABIC_LETTERS)
        elif kind == 1 and len(chars) > 1:
            del chars[rng.randrange(len(chars))]
        else:
            chars.insert(rng.randrange(len(chars) + 1),
                         rng.choice(ARABIC_LETTERS))
    return "".join(chars)


def toy_pairs(n: int, seed: int, **kwargs) -> list[tuple[str, str]]:
    rng = random.Random(seed + 1)
    return [
        (simple_corrupt(line, rng), line)
        for line in toy_clean_lines(n, seed, **kwargs)
    ]


def write_pairs(path, pairs):
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        for corrupted, clean in pairs:
            out.write(f"{corrupted}\t{clean}\n")
    return path


def write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        for line in lines:
            out.write(line + "\n")
    return path


MINI_ALPHABET = "ابتثجحخدذ"   # 9 letters -> 12 symbols with specials


def mini_vocab() -> Vocabulary:
    return Vocabulary.from_alphabet(MINI_ALPHABET)


def mini_specs() -> dict[str, ModelSpec]:
    return {
        "vanilla_rnn": ModelSpec.vanilla_rnn(
            layers=2, hidden_size=8, embedding_size=8, dropout=0.0
        ),
        "rnn_blocks": ModelSpec.rnn_blocks(
            layers=2, hidden_size=8, embedding_size=8, dropout=0.0
        ),
        "transformer": ModelSpec.transformer(
            layers=2, model_dim=8, heads=2, dropout=0.0
        ),
    }


@pytest.fixture(scope="session")
def vocab() -> Vocabulary:
    return Vocabulary.from_alphabet()
