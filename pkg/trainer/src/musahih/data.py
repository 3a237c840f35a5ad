"""Pair-file loading and batching.

Pair files are the pipeline's TSV format: corrupted<TAB>clean, one pair
per line, UTF-8. Any character outside the vocabulary is fatal and the
error quotes the offending line.
"""

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import torch

from .vocab import PAD, Vocabulary, VocabularyError


class DataError(ValueError):
    """Malformed or out-of-vocabulary input data."""


def load_pairs(path: str | Path, vocab: Vocabulary) -> list[tuple[str, str]]:
    """Read (corrupted, clean) pairs, validating every character."""
    pairs = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise DataError(
                    f"{path}:{lineno}: expected 2 TSV fields, got {len(fields)}"
                )
            for text in fields:
                try:
                    vocab.encode(text, frame=False)
                except VocabularyError as exc:
                    raise DataError(f"{path}:{lineno}: {exc}: {line!r}") from None
            pairs.append((fields[0], fields[1]))
    if not pairs:
        raise DataError(f"{path}: no pairs")
    return pairs


def load_lines(path: str | Path, vocab: Vocabulary) -> list[str]:
    """Read plain corrupted lines for decoding, validating characters."""
    lines = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.rstrip("\n")
            try:
                vocab.encode(line, frame=False)
            except VocabularyError as exc:
                raise DataError(f"{path}:{lineno}: {exc}: {line!r}") from None
            lines.append(line)
    return lines


def pad_block(rows: list[list[int]]) -> torch.Tensor:
    """Stack variable-length id lists into a PAD-filled int64 tensor."""
    width = max(len(row) for row in rows)
    block = torch.full((len(rows), width), PAD, dtype=torch.int64)
    for i, row in enumerate(rows):
        block[i, : len(row)] = torch.tensor(row, dtype=torch.int64)
    return block


@dataclass(frozen=True)
class Batch:
    src: torch.Tensor        # framed corrupted ids, (B, S)
    tgt_in: torch.Tensor     # framed clean ids minus final EOS, (B, T)
    tgt_out: torch.Tensor    # framed clean ids minus leading SOS, (B, T)


def make_batch(pairs: list[tuple[str, str]], vocab: Vocabulary) -> Batch:
    src = pad_block([vocab.encode(corrupted) for corrupted, _ in pairs])
    tgt = pad_block([vocab.encode(clean) for _, clean in pairs])
    return Batch(src=src, tgt_in=tgt[:, :-1], tgt_out=tgt[:, 1:])


def batch_stream(
    pairs: list[tuple[str, str]],
    vocab: Vocabulary,
    batch_size: int,
    seed: int,
) -> Iterator[Batch]:
    """Endless shuffled batches; reshuffles each pass with its own RNG so
    the stream depends only on (pairs, batch_size, seed)."""
    rng = random.Random(seed)
    order = list(range(len(pairs)))
    while True:
        rng.shuffle(order)
        for start in range(0, len(order), batch_size):
            chunk = [pairs[i] for i in order[start : start + batch_size]]
            yield make_batch(chunk, vocab)
