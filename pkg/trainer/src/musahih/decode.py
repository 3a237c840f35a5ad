"""Greedy decoding.

Emits the argmax symbol step by step until EOS or max_len (default 128,
the corpus line cap). Output text never contains SOS/EOS/PAD; hitting
max_len without EOS is flagged as truncation in the result metadata.
"""

from dataclasses import dataclass

import torch

from .data import pad_block
from .vocab import EOS, PAD, SOS, Vocabulary

MAX_DECODE_LEN = 128


@dataclass(frozen=True)
class DecodeResult:
    text: str
    truncated: bool
    ids: tuple[int, ...]    # raw emissions up to and including EOS


def greedy_decode(
    model,
    vocab: Vocabulary,
    lines: list[str],
    max_len: int = MAX_DECODE_LEN,
    batch_size: int = 64,
    device: str = "cpu",
) -> list[DecodeResult]:
    """Decode corrupted lines into hypotheses, batched for throughput.

    Decoding length is independent of input length; each row stops at
    its own EOS.
    """
    model.eval()
    results = []
    with torch.no_grad():
        for start in range(0, len(lines), batch_size):
            chunk = lines[start : start + batch_size]
            results.extend(_decode_chunk(model, vocab, chunk, max_len, device))
    return results


def _decode_chunk(model, vocab, chunk, max_len, device):
    src = pad_block([vocab.encode(line) for line in chunk]).to(device)
    memory = model.encode(src)
    state = model.start_state(memory)
    rows = len(chunk)
    prev = torch.full((rows,), SOS, dtype=torch.int64, device=device)
    emitted = torch.full((rows, max_len), PAD, dtype=torch.int64)
    finished = torch.zeros(rows, dtype=torch.bool, device=device)
    steps = 0
    for t in range(max_len):
        probs, state = model.step(memory, prev, state)
        symbol = probs.argmax(dim=-1)
        symbol = torch.where(finished, torch.full_like(symbol, PAD), symbol)
        emitted[:, t] = symbol.cpu()
        finished = finished | (symbol == EOS)
        steps = t + 1
        if bool(finished.all()):
            break
        prev = symbol
    done = finished.cpu()
    results = []
    for i in range(rows):
        row = emitted[i, :steps].tolist()
        if bool(done[i]):
            row = row[: row.index(EOS) + 1]
        results.append(
            DecodeResult(text=vocab.decode(row), truncated=not bool(done[i]),
                         ids=tuple(row))
        )
    return results
