"""Inference-time attention export.

For a transformer checkpoint, decodes one line greedily and captures the
cross-attention of every head in the LAST decoder layer: one matrix per
head, rows = output steps, columns = framed input positions, each row a
softmax over the input (sums to 1). Output is a numeric text grid,
optionally also rendered as a heatmap image.
"""

from pathlib import Path

import torch

from .data import pad_block
from .decode import MAX_DECODE_LEN, greedy_decode
from .models import Family
from .vocab import EOS, PAD, SOS, Vocabulary


class FamilyError(TypeError):
    """The model family does not expose this kind of attention."""


def _frame_labels(vocab: Vocabulary, ids) -> list[str]:
    names = {PAD: "<pad>", SOS: "<s>", EOS: "</s>"}
    if " " in vocab.symbols:
        names[vocab.id_of(" ")] = "<sp>"
    return [names.get(i, vocab.symbols[i]) for i in ids]


def attention_matrices(
    model, vocab: Vocabulary, line: str, max_len: int = MAX_DECODE_LEN
):
    """Decode one line and return (matrices, row_labels, col_labels).

    matrices is a (heads, T, S) tensor: T decoding steps, S framed input
    positions.
    """
    if getattr(model, "family", None) is not Family.TRANSFORMER:
        raise FamilyError("attention export requires a transformer model")
    result = greedy_decode(model, vocab, [line], max_len=max_len)[0]
    emitted = list(result.ids)
    src_ids = vocab.encode(line)
    # prefix that produced emission t is [SOS, e_1 .. e_{t-1}]
    tgt_in = [SOS] + emitted[:-1]
    src = pad_block([src_ids])
    tgt = pad_block([tgt_in])
    with torch.no_grad():
        weights = model.cross_attention(src, tgt)[0]   # (heads, T, S)
    row_labels = _frame_labels(vocab, emitted)
    col_labels = _frame_labels(vocab, src_ids)
    return weights, row_labels, col_labels


def format_grid(weights: torch.Tensor, row_labels: list[str],
                col_labels: list[str]) -> str:
    """All heads as aligned text tables."""
    width = max(7, max(len(c) for c in col_labels) + 1)
    row_width = max(len(r) for r in row_labels) + 1
    sections = []
    for head in range(weights.size(0)):
        lines = [f"head {head}"]
        lines.append(
            " " * row_width + "".join(c.rjust(width) for c in col_labels)
        )
        for r, label in enumerate(row_labels):
            cells = "".join(
                f"{weights[head, r, c].item():{width}.4f}"
                for c in range(weights.size(2))
            )
            lines.append(label.ljust(row_width) + cells)
        sections.append("\n".join(lines))
    return "\n\n".join(sections) + "\n"


def export_attention(
    model,
    vocab: Vocabulary,
    line: str,
    out_path: str | Path | None = None,
    png_path: str | Path | None = None,
    max_len: int = MAX_DECODE_LEN,
):
    """Write the per-head grid (and optional heatmap image); returns the
    (heads, T, S) weight tensor."""
    weights, row_labels, col_labels = attention_matrices(
        model, vocab, line, max_len=max_len
    )
    if out_path is not None:
        Path(out_path).write_text(
            format_grid(weights, row_labels, col_labels), encoding="utf-8"
        )
    if png_path is not None:
        _render_heatmaps(weights, row_labels, col_labels, png_path)
    return weights


def _render_heatmaps(weights, row_labels, col_labels, png_path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    heads = weights.size(0)
    cols = min(4, heads)
    rows = (heads + cols - 1) // cols
    fig, axes = plt.subplots(
        rows, cols, figsize=(4 * cols, 3.2 * rows), squeeze=False
    )
    for head in range(heads):
        ax = axes[head // cols][head % cols]
        ax.imshow(weights[head].numpy(), aspect="auto", cmap="viridis")
        ax.set_title(f"head {head}")
        ax.set_xticks(range(len(col_labels)))
        ax.set_xticklabels(col_labels, fontsize=5, rotation=90)
        ax.set_yticks(range(len(row_labels)))
        ax.set_yticklabels(row_labels, fontsize=5)
    for extra in range(heads, rows * cols):
        axes[extra // cols][extra % cols].axis("off")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
