"""The three seq2seq corrector families.

All models share one interface:

    forward(src, tgt_in) -> logits (B, T, |V|)        teacher forcing
    encode(src) -> Memory                             encoder pass
    start_state(memory) -> decoding state
    step(memory, prev_ids, state) -> (probs, state)   one greedy step

`src` and `tgt_in` are PAD-padded id tensors; sequences are framed with
SOS/EOS before padding. The recurrent families bridge encoder and
decoder with a learned-projection dot-product attention whose scores are
NOT scaled by the key dimension; the transformer uses standard scaled
multi-head attention throughout.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import torch
from torch import Tensor, nn
from torch.nn.utils.rnn import pack_padded_sequence, pad_packed_sequence

from .vocab import PAD


class Family(str, Enum):
    VANILLA_RNN = "vanilla_rnn"
    RNN_BLOCKS = "rnn_blocks"
    TRANSFORMER = "transformer"


@dataclass(frozen=True)
class ModelSpec:
    """Architecture family plus its hyperparameters.

    Family defaults (overridable): recurrent models use 4 (plain) or
    3 (block) layers with hidden 256 and embedding 512; the transformer
    uses 4 layers, dimension 512, 8 heads, and a feed-forward module
    DOWNSCALED to dimension/2.
    """

    family: Family
    layers: int
    hidden_size: int = 256
    embedding_size: int = 512
    model_dim: int = 512
    heads: int = 8
    dropout: float = 0.1

    def __post_init__(self):
        if self.layers < 1:
            raise ValueError("layers must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        if self.family is Family.TRANSFORMER:
            if self.model_dim % self.heads:
                raise ValueError("model_dim must be divisible by heads")
            if self.model_dim % 2:
                raise ValueError("model_dim must be even")

    @classmethod
    def vanilla_rnn(cls, layers=4, hidden_size=256, embedding_size=512,
                    dropout=0.1) -> "ModelSpec":
        return cls(Family.VANILLA_RNN, layers, hidden_size, embedding_size,
                   dropout=dropout)

    @classmethod
    def rnn_blocks(cls, layers=3, hidden_size=256, embedding_size=512,
                   dropout=0.1) -> "ModelSpec":
        return cls(Family.RNN_BLOCKS, layers, hidden_size, embedding_size,
                   dropout=dropout)

    @classmethod
    def transformer(cls, layers=4, model_dim=512, heads=8,
                    dropout=0.1) -> "ModelSpec":
        return cls(Family.TRANSFORMER, layers, model_dim=model_dim,
                   heads=heads, dropout=dropout)

    def to_dict(self) -> dict:
        data = vars(self).copy()
        data["family"] = self.family.value
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        data = dict(data)
        data["family"] = Family(data["family"])
        return cls(**data)


@dataclass
class Memory:
    """Encoder output bundle carried through decoding."""

    outputs: Tensor            # (B, S, features)
    pad_mask: Tensor           # (B, S) bool, True at PAD positions
    state: object = None       # family-specific decoder initializer


def _lengths(ids: Tensor) -> Tensor:
    return (ids != PAD).sum(dim=1)


def _run_gru(gru: nn.GRU, x: Tensor, lengths: Tensor,
             state: Optional[Tensor] = None) -> tuple[Tensor, Tensor]:
    """GRU over padded input; final state taken at each row's true end."""
    packed = pack_padded_sequence(
        x, lengths.cpu(), batch_first=True, enforce_sorted=False
    )
    out, final = gru(packed, state)
    out, _ = pad_packed_sequence(out, batch_first=True, total_length=x.size(1))
    return out, final


class BridgeAttention(nn.Module):
    """Encoder/decoder attention for the recurrent families.

    Q, K, V are learned projections of the decoder states and encoder
    outputs; scores are plain dot products with no scaling factor; the
    context is Concat(attended values, decoder state) projected back to
    the hidden size.
    """

    def __init__(self, hidden_size: int, attention_dim: int | None = None):
        super().__init__()
        attention_dim = attention_dim or hidden_size
        self.w_q = nn.Linear(hidden_size, attention_dim, bias=False)
        self.w_k = nn.Linear(hidden_size, attention_dim, bias=False)
        self.w_v = nn.Linear(hidden_size, attention_dim, bias=False)
        self.w_p = nn.Linear(attention_dim + hidden_size, hidden_size)

    def forward(self, states: Tensor, memory: Tensor, pad_mask: Tensor,
                need_weights: bool = False):
        q = self.w_q(states)
        k = self.w_k(memory)
        v = self.w_v(memory)
        scores = torch.matmul(q, k.transpose(1, 2))
        scores = scores.masked_fill(pad_mask.unsqueeze(1), float("-inf"))
        weights = torch.softmax(scores, dim=-1)
        attended = torch.matmul(weights, v)
        context = self.w_p(torch.cat([attended, states], dim=-1))
        return context, (weights if need_weights else None)


class VanillaRnn(nn.Module):
    """Plain multi-layer GRU encoder/decoder with bridge attention."""

    def __init__(self, spec: ModelSpec, vocab_size: int):
        super().__init__()
        self.spec = spec
        self.family = Family.VANILLA_RNN
        between = spec.dropout if spec.layers > 1 else 0.0
        self.embed = nn.Embedding(vocab_size, spec.embedding_size,
                                  padding_idx=PAD)
        self.encoder = nn.GRU(spec.embedding_size, spec.hidden_size,
                              spec.layers, batch_first=True, dropout=between)
        self.decoder = nn.GRU(spec.embedding_size, spec.hidden_size,
                              spec.layers, batch_first=True, dropout=between)
        self.attention = BridgeAttention(spec.hidden_size)
        self.project = nn.Linear(spec.hidden_size, vocab_size)

    def encode(self, src: Tensor) -> Memory:
        out, final = _run_gru(self.encoder, self.embed(src), _lengths(src))
        return Memory(out, src == PAD, final)

    def _decode(self, memory: Memory, tgt_in: Tensor,
                need_weights: bool = False):
        out, _ = self.decoder(self.embed(tgt_in), memory.state)
        context, weights = self.attention(
            out, memory.outputs, memory.pad_mask, need_weights
        )
        return self.project(context), weights

    def forward(self, src: Tensor, tgt_in: Tensor) -> Tensor:
        logits, _ = self._decode(self.encode(src), tgt_in)
        return logits

    def start_state(self, memory: Memory) -> Tensor:
        return memory.state

    def step(self, memory: Memory, prev_ids: Tensor, state):
        if state is None:
            raise RuntimeError("decoding state not initialized")
        out, new_state = self.decoder(self.embed(prev_ids.unsqueeze(1)), state)
        context, _ = self.attention(out, memory.outputs, memory.pad_mask)
        probs = torch.softmax(self.project(context).squeeze(1), dim=-1)
        return probs, new_state


class RnnBlock(nn.Module):
    """GRU, dropout, two-layer feed-forward (up 2x, back down), then
    layer normalization. Input and output shapes match."""

    def __init__(self, features: int, dropout: float):
        super().__init__()
        self.gru = nn.GRU(features, features, 1, batch_first=True)
        self.dropout = nn.Dropout(dropout)
        self.ff = nn.Sequential(
            nn.Linear(features, 2 * features),
            nn.ReLU(),
            nn.Linear(2 * features, features),
        )
        self.norm = nn.LayerNorm(features)

    def forward(self, x: Tensor, lengths: Optional[Tensor] = None,
                state: Optional[Tensor] = None) -> tuple[Tensor, Tensor]:
        if lengths is None:
            out, final = self.gru(x, state)
        else:
            out, final = _run_gru(self.gru, x, lengths, state)
        out = self.dropout(out)
        out = self.ff(out)
        return self.norm(out), final


class RnnBlocks(nn.Module):
    """Stacked recurrent blocks on both sides with bridge attention."""

    def __init__(self, spec: ModelSpec, vocab_size: int):
        super().__init__()
        self.spec = spec
        self.family = Family.RNN_BLOCKS
        self.embed = nn.Embedding(vocab_size, spec.embedding_size,
                                  padding_idx=PAD)
        self.enc_in = nn.Linear(spec.embedding_size, spec.hidden_size)
        self.dec_in = nn.Linear(spec.embedding_size, spec.hidden_size)
        self.enc_blocks = nn.ModuleList(
            RnnBlock(spec.hidden_size, spec.dropout) for _ in range(spec.layers)
        )
        self.dec_blocks = nn.ModuleList(
            RnnBlock(spec.hidden_size, spec.dropout) for _ in range(spec.layers)
        )
        self.attention = BridgeAttention(spec.hidden_size)
        self.project = nn.Linear(spec.hidden_size, vocab_size)

    def encode(self, src: Tensor) -> Memory:
        lengths = _lengths(src)
        x = self.enc_in(self.embed(src))
        finals = []
        for block in self.enc_blocks:
            x, final = block(x, lengths)
            finals.append(final)
        return Memory(x, src == PAD, tuple(finals))

    def _decode(self, memory: Memory, tgt_in: Tensor,
                need_weights: bool = False):
        x = self.dec_in(self.embed(tgt_in))
        for block, init in zip(self.dec_blocks, memory.state):
            x, _ = block(x, state=init)
        context, weights = self.attention(
            x, memory.outputs, memory.pad_mask, need_weights
        )
        return self.project(context), weights

    def forward(self, src: Tensor, tgt_in: Tensor) -> Tensor:
        logits, _ = self._decode(self.encode(src), tgt_in)
        return logits

    def start_state(self, memory: Memory) -> tuple:
        return memory.state

    def step(self, memory: Memory, prev_ids: Tensor, state):
        if state is None:
            raise RuntimeError("decoding state not initialized")
        x = self.dec_in(self.embed(prev_ids.unsqueeze(1)))
        new_states = []
        for block, block_state in zip(self.dec_blocks, state):
            x, final = block(x, state=block_state)
            new_states.append(final)
        context, _ = self.attention(x, memory.outputs, memory.pad_mask)
        probs = torch.softmax(self.project(context).squeeze(1), dim=-1)
        return probs, tuple(new_states)


class MultiHeadAttention(nn.Module):
    """Scaled dot-product attention split over heads, with the per-head
    softmax weights available for export."""

    def __init__(self, dim: int, heads: int, dropout: float):
        super().__init__()
        self.heads = heads
        self.head_dim = dim // heads
        self.scale = self.head_dim**-0.5
        self.w_q = nn.Linear(dim, dim)
        self.w_k = nn.Linear(dim, dim)
        self.w_v = nn.Linear(dim, dim)
        self.w_o = nn.Linear(dim, dim)
        self.dropout = nn.Dropout(dropout)

    def _split(self, x: Tensor) -> Tensor:
        b, t, _ = x.shape
        return x.view(b, t, self.heads, self.head_dim).transpose(1, 2)

    def forward(self, query: Tensor, key: Tensor, value: Tensor,
                causal: bool = False, key_pad_mask: Optional[Tensor] = None,
                need_weights: bool = False):
        q = self._split(self.w_q(query))
        k = self._split(self.w_k(key))
        v = self._split(self.w_v(value))
        scores = torch.matmul(q, k.transpose(-2, -1)) * self.scale
        if causal:
            t_q, t_k = scores.shape[-2:]
            future = torch.triu(
                torch.ones(t_q, t_k, dtype=torch.bool, device=scores.device),
                diagonal=1,
            )
            scores = scores.masked_fill(future, float("-inf"))
        if key_pad_mask is not None:
            scores = scores.masked_fill(
                key_pad_mask[:, None, None, :], float("-inf")
            )
        weights = torch.softmax(scores, dim=-1)
        out = torch.matmul(self.dropout(weights), v)
        b, _, t, _ = out.shape
        out = self.w_o(out.transpose(1, 2).reshape(b, t, -1))
        return out, (weights if need_weights else None)


class FeedForward(nn.Module):
    """Position-wise feed-forward that DOWNSCALES to dim/2 inside."""

    def __init__(self, dim: int, dropout: float):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(dim, dim // 2),
            nn.ReLU(),
            nn.Dropout(dropout),
            nn.Linear(dim // 2, dim),
        )

    def forward(self, x: Tensor) -> Tensor:
        return self.net(x)


class EncoderLayer(nn.Module):
    def __init__(self, dim: int, heads: int, dropout: float):
        super().__init__()
        self.attn = MultiHeadAttention(dim, heads, dropout)
        self.ff = FeedForward(dim, dropout)
        self.norm1 = nn.LayerNorm(dim)
        self.norm2 = nn.LayerNorm(dim)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x: Tensor, pad_mask: Tensor) -> Tensor:
        attended, _ = self.attn(x, x, x, key_pad_mask=pad_mask)
        x = self.norm1(x + self.dropout(attended))
        return self.norm2(x + self.dropout(self.ff(x)))


class DecoderLayer(nn.Module):
    def __init__(self, dim: int, heads: int, dropout: float):
        super().__init__()
        self.self_attn = MultiHeadAttention(dim, heads, dropout)
        self.cross_attn = MultiHeadAttention(dim, heads, dropout)
        self.ff = FeedForward(dim, dropout)
        self.norm1 = nn.LayerNorm(dim)
        self.norm2 = nn.LayerNorm(dim)
        self.norm3 = nn.LayerNorm(dim)
        self.dropout = nn.Dropout(dropout)

    def forward(self, x: Tensor, memory: Tensor, memory_pad_mask: Tensor,
                need_weights: bool = False):
        attended, _ = self.self_attn(x, x, x, causal=True)
        x = self.norm1(x + self.dropout(attended))
        attended, weights = self.cross_attn(
            x, memory, memory, key_pad_mask=memory_pad_mask,
            need_weights=need_weights,
        )
        x = self.norm2(x + self.dropout(attended))
        return self.norm3(x + self.dropout(self.ff(x))), weights


class PositionalEncoding(nn.Module):
    def __init__(self, dim: int, max_len: int = 2048):
        super().__init__()
        position = torch.arange(max_len).unsqueeze(1)
        rate = torch.exp(
            torch.arange(0, dim, 2) * (-math.log(10000.0) / dim)
        )
        table = torch.zeros(max_len, dim)
        table[:, 0::2] = torch.sin(position * rate)
        table[:, 1::2] = torch.cos(position * rate)
        self.register_buffer("table", table, persistent=False)

    def forward(self, x: Tensor) -> Tensor:
        return x + self.table[: x.size(1)].to(x.dtype)


class TransformerCorrector(nn.Module):
    """Standard encoder/decoder transformer except the feed-forward
    module downscales by 2 instead of upscaling."""

    def __init__(self, spec: ModelSpec, vocab_size: int):
        super().__init__()
        self.spec = spec
        self.family = Family.TRANSFORMER
        dim = spec.model_dim
        self.embed = nn.Embedding(vocab_size, dim, padding_idx=PAD)
        self.positions = PositionalEncoding(dim)
        self.dropout = nn.Dropout(spec.dropout)
        self.enc_layers = nn.ModuleList(
            EncoderLayer(dim, spec.heads, spec.dropout)
            for _ in range(spec.layers)
        )
        self.dec_layers = nn.ModuleList(
            DecoderLayer(dim, spec.heads, spec.dropout)
            for _ in range(spec.layers)
        )
        self.project = nn.Linear(dim, vocab_size)
        self.embed_scale = math.sqrt(dim)

    def _embed(self, ids: Tensor) -> Tensor:
        return self.dropout(self.positions(self.embed(ids) * self.embed_scale))

    def encode(self, src: Tensor) -> Memory:
        pad_mask = src == PAD
        x = self._embed(src)
        for layer in self.enc_layers:
            x = layer(x, pad_mask)
        return Memory(x, pad_mask)

    def _decode(self, memory: Memory, tgt_in: Tensor,
                need_weights: bool = False):
        x = self._embed(tgt_in)
        weights = None
        last = len(self.dec_layers) - 1
        for i, layer in enumerate(self.dec_layers):
            x, layer_weights = layer(
                x, memory.outputs, memory.pad_mask,
                need_weights=need_weights and i == last,
            )
            if layer_weights is not None:
                weights = layer_weights
        return self.project(x), weights

    def forward(self, src: Tensor, tgt_in: Tensor) -> Tensor:
        logits, _ = self._decode(self.encode(src), tgt_in)
        return logits

    def cross_attention(self, src: Tensor, tgt_in: Tensor) -> Tensor:
        """Per-head weights of the LAST decoder layer, (B, heads, T, S)."""
        _, weights = self._decode(self.encode(src), tgt_in, need_weights=True)
        return weights

    def start_state(self, memory: Memory) -> Tensor:
        return torch.empty(
            memory.outputs.size(0), 0, dtype=torch.int64,
            device=memory.outputs.device,
        )

    def step(self, memory: Memory, prev_ids: Tensor, state):
        if state is None:
            raise RuntimeError("decoding state not initialized")
        prefix = torch.cat([state, prev_ids.unsqueeze(1)], dim=1)
        logits, _ = self._decode(memory, prefix)
        probs = torch.softmax(logits[:, -1], dim=-1)
        return probs, prefix


def build_model(spec: ModelSpec, vocab_size: int) -> nn.Module:
    builders = {
        Family.VANILLA_RNN: VanillaRnn,
        Family.RNN_BLOCKS: RnnBlocks,
        Family.TRANSFORMER: TransformerCorrector,
    }
    return builders[spec.family](spec, vocab_size)
