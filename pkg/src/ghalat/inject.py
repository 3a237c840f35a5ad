"""Stochastic spelling-error injection over clean sentences.

Each line of length J receives floor(J * psi) operations, drawn uniformly
from the enabled kinds and applied sequentially. The op count is fixed by
the ORIGINAL length, so later insertions or deletions do not change how
many errors a line gets. Every line derives its own RNG seed from the
global seed and the line index, which makes output a pure function of
(corpus, config) no matter how lines are sharded across workers.

Operation kinds:

- insertion: one alphabet codepoint at a uniform position
- deletion: one codepoint at a uniform position (optionally a whole
  mapping-rule pattern, see pattern_delete_prob)
- substitution: a uniform-position codepoint becomes a keyboard neighbor
  with probability substitution_keyboard_prob, else a random alphabet
  codepoint
- transposition: two adjacent codepoints swap
- mapping: one occurrence of a confusion-rule pattern is replaced by one
  of the rule's targets; a no-op if no pattern occurs in the line

Every applied operation is logged, so the character edit distance of a
pair is bounded by the sum of per-op costs (1 for insert/delete/subst,
2 for transposition, max(|pattern|, |target|) for mapping).
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

from .filtering import CleanLine
from .keyboard import DEFAULT_NEIGHBORS
from .normalize import DEFAULT_VALID_CHARS

_MASK64 = (1 << 64) - 1
_MAX_RETRIES = 16

# Classic Arabic confusion pairs: hamza seats, taa marbuta vs haa,
# alif maqsura vs yaa. Overridable via CorruptionConfig.
DEFAULT_MAPPING_RULES: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("ا", ("أ", "إ", "آ")),
    ("أ", ("ا",)),
    ("إ", ("ا",)),
    ("آ", ("ا",)),
    ("ة", ("ه",)),
    ("ه", ("ة",)),
    ("ى", ("ي",)),
    ("ي", ("ى",)),
)


class OpKind(str, Enum):
    INSERTION = "insertion"
    DELETION = "deletion"
    SUBSTITUTION = "substitution"
    TRANSPOSITION = "transposition"
    MAPPING = "mapping"


ALL_OPS: tuple[OpKind, ...] = tuple(OpKind)


@dataclass(frozen=True)
class Fixed:
    psi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.psi <= 1.0:
            raise ValueError("psi must be in [0, 1]")


@dataclass(frozen=True)
class Mixed:
    psis: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.psis:
            raise ValueError("mixed policy needs at least one psi")
        if any(not 0.0 <= p <= 1.0 for p in self.psis):
            raise ValueError("every psi must be in [0, 1]")


@dataclass(frozen=True)
class Varied:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.lo < self.hi <= 1.0:
            raise ValueError("varied policy needs 0 <= lo < hi <= 1")


PsiPolicy = Fixed | Mixed | Varied


def _policy_to_dict(policy: PsiPolicy) -> dict:
    if isinstance(policy, Fixed):
        return {"kind": "fixed", "psi": policy.psi}
    if isinstance(policy, Mixed):
        return {"kind": "mixed", "psis": list(policy.psis)}
    return {"kind": "varied", "lo": policy.lo, "hi": policy.hi}


def _policy_from_dict(data: dict) -> PsiPolicy:
    kind = data["kind"]
    if kind == "fixed":
        return Fixed(data["psi"])
    if kind == "mixed":
        return Mixed(tuple(data["psis"]))
    if kind == "varied":
        return Varied(data["lo"], data["hi"])
    raise ValueError(f"unknown psi policy kind: {kind!r}")


@dataclass(frozen=True)
class CorruptionConfig:
    psi_policy: PsiPolicy = Fixed(0.05)
    ops: tuple[OpKind, ...] = ALL_OPS
    keyboard_neighbors: dict = field(default_factory=lambda: dict(DEFAULT_NEIGHBORS))
    mapping_rules: tuple[tuple[str, tuple[str, ...]], ...] = DEFAULT_MAPPING_RULES
    substitution_keyboard_prob: float = 0.5
    pattern_delete_prob: float = 0.0
    alphabet: str = DEFAULT_VALID_CHARS
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.ops:
            raise ValueError("ops must not be empty")
        if not 0.0 <= self.substitution_keyboard_prob <= 1.0:
            raise ValueError("substitution_keyboard_prob must be in [0, 1]")
        if not 0.0 <= self.pattern_delete_prob <= 1.0:
            raise ValueError("pattern_delete_prob must be in [0, 1]")
        if not self.alphabet:
            raise ValueError("alphabet must not be empty")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must fit in 64 bits")
        allowed = set(self.alphabet)
        for char, neighbors in self.keyboard_neighbors.items():
            bad = set(neighbors) - allowed
            if bad:
                raise ValueError(f"neighbors of {char!r} outside alphabet: {bad}")
        for pattern, targets in self.mapping_rules:
            if not pattern or not targets:
                raise ValueError("mapping rules need a pattern and targets")
            bad = set("".join(targets)) - allowed
            if bad:
                raise ValueError(f"targets of {pattern!r} outside alphabet: {bad}")

    def pairs_per_line(self) -> int:
        return len(self.psi_policy.psis) if isinstance(self.psi_policy, Mixed) else 1

    def to_json(self) -> str:
        data = {
            "psi_policy": _policy_to_dict(self.psi_policy),
            "ops": [op.value for op in self.ops],
            "keyboard_neighbors": {
                k: list(v) for k, v in sorted(self.keyboard_neighbors.items())
            },
            "mapping_rules": [[p, list(t)] for p, t in self.mapping_rules],
            "substitution_keyboard_prob": self.substitution_keyboard_prob,
            "pattern_delete_prob": self.pattern_delete_prob,
            "alphabet": self.alphabet,
            "seed": self.seed,
        }
        return json.dumps(data, ensure_ascii=True, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CorruptionConfig":
        data = json.loads(text)
        return cls(
            psi_policy=_policy_from_dict(data["psi_policy"]),
            ops=tuple(OpKind(op) for op in data["ops"]),
            keyboard_neighbors={
                k: tuple(v) for k, v in data["keyboard_neighbors"].items()
            },
            mapping_rules=tuple(
                (p, tuple(t)) for p, t in data["mapping_rules"]
            ),
            substitution_keyboard_prob=data["substitution_keyboard_prob"],
            pattern_delete_prob=data.get("pattern_delete_prob", 0.0),
            alphabet=data["alphabet"],
            seed=data["seed"],
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "CorruptionConfig":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def with_seed(self, seed: int) -> "CorruptionConfig":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class OpRecord:
    kind: OpKind
    position: int
    removed: str
    added: str
    applied: bool = True

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "position": self.position,
            "removed": self.removed,
            "added": self.added,
            "applied": self.applied,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OpRecord":
        return cls(
            OpKind(data["kind"]),
            data["position"],
            data["removed"],
            data["added"],
            data["applied"],
        )


def op_cost(record: OpRecord) -> int:
    """Worst-case character edit distance contributed by one operation."""
    if not record.applied:
        return 0
    return max(len(record.removed), len(record.added))


@dataclass(frozen=True)
class SentencePair:
    corrupted: str
    clean: str
    ops: tuple[OpRecord, ...] = ()
    psi_used: float = 0.0

    def cost_bound(self) -> int:
        return sum(op_cost(record) for record in self.ops)

    def to_log_record(self, index: int) -> dict:
        return {
            "index": index,
            "psi_used": self.psi_used,
            "ops": [record.to_dict() for record in self.ops],
        }


@dataclass
class InjectionReport:
    lines_in: int = 0
    pairs_out: int = 0
    discarded_empty: int = 0
    noop_ops: int = 0


def derive_seed(seed: int, index: int) -> int:
    """Per-line 64-bit seed; splitmix64 finalizer over seed and index."""
    z = (seed + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def op_count(length: int, psi: float) -> int:
    """floor(J * psi); the epsilon absorbs float representation error."""
    if length < 0:
        raise ValueError("length must be >= 0")
    if not 0.0 <= psi <= 1.0:
        raise ValueError("psi must be in [0, 1]")
    return math.floor(length * psi + 1e-9)


def _occurrences(line: str, pattern: str) -> list[int]:
    found = []
    start = 0
    while True:
        pos = line.find(pattern, start)
        if pos < 0:
            return found
        found.append(pos)
        start = pos + 1


def _can_apply(kind: OpKind, line: str) -> bool:
    if kind is OpKind.INSERTION or kind is OpKind.MAPPING:
        return True
    if kind is OpKind.TRANSPOSITION:
        return len(line) >= 2
    return len(line) >= 1


def apply_op(
    line: str,
    kind: OpKind,
    rng: random.Random,
    config: CorruptionConfig,
) -> tuple[str, OpRecord]:
    """Apply one operation; the caller is responsible for preconditions."""
    if not _can_apply(kind, line):
        raise ValueError(f"{kind.value} not applicable to {line!r}")
    if kind is OpKind.INSERTION:
        pos = rng.randrange(len(line) + 1)
        char = rng.choice(config.alphabet)
        return line[:pos] + char + line[pos:], OpRecord(kind, pos, "", char)
    if kind is OpKind.DELETION:
        if config.pattern_delete_prob > 0 and rng.random() < config.pattern_delete_prob:
            candidates = [p for p, _ in config.mapping_rules if p in line]
            if candidates:
                pattern = rng.choice(candidates)
                pos = rng.choice(_occurrences(line, pattern))
                return (
                    line[:pos] + line[pos + len(pattern):],
                    OpRecord(kind, pos, pattern, ""),
                )
        pos = rng.randrange(len(line))
        return line[:pos] + line[pos + 1:], OpRecord(kind, pos, line[pos], "")
    if kind is OpKind.SUBSTITUTION:
        pos = rng.randrange(len(line))
        old = line[pos]
        neighbors = config.keyboard_neighbors.get(old, ())
        if neighbors and rng.random() < config.substitution_keyboard_prob:
            new = rng.choice(neighbors)
        else:
            new = rng.choice(config.alphabet)
        return line[:pos] + new + line[pos + 1:], OpRecord(kind, pos, old, new)
    if kind is OpKind.TRANSPOSITION:
        pos = rng.randrange(len(line) - 1)
        pair = line[pos:pos + 2]
        swapped = pair[1] + pair[0]
        return line[:pos] + swapped + line[pos + 2:], OpRecord(kind, pos, pair, swapped)
    # Mapping: uniform over rules whose pattern occurs, then uniform over
    # that pattern's occurrences and targets; no occurrence means a no-op.
    candidates = [rule for rule in config.mapping_rules if rule[0] in line]
    if not candidates:
        return line, OpRecord(kind, -1, "", "", applied=False)
    pattern, targets = rng.choice(candidates)
    pos = rng.choice(_occurrences(line, pattern))
    target = rng.choice(targets)
    return (
        line[:pos] + target + line[pos + len(pattern):],
        OpRecord(kind, pos, pattern, target),
    )


def _corrupt_with_rng(
    text: str,
    psi: float,
    rng: random.Random,
    config: CorruptionConfig,
) -> SentencePair:
    phi = op_count(len(text), psi)
    current = text
    ops: list[OpRecord] = []
    for _ in range(phi):
        record = None
        for _attempt in range(_MAX_RETRIES):
            kind = rng.choice(config.ops)
            if _can_apply(kind, current):
                current, record = apply_op(current, kind, rng, config)
                break
        if record is None:
            record = OpRecord(kind, -1, "", "", applied=False)
        ops.append(record)
    return SentencePair(current, text, tuple(ops), psi)


def corrupt_line(
    line: CleanLine | str,
    psi: float,
    seed: int,
    config: CorruptionConfig = CorruptionConfig(),
) -> SentencePair:
    """Deterministic corruption of one line at a given psi and seed."""
    text = line if isinstance(line, str) else line.text
    return _corrupt_with_rng(text, psi, random.Random(seed), config)


def corrupt_indexed(
    index: int,
    line: CleanLine | str,
    config: CorruptionConfig,
) -> list[SentencePair]:
    """All pairs for the line at the given corpus position.

    Fixed and Varied yield one pair per line; Mixed yields one pair per
    listed psi, adjacent in the output. Seeds depend only on the global
    seed and the pair's logical position, never on sharding.
    """
    text = line if isinstance(line, str) else line.text
    policy = config.psi_policy
    if isinstance(policy, Mixed):
        width = len(policy.psis)
        return [
            _corrupt_with_rng(
                text,
                psi,
                random.Random(derive_seed(config.seed, index * width + j)),
                config,
            )
            for j, psi in enumerate(policy.psis)
        ]
    rng = random.Random(derive_seed(config.seed, index))
    psi = policy.psi if isinstance(policy, Fixed) else rng.uniform(policy.lo, policy.hi)
    return [_corrupt_with_rng(text, psi, rng, config)]


def corrupt_corpus(
    lines: Iterable[CleanLine | str],
    config: CorruptionConfig = CorruptionConfig(),
    report: InjectionReport | None = None,
) -> Iterator[SentencePair]:
    """Corrupt a corpus serially; pairs whose text was fully deleted are
    dropped and tallied in the report."""
    if report is None:
        report = InjectionReport()
    for index, line in enumerate(lines):
        report.lines_in += 1
        for pair in corrupt_indexed(index, line, config):
            report.noop_ops += sum(1 for op in pair.ops if not op.applied)
            if pair.corrupted == "":
                report.discarded_empty += 1
                continue
            report.pairs_out += 1
            yield pair
