"""Character vocabulary shared by all model families.

The symbol set is the corpus alphabet the pair files are written in
(Arabic letters U+0621..U+063A and U+0641..U+064A plus the space),
prefixed by three special tokens at fixed, documented indices:

    0  PAD   batch padding, never a real symbol
    1  SOS   start of sequence
    2  EOS   end of sequence
"""

import json
from dataclasses import dataclass, field

PAD = 0
SOS = 1
EOS = 2

SPECIAL_TOKENS = ("<pad>", "<sos>", "<eos>")

ARABIC_LETTERS = "".join(chr(c) for c in range(0x0621, 0x063B)) + "".join(
    chr(c) for c in range(0x0641, 0x064B)
)
DEFAULT_ALPHABET = ARABIC_LETTERS + " "


class VocabularyError(ValueError):
    """A character outside the vocabulary was encountered."""


@dataclass(frozen=True)
class Vocabulary:
    """Bijective symbol/id mapping with PAD/SOS/EOS pinned to 0/1/2."""

    symbols: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if tuple(self.symbols[:3]) != SPECIAL_TOKENS:
            raise ValueError(f"symbols must start with {SPECIAL_TOKENS}")
        index = {}
        for i, symbol in enumerate(self.symbols):
            if symbol in index:
                raise ValueError(f"duplicate symbol {symbol!r}")
            index[symbol] = i
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_alphabet(cls, alphabet: str = DEFAULT_ALPHABET) -> "Vocabulary":
        return cls(SPECIAL_TOKENS + tuple(alphabet))

    def __len__(self) -> int:
        return len(self.symbols)

    def id_of(self, char: str) -> int:
        try:
            return self._index[char]
        except KeyError:
            raise VocabularyError(f"character {char!r} not in vocabulary") from None

    def encode(self, text: str, frame: bool = True) -> list[int]:
        """Text to ids, SOS/EOS framed by default."""
        ids = [self.id_of(ch) for ch in text]
        return [SOS] + ids + [EOS] if frame else ids

    def decode(self, ids) -> str:
        """Ids to text; PAD/SOS/EOS are dropped, stopping at EOS."""
        chars = []
        for i in ids:
            i = int(i)
            if i == EOS:
                break
            if i in (PAD, SOS):
                continue
            chars.append(self.symbols[i])
        return "".join(chars)

    def to_json(self) -> str:
        return json.dumps(list(self.symbols), ensure_ascii=True)

    @classmethod
    def from_json(cls, text: str) -> "Vocabulary":
        return cls(tuple(json.loads(text)))
