"""Arabic 101 keyboard adjacency used for fat-finger substitutions.

The physical grid below lists the letters produced by each key of the
standard Arabic 101 layout, row by row.  A cell may carry two letters
when the shifted state of the key types a second Arabic letter (e.g. the
plain-alef key also types alef-hamza).  Cells producing only ligatures
or non-letters are left empty so they act as gaps in the grid.
"""

from __future__ import annotations

# fmt: off
_KEY_ROWS: tuple[tuple[tuple[str, ...], ...], ...] = (
    # backquote key row (only the thal key types a letter here)
    (("ذ",),),
    # qwerty row: dad sad theh qaf feh ghain/alef-hamza-below ain/... heh
    # khah hah jeem dal
    (
        ("ض",), ("ص",), ("ث",), ("ق",), ("ف",),
        ("غ", "إ"), ("ع",), ("ه",), ("خ",),
        ("ح",), ("ج",), ("د",),
    ),
    # home row: sheen seen yeh beh lam alef/alef-hamza teh noon meem kaf tah
    (
        ("ش",), ("س",), ("ي",), ("ب",), ("ل",),
        ("ا", "أ"), ("ت",), ("ن",), ("م",),
        ("ك",), ("ط",),
    ),
    # bottom row: yeh-hamza hamza waw-hamza reh <lam-alef key> alef-maqsura/
    # alef-madda teh-marbuta waw zain zah
    (
        ("ئ",), ("ء",), ("ؤ",), ("ر",), (),
        ("ى", "آ"), ("ة",), ("و",), ("ز",),
        ("ظ",),
    ),
)
# fmt: on

# Column offset of each row on the physical board, in key widths.  Used so
# "diagonal" neighbours line up with the staggered rows.
_ROW_OFFSETS = (0.0, 1.5, 1.75, 2.25)


def build_adjacency(
    rows: tuple[tuple[tuple[str, ...], ...], ...] = _KEY_ROWS,
    offsets: tuple[float, ...] = _ROW_OFFSETS,
    reach: float = 1.85,
) -> dict[str, tuple[str, ...]]:
    """Map each letter to the letters on neighbouring keys.

    Two keys are neighbours when their centre distance is at most
    ``reach`` key widths, which captures the horizontal and diagonal
    neighbours of a staggered board.  Letters sharing one key (base and
    shifted) are also neighbours of each other.
    """
    positions: list[tuple[str, float, float]] = []
    for r, row in enumerate(rows):
        for c, cell in enumerate(row):
            for letter in cell:
                positions.append((letter, offsets[r] + c, float(r)))

    adjacency: dict[str, list[str]] = {}
    for letter, x, y in positions:
        near = []
        for other, ox, oy in positions:
            if other == letter:
                continue
            if (x - ox) ** 2 + (y - oy) ** 2 <= reach**2:
                near.append(other)
        if near:
            adjacency[letter] = sorted(set(near))
    return {k: tuple(v) for k, v in sorted(adjacency.items())}


DEFAULT_NEIGHBORS: dict[str, tuple[str, ...]] = build_adjacency()
