"""Fixed-input-length extractors for a biased coin.

Coin sequences are plain strings over ``"H"``/``"T"`` and extractor outputs
are strings over ``"0"``/``"1"``; the empty string is the empty output.
All arithmetic on class sizes and ranks uses Python integers, so nothing
here ever rounds.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from typing import Callable, Optional

HEADS = "H"
TAILS = "T"

Extractor = Callable[[str], str]


def as_coins(symbols) -> str:
    """Validate and normalise a coin sequence; ``1``/``0`` are accepted for H/T."""
    out = []
    for i, s in enumerate(symbols):
        if s in ("H", "1", 1, True):
            out.append(HEADS)
        elif s in ("T", "0", 0, False):
            out.append(TAILS)
        else:
            raise ValueError(f"invalid coin symbol {s!r} at position {i}")
    return "".join(out)


def binomial(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise ValueError("binomial arguments must be nonnegative")
    return math.comb(n, k)


def vn_extract(x: Sequence[str]) -> str:
    """von Neumann pairing: HT -> 1, TH -> 0, equal pairs emit nothing."""
    out = []
    for i in range(0, len(x) - 1, 2):
        a, b = x[i], x[i + 1]
        if a != b:
            out.append("1" if a == HEADS else "0")
    return "".join(out)


def lex_rank_in_class(x: Sequence[str]) -> int:
    """0-based rank of ``x`` among sequences with the same head count, H < T.

    Walks left to right keeping ``C(remaining, heads_left)``; every T passes
    over the block of completions that would have put an H there.
    """
    length = len(x)
    heads_left = sum(1 for s in x if s == HEADS)
    block = math.comb(length, heads_left)
    rank = 0
    for s in x:
        if s == HEADS:
            block = block * heads_left // length
            heads_left -= 1
        else:
            rank += block * heads_left // length
            block = block * (length - heads_left) // length
        length -= 1
    return rank


def rank_to_bits(r: int, class_size: int) -> str:
    """Map a rank to its output by peeling power-of-two blocks off the class.

    The largest block ``2**j <= W`` is assigned first; ranks inside it get the
    ``j``-bit big-endian encoding of the offset. A lone leftover member maps
    to the empty output.
    """
    if not 0 <= r < class_size:
        raise ValueError(f"rank {r} outside class of size {class_size}")
    remaining = class_size
    while True:
        j = remaining.bit_length() - 1
        block = 1 << j
        if r < block:
            return format(r, f"0{j}b") if j else ""
        r -= block
        remaining -= block


def elias_extract(x: Sequence[str]) -> str:
    heads = sum(1 for s in x if s == HEADS)
    return rank_to_bits(lex_rank_in_class(x), math.comb(len(x), heads))


def _peres(x, depth: Optional[int], out: list) -> None:
    usable = len(x) - (len(x) & 1)
    if usable < 2:
        return
    xor = []
    same = []
    for i in range(0, usable, 2):
        a, b = x[i], x[i + 1]
        if a != b:
            out.append("1" if a == HEADS else "0")
            xor.append(HEADS)
        else:
            xor.append(TAILS)
            same.append(b)
    if depth is not None:
        depth -= 1
        if depth == 0:
            return
    _peres(xor, depth, out)
    _peres(same, depth, out)


def peres_extract(x: Sequence[str], max_depth: Optional[int] = None) -> str:
    """Peres' iterated von Neumann scheme.

    Each level emits the von Neumann bits, then recurses on the pairwise XOR
    stream (H for unequal pairs) and on the second symbols of equal pairs.
    ``max_depth=1`` is plain von Neumann; ``None`` recurses until streams run
    dry.
    """
    if max_depth is not None and max_depth < 1:
        raise ValueError("max_depth must be a positive count or None")
    out: list = []
    _peres(x, max_depth, out)
    return "".join(out)


def entropy(dist: Sequence[float]) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    probs = [float(p) for p in dist]
    if not probs or any(p < 0 for p in probs) or abs(math.fsum(probs) - 1.0) > 1e-9:
        raise ValueError(f"not a probability distribution: {list(dist)!r}")
    return math.fsum(-p * math.log2(p) for p in probs if p > 0)


EXTRACTORS: dict[str, Extractor] = {
    "vn": vn_extract,
    "elias": elias_extract,
    "peres": peres_extract,
}


def get_extractor(name: str) -> Extractor:
    try:
        return EXTRACTORS[name]
    except KeyError:
        raise ValueError(
            f"unknown extractor {name!r}; choose from {sorted(EXTRACTORS)}"
        ) from None
