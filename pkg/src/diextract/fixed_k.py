"""Exactly-k-bit generation from a coin stream.

``phi_k`` reads tosses until the head/tail counts ``(h, t)`` first satisfy

    min(h, t) * C(h + t, h) >= 2**k * (h + t)

and then assigns the stopped sequence an output of at most ``k`` bits by
peeling ``2**k`` blocks (then smaller powers of two) off its prefix set: the
stopped sequences sharing its counts. ``generate_k_bits`` reruns ``phi_k`` on
the deficit until exactly ``k`` bits are out.

The stop region is closed upward in both counts (adding a toss never
un-stops a state), so a stopped state's prefix set is the part of the class
``G(k1, k2)`` whose last step comes from a live neighbour. Sizes and ranks
use that closed form; ``prefix_set_size_dp`` counts the same sets by lattice
paths through live states and is kept as the reference.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from functools import lru_cache

from .coins import HEADS, TAILS, lex_rank_in_class, rank_to_bits


class InsufficientEntropyError(Exception):
    """The stream ended before the stopping rule fired."""

    def __init__(self, heads: int, tails: int, target: int, bits: str = ""):
        self.heads = heads
        self.tails = tails
        self.target = target
        self.bits = bits
        super().__init__(
            f"stream exhausted after {heads + tails} tosses "
            f"({heads} H, {tails} T) without reaching the k={target} stopping rule"
        )


class RunawayIterationError(RuntimeError):
    pass


@dataclass(frozen=True)
class PhiResult:
    bits: str
    consumed: int


@dataclass(frozen=True)
class IterReport:
    bits: str
    total_consumed: int
    iterations: int


def stop_check(k1: int, k2: int, k: int) -> bool:
    low = min(k1, k2)
    if low < 1:
        return False
    return low * math.comb(k1 + k2, k1) >= (k1 + k2) << k


def _alive(k1: int, k2: int, k: int) -> bool:
    return k1 >= 0 and k2 >= 0 and not stop_check(k1, k2, k)


def prefix_set_size(k1: int, k2: int, k: int) -> int:
    """Number of stopped sequences with ``k1`` heads and ``k2`` tails."""
    if not stop_check(k1, k2, k):
        return 0
    n = k1 + k2
    size = 0
    if _alive(k1 - 1, k2, k):
        size += math.comb(n - 1, k1 - 1)
    if _alive(k1, k2 - 1, k):
        size += math.comb(n - 1, k1)
    return size


@lru_cache(maxsize=64)
def _path_table(k: int, max_len: int) -> dict:
    """Counts of sequences reaching ``(h, t)`` with every proper prefix live."""
    table = {(0, 0): 1}
    for n in range(1, max_len + 1):
        for h in range(n + 1):
            t = n - h
            count = 0
            if h and _alive(h - 1, t, k):
                count += table[(h - 1, t)]
            if t and _alive(h, t - 1, k):
                count += table[(h, t - 1)]
            table[(h, t)] = count
    return table


def prefix_set_size_dp(k1: int, k2: int, k: int) -> int:
    if not stop_check(k1, k2, k):
        return 0
    return _path_table(k, k1 + k2)[(k1, k2)]


def _first_stop(x: str, k: int) -> int:
    """Length of the first stopped prefix of ``x``, or -1."""
    h = t = 0
    comb = 1
    for i, s in enumerate(x):
        n = h + t + 1
        if s == HEADS:
            h += 1
            comb = comb * n // h
        else:
            t += 1
            comb = comb * n // t
        low = h if h < t else t
        if low and low * comb >= n << k:
            return i + 1
    return -1


def rank_in_prefix_set(x: str, k: int) -> int:
    """0-based lex rank (H < T) of ``x`` inside its prefix set."""
    if not x or _first_stop(x, k) != len(x):
        raise ValueError(f"{x!r} is not a member of any k={k} prefix set")
    k1 = x.count(HEADS)
    k2 = len(x) - k1
    from_h = _alive(k1 - 1, k2, k)
    from_t = _alive(k1, k2 - 1, k)
    if from_h and from_t:
        return lex_rank_in_class(x)
    # only one last symbol is possible, so members are (class of x[:-1]) + last
    return lex_rank_in_class(x[:-1])


def assign_output(r: int, set_size: int, k: int) -> str:
    if not 0 <= r < set_size:
        raise ValueError(f"rank {r} outside prefix set of size {set_size}")
    block = 1 << k
    while set_size >= block:
        if r < block:
            return format(r, f"0{k}b") if k else ""
        r -= block
        set_size -= block
    return rank_to_bits(r, set_size)


def phi_k(stream: Iterator[str] | Iterable[str], k: int) -> PhiResult:
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return PhiResult("", 0)
    stream = iter(stream)
    seen = []
    h = t = 0
    comb = 1
    while True:
        try:
            s = next(stream)
        except StopIteration:
            raise InsufficientEntropyError(h, t, k) from None
        n = h + t + 1
        if s == HEADS:
            h += 1
            comb = comb * n // h
        elif s == TAILS:
            t += 1
            comb = comb * n // t
        else:
            raise ValueError(f"invalid coin symbol {s!r} at toss {n}")
        seen.append(s)
        low = h if h < t else t
        if low and low * comb >= n << k:
            break

    # the removal rule on the last toss can only fire if the previous prefix
    # had already stopped, which sequential checking rules out
    prev_h, prev_t = (h - 1, t) if s == HEADS else (h, t - 1)
    assert not stop_check(prev_h, prev_t, k), "stopping rule skipped a prefix"

    x = "".join(seen)
    size = prefix_set_size(h, t, k)
    return PhiResult(assign_output(rank_in_prefix_set(x, k), size, k), len(x))


def generate_k_bits(stream, k: int, max_iterations: int = 64) -> IterReport:
    if k < 1:
        raise ValueError("k must be at least 1")
    stream = iter(stream)
    parts = []
    got = 0
    consumed = 0
    iterations = 0
    while got < k:
        if iterations >= max_iterations:
            raise RunawayIterationError(
                f"{iterations} iterations produced only {got} of {k} bits"
            )
        iterations += 1
        try:
            res = phi_k(stream, k - got)
        except InsufficientEntropyError as err:
            err.bits = "".join(parts)
            raise
        parts.append(res.bits)
        got += len(res.bits)
        consumed += res.consumed
    return IterReport("".join(parts), consumed, iterations)
