"""Loaded dice via binarization trees.

Each face is written as a fixed-width binary word (0 -> T, 1 -> H, most
significant digit first). The tree node for prefix ``g`` collects, in input
order, the digit that follows ``g`` in every word starting with ``g``. Any
binary extractor applied node by node and concatenated in level order gives
unbiased output for the die.

Nodes are stored in a flat list in breadth-first order: root at index 0,
children of ``i`` at ``2i + 1`` (T) and ``2i + 2`` (H).
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .coins import HEADS, TAILS, Extractor

Number = Union[Fraction, float, int]


class MalformedTreeError(ValueError):
    """Tree labels violate the child-length consistency condition."""


def depth_for(m: int) -> int:
    """Tree depth ``ceil(log2 m) - 1``; words have ``depth + 1`` digits."""
    if m < 2:
        raise ValueError(f"alphabet size must be >= 2, got {m}")
    return (m - 1).bit_length() - 1


def prefixes(depth: int) -> list[str]:
    """All prefixes of length <= depth in level order, T before H."""
    out = [""]
    for level in range(1, depth + 1):
        out.extend("".join(p) for p in itertools.product(TAILS + HEADS, repeat=level))
    return out


def node_index(prefix: str) -> int:
    idx = 0
    for c in prefix:
        idx = 2 * idx + (2 if c == HEADS else 1)
    return idx


def face_bits(face: int, m: int) -> str:
    if not 0 <= face < m:
        raise ValueError(f"face {face} out of range for m={m}")
    width = depth_for(m) + 1
    return format(face, f"0{width}b").replace("0", TAILS).replace("1", HEADS)


@dataclass(frozen=True)
class DieSeq:
    faces: tuple[int, ...]
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"alphabet size must be >= 2, got {self.m}")
        for i, f in enumerate(self.faces):
            if not 0 <= f < self.m:
                raise ValueError(f"face {f} at position {i} out of range for m={self.m}")

    def __len__(self):
        return len(self.faces)


@dataclass(frozen=True)
class BinarizationTree:
    depth: int
    labels: tuple[str, ...] = field(repr=False)

    def label(self, prefix: str) -> str:
        return self.labels[node_index(prefix)]

    def __iter__(self):
        """Yield ``(prefix, label)`` in level order."""
        return zip(prefixes(self.depth), self.labels)

    def check_consistency(self) -> None:
        internal = (1 << self.depth) - 1
        for i in range(internal):
            x = self.labels[i]
            tails, heads = x.count(TAILS), len(x) - x.count(TAILS)
            if tails != len(self.labels[2 * i + 1]) or heads != len(self.labels[2 * i + 2]):
                raise MalformedTreeError(
                    f"node {i}: {tails} T / {heads} H but children hold "
                    f"{len(self.labels[2 * i + 1])} / {len(self.labels[2 * i + 2])} symbols"
                )


def empty_tree(m: int) -> BinarizationTree:
    b = depth_for(m)
    return BinarizationTree(b, ("",) * ((2 << b) - 1))


def build_tree(x: Union[DieSeq, Sequence[int]], m: int | None = None) -> BinarizationTree:
    if isinstance(x, DieSeq):
        faces, m = x.faces, x.m
    else:
        if m is None:
            raise ValueError("alphabet size m is required for a bare face list")
        faces = x
    b = depth_for(m)
    width = b + 1
    labels: list[list[str]] = [[] for _ in range((2 << b) - 1)]
    for i, face in enumerate(faces):
        if not 0 <= face < m:
            raise ValueError(f"face {face} at position {i} out of range for m={m}")
        node = 0
        for shift in range(width - 1, -1, -1):
            if (face >> shift) & 1:
                labels[node].append(HEADS)
                node = 2 * node + 2
            else:
                labels[node].append(TAILS)
                node = 2 * node + 1
    return BinarizationTree(b, tuple("".join(lab) for lab in labels))


def reconstruct(tree: BinarizationTree, m: int) -> DieSeq:
    """Invert :func:`build_tree` by walking root to leaf once per roll."""
    if tree.depth != depth_for(m):
        raise MalformedTreeError(f"tree depth {tree.depth} does not match m={m}")
    tree.check_consistency()
    cursors = [0] * len(tree.labels)
    faces = []
    for _ in range(len(tree.labels[0])):
        node = 0
        face = 0
        for _level in range(tree.depth + 1):
            symbol = tree.labels[node][cursors[node]]
            cursors[node] += 1
            bit = symbol == HEADS
            face = (face << 1) | bit
            node = 2 * node + (2 if bit else 1)
        if face >= m:
            raise MalformedTreeError(f"tree encodes face {face} outside alphabet m={m}")
        faces.append(face)
    return DieSeq(tuple(faces), m)


def generalized_extract(x: Union[DieSeq, Sequence[int]], extractor: Extractor, m: int | None = None) -> str:
    tree = build_tree(x, m)
    return "".join(extractor(label) for label in tree.labels)


def make_generalized(extractor: Extractor, m: int) -> Extractor:
    """Bind ``m`` so the generalized scheme has the single-argument extractor shape."""

    def run(faces):
        return generalized_extract(faces, extractor, m)

    run.__name__ = f"generalized_{getattr(extractor, '__name__', 'extractor')}_{m}"
    return run


@dataclass(frozen=True)
class DieDistribution:
    probs: tuple

    def __post_init__(self):
        probs = tuple(self.probs)
        object.__setattr__(self, "probs", probs)
        if len(probs) < 2:
            raise ValueError("a die needs at least two faces")
        if any(p < 0 for p in probs):
            raise ValueError(f"negative probability in {probs!r}")
        total = sum(probs)
        if self.exact:
            if total != 1:
                raise ValueError(f"probabilities sum to {total}, not 1")
        elif abs(float(total) - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {float(total)!r}, not 1")

    @property
    def m(self) -> int:
        return len(self.probs)

    @property
    def exact(self) -> bool:
        return all(isinstance(p, (int, Fraction)) for p in self.probs)

    @classmethod
    def parse(cls, values) -> "DieDistribution":
        """Build an exact distribution from strings such as ``"1/5"`` or ``"0.2"``."""
        return cls(tuple(Fraction(str(v)) for v in values))


@dataclass(frozen=True)
class ConditionalProbs:
    """``q[(prefix, symbol)]`` is P(next digit is symbol | word starts with prefix)."""

    q: dict
    unreachable: frozenset

    def __getitem__(self, key):
        return self.q[key]


def _as_distribution(rho) -> DieDistribution:
    return rho if isinstance(rho, DieDistribution) else DieDistribution(tuple(rho))


def conditional_probs(rho) -> ConditionalProbs:
    rho = _as_distribution(rho)
    m = rho.m
    b = depth_for(m)
    zero = Fraction(0) if rho.exact else 0.0
    mass = {}
    for g in prefixes(b + 1):
        mass[g] = zero
    for face, p in enumerate(rho.probs):
        word = face_bits(face, m)
        for level in range(b + 2):
            mass[word[:level]] += p
    q = {}
    unreachable = set()
    for g in prefixes(b):
        if mass[g] == 0:
            unreachable.add(g)
            continue
        q[(g, TAILS)] = mass[g + TAILS] / mass[g]
        q[(g, HEADS)] = mass[g + HEADS] / mass[g]
    return ConditionalProbs(q, frozenset(unreachable))


def sequence_prob(x: Union[DieSeq, Sequence[int]], rho) -> Fraction:
    """Exact probability of a roll sequence, computed two ways and cross-checked."""
    rho = _as_distribution(rho)
    if not rho.exact:
        raise ValueError("sequence_prob needs exact rational probabilities")
    faces = x.faces if isinstance(x, DieSeq) else tuple(x)
    direct = Fraction(1)
    for f in faces:
        direct *= rho.probs[f]

    tree = build_tree(faces, rho.m)
    cond = conditional_probs(rho)
    via_tree = Fraction(1)
    for g, label in tree:
        if not label:
            continue
        if g in cond.unreachable:
            via_tree = Fraction(0)
            break
        tails = label.count(TAILS)
        via_tree *= cond[(g, TAILS)] ** tails * cond[(g, HEADS)] ** (len(label) - tails)
    if direct != via_tree:
        raise AssertionError(f"product formula disagrees: {direct} != {via_tree}")
    return direct
