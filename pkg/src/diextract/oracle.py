"""Exhaustive exact-rational verification.

Everything here enumerates inputs outright and weighs them with
``fractions.Fraction``; uniformity is checked by exact equality.
"""

from __future__ import annotations

import itertools
import os
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .coins import HEADS, Extractor, elias_extract, peres_extract
from .dice import DieDistribution, generalized_extract
from .fixed_k import assign_output, stop_check

DEFAULT_COIN_CAP = 14
DEFAULT_DIE_CAP = 10**7
MAX_PHI_K = 4


class CapExceededError(ValueError):
    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


def env_cap(default: int) -> int:
    value = os.environ.get("DIEXTRACT_CAP")
    return int(value) if value else default


@dataclass
class ExactDist:
    entries: dict = field(default_factory=dict)
    residual: Fraction = Fraction(0)

    def total(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0)) + self.residual

    def by_length(self) -> dict:
        groups = defaultdict(dict)
        for y, pr in self.entries.items():
            groups[len(y)][y] = pr
        return dict(groups)


@dataclass
class UniformityReport:
    ok: bool
    violations: list
    by_length: dict

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "violations": [
                {"length": ln, "y": y, "y_prime": y2, "p_y": str(a), "p_y_prime": str(b)}
                for ln, y, y2, a, b in self.violations
            ],
            "by_length": {str(k): str(v) for k, v in sorted(self.by_length.items())},
        }


def _coin_weight(heads: int, tails: int, p: Fraction) -> Fraction:
    return p**heads * (1 - p) ** tails


def enumerate_coin(extractor: Extractor, n: int, p, cap: Optional[int] = None) -> ExactDist:
    cap = env_cap(DEFAULT_COIN_CAP) if cap is None else cap
    if n > cap:
        raise CapExceededError(f"n={n} exceeds coin enumeration cap {cap}")
    p = Fraction(p)
    if not 0 < p < 1:
        raise ValueError(f"bias must lie strictly between 0 and 1, got {p}")
    weights = [_coin_weight(h, n - h, p) for h in range(n + 1)]
    entries: dict = defaultdict(Fraction)
    for x in itertools.product("HT", repeat=n):
        entries[extractor("".join(x))] += weights[x.count(HEADS)]
    return ExactDist(dict(entries))


def _die_shard(args) -> dict:
    extractor, m, n, probs, first = args
    entries: dict = defaultdict(Fraction)
    for rest in itertools.product(range(m), repeat=n - 1):
        x = (first,) + rest
        weight = Fraction(1)
        for f in x:
            weight *= probs[f]
        if weight:
            entries[generalized_extract(x, extractor, m)] += weight
    return entries


def enumerate_die(extractor: Extractor, m: int, n: int, rho, cap: Optional[int] = None,
                  workers: int = 1) -> ExactDist:
    """Exact output law of the generalized scheme over all ``m**n`` roll sequences.

    Inputs are sharded by first roll; shards merge by exact addition, so the
    result does not depend on ``workers``.
    """
    cap = env_cap(DEFAULT_DIE_CAP) if cap is None else cap
    if m**n > cap:
        raise CapExceededError(f"m**n = {m**n} exceeds die enumeration cap {cap}")
    rho = rho if isinstance(rho, DieDistribution) else DieDistribution(tuple(rho))
    if not rho.exact or rho.m != m:
        raise ValueError("enumerate_die needs an exact distribution over m faces")
    if n == 0:
        return ExactDist({generalized_extract((), extractor, m): Fraction(1)})
    jobs = [(extractor, m, n, rho.probs, first) for first in range(m)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            shards = list(ex.map(_die_shard, jobs))
    else:
        shards = [_die_shard(j) for j in jobs]
    entries: dict = defaultdict(Fraction)
    for shard in shards:
        for y, pr in shard.items():
            entries[y] += pr
    return ExactDist(dict(entries))


def verify_uniformity(d: ExactDist) -> UniformityReport:
    """Check that every output length is spread evenly over all its strings.

    Strings of a length that never occur count as probability zero, so a
    length class with fewer than ``2**len`` positive entries is a violation.
    """
    violations = []
    common = {}
    for length, group in sorted(d.by_length().items()):
        positive = {y: pr for y, pr in group.items() if pr != 0}
        if not positive:
            continue
        ordered = sorted(positive.items())
        y0, p0 = ordered[0]
        common[length] = p0
        for y, pr in ordered[1:]:
            if pr != p0:
                violations.append((length, y0, y, p0, pr))
        if len(positive) < 1 << length:
            missing = next(
                "".join(b)
                for b in itertools.product("01", repeat=length)
                if "".join(b) not in positive
            )
            violations.append((length, y0, missing, p0, Fraction(0)))
    return UniformityReport(not violations, violations, common)


def class_counts(extractor: Extractor, n: int) -> dict:
    """``{heads: Counter(output -> number of preimages)}`` over all length-n inputs."""
    counts: dict = defaultdict(Counter)
    for x in itertools.product("HT", repeat=n):
        counts[x.count(HEADS)][extractor("".join(x))] += 1
    return dict(counts)


def verify_lemma1_counts(extractor: Extractor, n: int, cap: Optional[int] = None):
    """Return ``(ok, witness)``; witness is ``(k1, k2, y, y', count_y, count_y')``.

    Within each head-count class, every output string of a given length must
    have the same number of preimages (zero included).
    """
    cap = env_cap(DEFAULT_COIN_CAP) if cap is None else cap
    if n > cap:
        raise CapExceededError(f"n={n} exceeds coin enumeration cap {cap}")
    for heads, counter in sorted(class_counts(extractor, n).items()):
        lengths = {len(y) for y in counter}
        for length in sorted(lengths):
            strings = ["".join(b) for b in itertools.product("01", repeat=length)]
            c0 = counter.get(strings[0], 0)
            for y in strings[1:]:
                if counter.get(y, 0) != c0:
                    return False, (heads, n - heads, strings[0], y, c0, counter.get(y, 0))
    return True, None


@dataclass
class PrefixSetStat:
    heads: int
    tails: int
    size: int
    probability: Fraction
    full_length_share: Fraction


def enumerate_phi(k: int, p, residual_bound, max_depth: int = 4096, assign=assign_output):
    """Exact output law of ``phi_k`` by breadth-first search over toss counts.

    Sequences that share ``(heads, tails)`` are equiprobable, so the live
    part of the prefix tree is tracked as path counts per lattice point.
    Returns ``(ExactDist, [PrefixSetStat, ...])``; the distribution's
    residual is the mass of prefixes still live at the final depth. ``assign``
    maps ``(rank, set_size, k)`` to output bits. Hitting
    ``max_depth`` first raises with the partial result attached.
    """
    if not 1 <= k <= MAX_PHI_K:
        raise CapExceededError(f"k={k} outside supported range 1..{MAX_PHI_K}")
    p = Fraction(p)
    residual_bound = Fraction(residual_bound)
    if not 0 < p < 1:
        raise ValueError(f"bias must lie strictly between 0 and 1, got {p}")
    if residual_bound <= 0:
        raise ValueError("residual bound must be positive")

    entries: dict = defaultdict(Fraction)
    stats = []
    live = {(0, 0): 1}
    residual = Fraction(1)
    depth = 0
    while residual >= residual_bound:
        if depth >= max_depth:
            raise CapExceededError(
                f"depth {depth} reached with residual {float(residual):.3g} still unresolved",
                partial=(ExactDist(dict(entries), residual), stats),
            )
        depth += 1
        reached: dict = defaultdict(int)
        for (h, t), count in live.items():
            reached[(h + 1, t)] += count
            reached[(h, t + 1)] += count
        live = {}
        for (h, t), count in reached.items():
            if not stop_check(h, t, k):
                live[(h, t)] = count
                continue
            weight = _coin_weight(h, t, p)
            outputs = Counter(assign(r, count, k) for r in range(count))
            for y, c in outputs.items():
                entries[y] += c * weight
            full = sum(c for y, c in outputs.items() if len(y) == k)
            stats.append(PrefixSetStat(h, t, count, count * weight, Fraction(full, count)))
        residual = sum((_coin_weight(h, t, p) * c for (h, t), c in live.items()), Fraction(0))
    return ExactDist(dict(entries), residual), stats


def _vn_hh_emits_zero(x: str) -> str:
    out = []
    for i in range(0, len(x) - 1, 2):
        pair = x[i : i + 2]
        if pair == "HT":
            out.append("1")
        elif pair in ("TH", "HH"):
            out.append("0")
    return "".join(out)


def _elias_odd_member_zero(x: str) -> str:
    y = elias_extract(x)
    if y or x.count(HEADS) in (0, len(x)):
        return y
    return "0"


def _peres_leaks_equal_pair(x: str) -> str:
    # appends the first equal pair's symbol as a raw bit
    usable = len(x) - len(x) % 2
    for i in range(0, usable, 2):
        if x[i] == x[i + 1]:
            return peres_extract(x) + ("1" if x[i] == HEADS else "0")
    return peres_extract(x)


MUTANTS: dict[str, Extractor] = {
    "vn-hh0": _vn_hh_emits_zero,
    "elias-odd0": _elias_odd_member_zero,
    "peres-leak": _peres_leaks_equal_pair,
}


def _assign_modular(r: int, set_size: int, k: int) -> str:
    # every member gets k bits; uneven whenever 2**k does not divide the set
    return format(r % (1 << k), f"0{k}b")


ASSIGN_MUTANTS = {"modular": _assign_modular}
