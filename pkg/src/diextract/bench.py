"""Seeded sources and Monte Carlo efficiency measurements."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .coins import entropy, get_extractor
from .dice import DieDistribution, generalized_extract
from .fixed_k import generate_k_bits

PRNG_ID = "numpy.random.PCG64"
_CHUNK = 4096


@dataclass(frozen=True)
class SourceSpec:
    kind: str  # "coin" or "die"
    params: object  # heads probability, or a sequence of face probabilities
    seed: int = 0

    def __post_init__(self):
        if self.kind == "coin":
            p = float(self.params)
            if not 0.0 < p < 1.0:
                raise ValueError(f"coin bias must lie strictly in (0, 1), got {self.params}")
        elif self.kind == "die":
            rho = DieDistribution(tuple(self.params))
            if sum(1 for q in rho.probs if q > 0) < 2:
                raise ValueError("degenerate die: fewer than two faces with positive mass")
        else:
            raise ValueError(f"unknown source kind {self.kind!r}")

    @property
    def probs(self) -> list[float]:
        if self.kind == "coin":
            p = float(self.params)
            return [p, 1.0 - p]
        return [float(q) for q in self.params]

    @property
    def entropy(self) -> float:
        return entropy(self.probs)

    def with_seed(self, seed: int) -> "SourceSpec":
        return SourceSpec(self.kind, self.params, seed)


class SimulatedSource:
    """Infinite reproducible symbol stream: ``"H"``/``"T"`` for coins, ints for dice."""

    prng = PRNG_ID

    def __init__(self, spec: SourceSpec):
        self.spec = spec
        self._rng = np.random.Generator(np.random.PCG64(spec.seed))
        self._buf: list = []
        self._pos = 0

    def draw(self, n: int):
        """Next ``n`` symbols as a string (coin) or list of faces (die)."""
        if self.spec.kind == "coin":
            u = self._rng.random(n) < float(self.spec.params)
            return "".join(np.where(u, "H", "T").tolist())
        return self._rng.choice(len(self.spec.probs), size=n, p=self.spec.probs).tolist()

    def __iter__(self):
        return self

    def __next__(self):
        if self._pos == len(self._buf):
            self._buf = list(self.draw(_CHUNK))
            self._pos = 0
        s = self._buf[self._pos]
        self._pos += 1
        return s


def simulate_source(spec: SourceSpec) -> SimulatedSource:
    return SimulatedSource(spec)


def chi_square_stat(spec: SourceSpec, n: int = 10**6) -> tuple[float, int]:
    """Pearson statistic and degrees of freedom for ``n`` draws; diagnostic only."""
    sample = SimulatedSource(spec).draw(n)
    if spec.kind == "coin":
        counts = np.array([sample.count("H"), sample.count("T")])
    else:
        counts = np.bincount(np.asarray(sample), minlength=len(spec.probs))
    expected = n * np.asarray(spec.probs)
    mask = expected > 0
    stat = float((((counts - expected) ** 2)[mask] / expected[mask]).sum())
    return stat, int(mask.sum()) - 1


def trial_seeds(seed: int, trials: int) -> list[int]:
    children = np.random.SeedSequence(seed).spawn(trials)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def monobit_z(bits: str) -> float:
    """Standardised excess of ones; ~N(0, 1) for fair bits."""
    if not bits:
        return 0.0
    ones = bits.count("1")
    return (2 * ones - len(bits)) / math.sqrt(len(bits))


@dataclass
class EfficiencyReport:
    scheme: str
    size: int  # block length n (fixed-n) or target k (fixed-k)
    trials: int
    mean: float  # bits per symbol (fixed-n) or tosses per bit (fixed-k)
    entropy: float
    ratio: float
    half_width: float  # 95% normal half-width on ratio
    mean_iterations: float | None = None
    monobit: float = 0.0
    seed: int = 0
    source: str = ""
    prng: str = PRNG_ID
    raw: list = field(default_factory=list, repr=False)

    def summary(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "raw"}
        return out

    def to_text(self) -> str:
        unit = "tosses/bit" if self.mean_iterations is not None else "bits/symbol"
        lines = [
            f"scheme      {self.scheme}",
            f"source      {self.source} (seed {self.seed}, {self.prng})",
            f"size        {self.size}",
            f"trials      {self.trials}",
            f"mean        {self.mean:.6f} {unit}",
            f"entropy     {self.entropy:.6f}",
            f"ratio       {self.ratio:.6f} +/- {self.half_width:.6f}",
        ]
        if self.mean_iterations is not None:
            lines.append(f"iterations  {self.mean_iterations:.4f}")
        lines.append(f"monobit z   {self.monobit:.3f}")
        return "\n".join(lines)

    def csv_rows(self) -> list[list]:
        header = ["trial", "symbols", "bits", "iterations"]
        return [header] + [list(r) for r in self.raw]


def _half_width(values: list[float]) -> float:
    if len(values) < 2:
        return 0.0
    return 1.96 * float(np.std(values, ddof=1)) / math.sqrt(len(values))


def _fixed_n_trial(args):
    scheme, spec, n = args
    src = SimulatedSource(spec)
    x = src.draw(n)
    if spec.kind == "coin":
        bits = get_extractor(scheme)(x)
    else:
        bits = generalized_extract(x, get_extractor(scheme), len(spec.probs))
    return n, bits


def _fixed_k_trial(args):
    k, spec = args
    rep = generate_k_bits(SimulatedSource(spec), k)
    return rep.total_consumed, rep.bits, rep.iterations


def _run(fn, jobs, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [fn(j) for j in jobs]


def _describe(spec: SourceSpec) -> str:
    if spec.kind == "coin":
        return f"coin p={spec.params}"
    return "die rho=(" + ",".join(str(q) for q in spec.params) + ")"


def bench_fixed_n(scheme: str, spec: SourceSpec, n: int, trials: int, workers: int = 1) -> EfficiencyReport:
    """Mean output bits per input symbol for blocks of ``n`` symbols."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    get_extractor(scheme)
    jobs = [(scheme, spec.with_seed(s), n) for s in trial_seeds(spec.seed, trials)]
    results = _run(_fixed_n_trial, jobs, workers)
    h = spec.entropy
    rates = [len(bits) / n if n else 0.0 for _, bits in results]
    mean = float(np.mean(rates))
    all_bits = "".join(b for _, b in results)
    return EfficiencyReport(
        scheme=scheme,
        size=n,
        trials=trials,
        mean=mean,
        entropy=h,
        ratio=mean / h,
        half_width=_half_width([r / h for r in rates]),
        monobit=monobit_z(all_bits),
        seed=spec.seed,
        source=_describe(spec),
        raw=[(i, n, len(b), 1) for i, (_, b) in enumerate(results)],
    )


def bench_fixed_k(k: int, spec: SourceSpec, trials: int, workers: int = 1) -> EfficiencyReport:
    """Tosses per output bit and iteration counts for the exactly-k scheme."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if spec.kind != "coin":
        raise ValueError("the fixed-k scheme takes a coin source")
    jobs = [(k, spec.with_seed(s)) for s in trial_seeds(spec.seed, trials)]
    results = _run(_fixed_k_trial, jobs, workers)
    h = spec.entropy
    ratios = [n * h / k for n, _, _ in results]
    mean_tosses = float(np.mean([n for n, _, _ in results]))
    return EfficiencyReport(
        scheme="fixed-k",
        size=k,
        trials=trials,
        mean=mean_tosses / k,
        entropy=h,
        ratio=float(np.mean(ratios)),
        half_width=_half_width(ratios),
        mean_iterations=float(np.mean([it for _, _, it in results])),
        monobit=monobit_z("".join(b for _, b, _ in results)),
        seed=spec.seed,
        source=_describe(spec),
        raw=[(i, n, len(b), it) for i, (n, b, it) in enumerate(results)],
    )
