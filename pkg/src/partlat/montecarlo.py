"""Monte Carlo estimation of the proportion of generating four-sets.

Uniform random partitions come from the urn model: pick an urn count j
with probability j**n / (e * j! * B_n), throw each of the n labels into one
of j urns uniformly, and keep the nonempty urns as blocks.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable

import mpmath
import numpy as np

from .core import Partition, bell, completion_table

TAIL_MASS = 1e-12
CHUNK = 1 << 16
DEFAULT_SEED = 20200
LEVELS = (0.900, 0.950, 0.990, 0.999)
Z_TABLE = {0.900: 1.64485, 0.950: 1.95996, 0.990: 2.57583, 0.999: 3.29053}
CSV_HEADER = "n,k,s,p_pct,l900_lo,l900_hi,l950_lo,l950_hi,l990_lo,l990_hi,l999_lo,l999_hi"


# ---------------------------------------------------------------------------
# sampler


@lru_cache(maxsize=32)
def _urn_probs(n: int, tail: float) -> tuple[float, ...]:
    mpmath.mp.dps = 40
    scale = mpmath.e * bell(n)
    probs = [mpmath.mpf(0)]
    total = mpmath.mpf(0)
    j = 0
    while total < 1 - mpmath.mpf(tail) or j < 1:
        j += 1
        p = mpmath.mpf(j) ** n / (scale * mpmath.factorial(j))
        probs.append(p)
        total += p
    return tuple(float(p) for p in probs)


def urn_distribution(n: int, tail: float = TAIL_MASS) -> np.ndarray:
    """P(j urns) for j = 0, 1, ..., J, cut once the remaining mass is below ``tail``."""
    return np.array(_urn_probs(n, tail))


class StamSampler:
    """Uniform random partitions of an n-set via the urn model."""

    def __init__(self, n: int, seed: int | np.random.Generator | None = DEFAULT_SEED):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.probs = urn_distribution(n)
        self.mass = float(math.fsum(self.probs))
        self.cdf = np.cumsum(self.probs / self.mass)
        self.cdf[-1] = 1.0
        self.rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    def labels(self, size: int, rng: np.random.Generator | None = None) -> np.ndarray:
        """``size`` rows of urn labels; each row is one random partition."""
        rng = rng or self.rng
        urns = np.searchsorted(self.cdf, rng.random(size), side="right")
        return rng.integers(0, urns[:, None], size=(size, self.n))

    def sample(self) -> Partition:
        return Partition(self.labels(1)[0].tolist())

    def sample_ranks(self, size: int, rng: np.random.Generator | None = None) -> np.ndarray:
        from .tables import rank_rows

        T = np.array(completion_table(self.n), dtype=np.int64)
        return rank_rows(self.labels(size, rng), T, bell(self.n))


def stam_sample(sampler: StamSampler) -> Partition:
    return sampler.sample()


# ---------------------------------------------------------------------------
# confidence intervals


def normal_coverage(z: float) -> float:
    """Probability mass of the standard normal law on [-z, z]."""
    return math.erf(z / math.sqrt(2.0))


def z_for_level(level: float, tol: float = 1e-9) -> float:
    """Two-sided standard normal quantile, by bisection on the coverage."""
    if not 0.0 < level < 1.0:
        raise ValueError("confidence level must lie strictly between 0 and 1")
    lo, hi = 0.0, 1.0
    while normal_coverage(hi) < level:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if normal_coverage(mid) < level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def z_value(level: float) -> float:
    for key, z in Z_TABLE.items():
        if abs(level - key) < 1e-12:
            return z
    return z_for_level(level)


def sigma_bar(s: int, k: int) -> float:
    p = s / k
    return math.sqrt(p * (1.0 - p) / (k - 1))


def confidence_interval(s: int, k: int, level: float) -> tuple[float, float]:
    """p̄ ± z·σ̄ with p̄ = s/k and σ̄ = sqrt(p̄(1-p̄)/(k-1))."""
    if not 0.0 < level < 1.0:
        raise ValueError("confidence level must lie strictly between 0 and 1")
    if k < 2 or not 0 <= s <= k:
        raise ValueError("need k >= 2 and 0 <= s <= k")
    p = s / k
    half = z_value(level) * sigma_bar(s, k)
    return p - half, p + half


# ---------------------------------------------------------------------------
# reports


@dataclass
class SampleReport:
    n: int
    k: int
    s: int
    seed: int
    parallelism: int = 1
    wall_time: float = 0.0
    levels: tuple = LEVELS
    config: dict = field(default_factory=dict)

    @property
    def p_bar(self) -> float:
        return self.s / self.k

    @property
    def sigma_bar(self) -> float:
        return sigma_bar(self.s, self.k)

    @property
    def intervals(self) -> dict[float, tuple[float, float]]:
        return {lv: confidence_interval(self.s, self.k, lv) for lv in self.levels}

    def to_dict(self) -> dict:
        from . import __version__

        d = asdict(self)
        d["levels"] = list(self.levels)
        d["p_bar"] = self.p_bar
        d["sigma_bar"] = self.sigma_bar
        d["intervals"] = {f"{lv:.3f}": list(iv) for lv, iv in self.intervals.items()}
        d["version"] = __version__
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def csv_row(self) -> str:
        cells = [str(self.n), str(self.k), str(self.s), f"{100 * self.p_bar:.5f}"]
        for lv in LEVELS:
            lo, hi = confidence_interval(self.s, self.k, lv)
            cells += [f"{100 * lo:.5f}", f"{100 * hi:.5f}"]
        return ",".join(cells)


def gamma_bounds_from_sample(report: SampleReport, n: int | None = None,
                             level: float = 0.999) -> tuple[int, int]:
    """Scale the interval to a count of four-sets, rounding outward."""
    n = report.n if n is None else n
    total = comb(bell(n), 4)
    lo, hi = confidence_interval(report.s, report.k, level)
    return max(0, math.floor(lo * total)), math.ceil(hi * total)


# ---------------------------------------------------------------------------
# estimation


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def draw_quadruples(sampler: StamSampler, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` rows of four distinct partition ranks."""
    out = sampler.sample_ranks(4 * size, rng).reshape(size, 4)
    while True:
        srt = np.sort(out, axis=1)
        bad = np.nonzero((np.diff(srt, axis=1) == 0).any(axis=1))[0]
        if bad.size == 0:
            return out
        out[bad] = sampler.sample_ranks(4 * bad.size, rng).reshape(bad.size, 4)


def _successes(n: int, quads: np.ndarray) -> int:
    from .core import FullEquivalence

    ctx = FullEquivalence(n)
    if ctx.has_table:
        from .enumeration import default_prune
        from .tables import generates_rows

        t = ctx.table()
        return int(generates_rows(quads, t.meet, t.join, t.is_atom, t.natoms, t.top,
                                  default_prune(n)).sum())
    from .closure import generates

    return sum(generates([ctx.element(int(r)) for r in row], ctx) for row in quads)


def _run_chunk(n: int, seed: int, index: int, size: int) -> int:
    sampler = StamSampler(n, seed=None)
    rng = _chunk_rng(seed, index)
    return _successes(n, draw_quadruples(sampler, size, rng))


def estimate_rho(n: int, k: int, seed: int = DEFAULT_SEED, parallelism: int | None = None,
                 chunk: int = CHUNK, progress=None) -> SampleReport:
    """Draw k random four-sets of Part(n) and count the generating ones.

    Chunk i always uses the stream derived from (seed, i), so the result
    does not depend on the worker count.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if bell(n) < 4:
        raise ValueError(f"Part({n}) has fewer than four elements")
    from .enumeration import _threads

    workers = _threads(parallelism)
    start = time.perf_counter()
    sizes = [min(chunk, k - a) for a in range(0, k, chunk)]
    args = [(n, seed, i, sz) for i, sz in enumerate(sizes)]
    s = 0
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            for done, c in enumerate(pool.map(_run_chunk, *zip(*args)), 1):
                s += c
                if progress:
                    progress(done, len(args), s)
    else:
        for done, a in enumerate(args, 1):
            s += _run_chunk(*a)
            if progress:
                progress(done, len(args), s)
    config = {"n": n, "k": k, "seed": seed, "chunk": chunk}
    return SampleReport(n, k, s, seed, workers, time.perf_counter() - start, config=config)


def exact_rho(n: int, gamma: int) -> float:
    return gamma / comb(bell(n), 4)


def covers(report: SampleReport, value: float, level: float = 0.999) -> bool:
    lo, hi = confidence_interval(report.s, report.k, level)
    return lo <= value <= hi


def csv_table(reports: Iterable[SampleReport]) -> str:
    return "\n".join([CSV_HEADER] + [r.csv_row() for r in reports]) + "\n"
