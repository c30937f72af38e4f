"""Exact counting and listing of four-element generating sets of Part(n).

Four-subsets are identified by their colexicographic rank over partition
ranks, so a job is just a half-open rank interval. Progress is saved to a
small text checkpoint after every round of chunks and can be resumed.
"""
from __future__ import annotations

import itertools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from .core import FullEquivalence, Partition, bell, encode_canonical, format_vector
from .closure import OrderType
from .errors import CapacityError, IntegrityError

CHECKPOINT_HEADER = "partlat-enum-checkpoint"
CHECKPOINT_VERSION = 1
DEFAULT_CHUNK = 1 << 20
MAX_ENUM_N = 8


def total_quadruples(n: int) -> int:
    return comb(bell(n), 4)


def default_prune(n: int) -> int:
    from .tables import PRUNE_ENDS, PRUNE_JOIN

    # for n = 3 the lattice is three-generated, so bottom/top may appear
    return PRUNE_JOIN | PRUNE_ENDS if n >= 4 else PRUNE_JOIN


@dataclass
class EnumJob:
    n: int
    lo: int = 0
    hi: int | None = None
    checkpoint: str | os.PathLike | None = None
    parallelism: int = 1
    prune: bool = True
    orbit_mode: bool = False
    chunk_size: int = DEFAULT_CHUNK

    def __post_init__(self):
        if not 1 <= self.n <= MAX_ENUM_N:
            raise CapacityError(f"n={self.n} is outside the enumerable range 1..{MAX_ENUM_N}")
        total = total_quadruples(self.n)
        if self.hi is None:
            self.hi = total
        if not 0 <= self.lo <= self.hi <= total:
            raise ValueError(f"range [{self.lo}, {self.hi}) not inside [0, {total})")
        if self.parallelism < 1 or self.chunk_size < 1:
            raise ValueError("parallelism and chunk_size must be positive")

    @property
    def prune_mask(self) -> int:
        return default_prune(self.n) if self.prune else 0


@dataclass
class EnumResult:
    n: int
    count: int
    lo: int
    hi: int
    quadruples: list[tuple[int, int, int, int]] | None = None
    antichain_violations: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def complete(self) -> bool:
        return self.lo == 0 and self.hi == total_quadruples(self.n)


# ---------------------------------------------------------------------------
# checkpoint file


def _job_fields(job: EnumJob) -> dict:
    return {
        "n": job.n,
        "total": total_quadruples(job.n),
        "lo": job.lo,
        "hi": job.hi,
        "prune": job.prune_mask,
        "orbit": int(job.orbit_mode),
    }


def write_checkpoint(path, job: EnumJob, next_rank: int, count: int) -> None:
    fields = _job_fields(job) | {"next": next_rank, "count": count}
    body = f"{CHECKPOINT_HEADER} v{CHECKPOINT_VERSION}\n"
    body += "".join(f"{k}={v}\n" for k, v in fields.items())
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(body)
    os.replace(tmp, path)


def read_checkpoint(path, job: EnumJob) -> tuple[int, int] | None:
    """(next_rank, count) saved for this job, or None if there is no file."""
    path = Path(path)
    if not path.exists():
        return None
    lines = path.read_text().splitlines()
    if not lines or lines[0] != f"{CHECKPOINT_HEADER} v{CHECKPOINT_VERSION}":
        raise IntegrityError(f"{path}: unknown checkpoint format")
    try:
        fields = dict(line.split("=", 1) for line in lines[1:] if line)
        fields = {k: int(v) for k, v in fields.items()}
        next_rank, count = fields.pop("next"), fields.pop("count")
    except (ValueError, KeyError) as exc:
        raise IntegrityError(f"{path}: malformed checkpoint ({exc})") from None
    expected = _job_fields(job)
    if fields != expected:
        diff = {k: (fields.get(k), v) for k, v in expected.items() if fields.get(k) != v}
        raise IntegrityError(f"{path}: checkpoint belongs to another job {diff}")
    if not job.lo <= next_rank <= job.hi or count < 0:
        raise IntegrityError(f"{path}: checkpoint position out of range")
    return next_rank, count


# ---------------------------------------------------------------------------
# workers


@lru_cache(maxsize=4)
def _perm_table(n: int) -> np.ndarray:
    from .tables import PartitionTable

    t = PartitionTable.get(n)
    perms = list(itertools.permutations(range(n)))
    labels = np.empty((len(perms) * t.size, n), np.int64)
    for k, perm in enumerate(perms):
        inv = np.argsort(perm)
        # relabeled partition: element perm[x] gets the block of x
        labels[k * t.size:(k + 1) * t.size] = t.rgs[:, inv]
    return t.rank_labels(labels).reshape(len(perms), t.size)


def _count_chunk(n: int, lo: int, hi: int, prune: int, orbit: bool) -> int:
    from .tables import PartitionTable, count_range, orbit_count_range

    t = PartitionTable.get(n)
    if orbit:
        return int(orbit_count_range(lo, hi, t.meet, t.join, t.is_atom, t.natoms, t.top,
                                     prune, _perm_table(n)))
    return int(count_range(lo, hi, t.meet, t.join, t.is_atom, t.natoms, t.top, prune))


def _list_chunk(n: int, lo: int, hi: int, prune: int) -> np.ndarray:
    from .tables import PartitionTable, list_range

    t = PartitionTable.get(n)
    return list_range(lo, hi, t.meet, t.join, t.is_atom, t.natoms, t.top, prune)


def _threads(parallelism: int | None) -> int:
    """Worker count; the PARTLAT_THREADS environment variable wins."""
    env = os.environ.get("PARTLAT_THREADS")
    if env:
        return max(1, int(env))
    return parallelism or 1


# ---------------------------------------------------------------------------
# public API


def count_generating_quadruples(
    n: int,
    parallelism: int | None = None,
    checkpoint=None,
    *,
    lo: int = 0,
    hi: int | None = None,
    prune: bool = True,
    orbit_mode: bool = False,
    chunk_size: int = DEFAULT_CHUNK,
    progress: Callable[[int, int], None] | None = None,
) -> EnumResult:
    """Exact number of generating four-sets of Part(n) with rank in [lo, hi).

    ``progress(next_rank, count)`` is called after each round, once the
    checkpoint (if any) has been written.
    """
    job = EnumJob(n, lo, hi, checkpoint, _threads(parallelism), prune, orbit_mode, chunk_size)
    start = time.perf_counter()
    pos, count = job.lo, 0
    if job.checkpoint is not None:
        saved = read_checkpoint(job.checkpoint, job)
        if saved is not None:
            pos, count = saved

    # build tables before forking so workers inherit them
    FullEquivalence(n).table()
    workers = job.parallelism
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        while pos < job.hi:
            bounds = []
            for _ in range(workers):
                if pos >= job.hi:
                    break
                end = min(pos + job.chunk_size, job.hi)
                bounds.append((pos, end))
                pos = end
            args = [(n, a, b, job.prune_mask, job.orbit_mode) for a, b in bounds]
            if pool is None:
                counts = [_count_chunk(*a) for a in args]
            else:
                counts = list(pool.map(_count_chunk, *zip(*args)))
            count += sum(counts)
            if job.checkpoint is not None:
                write_checkpoint(job.checkpoint, job, pos, count)
            if progress is not None:
                progress(pos, count)
    finally:
        if pool is not None:
            pool.shutdown()
    return EnumResult(n, count, job.lo, job.hi, elapsed=time.perf_counter() - start)


def iter_generating_quadruples(n: int, *, chunk_size: int = DEFAULT_CHUNK,
                               prune: bool = True) -> Iterator[tuple[int, int, int, int]]:
    """Stream generating four-sets of Part(n) as rank tuples, in colex order."""
    total = total_quadruples(n)
    EnumJob(n)  # range check
    mask = default_prune(n) if prune else 0
    for a in range(0, total, chunk_size):
        for row in _list_chunk(n, a, min(a + chunk_size, total), mask).tolist():
            yield tuple(row)


def list_generating_quadruples(n: int, out=None, **kw) -> list[tuple[int, int, int, int]] | int:
    """All generating four-sets of Part(n).

    Without ``out`` the rank tuples are returned as a list. With a path or a
    text stream, each set is written as one line of four padded vectors
    separated by ``|`` and the number of lines is returned.
    """
    stream = iter_generating_quadruples(n, **kw)
    if out is None:
        return list(stream)
    fh = open(out, "w") if isinstance(out, (str, os.PathLike)) else out
    ctx = FullEquivalence(n)
    written = 0
    try:
        for quad in stream:
            fh.write("|".join(format_vector(encode_canonical(ctx.element(r))) for r in quad))
            fh.write("\n")
            written += 1
    finally:
        if fh is not out:
            fh.close()
    return written


def classify_quadruples(n: int, quads) -> list[OrderType]:
    """Order type of each rank quadruple, using the meet table for comparisons."""
    from .tables import PartitionTable

    t = PartitionTable.get(n)
    q = np.asarray(quads, np.int64).reshape(-1, 4)
    comparable = np.zeros(len(q), np.int64)
    for i, j in itertools.combinations(range(4), 2):
        x, y = q[:, i], q[:, j]
        m = t.meet[x, y]
        comparable += (m == x) | (m == y)
    kinds = [OrderType.ANTICHAIN, OrderType.ONE_ONE_TWO]
    return [kinds[c] if c < 2 else OrderType.OTHER for c in comparable.tolist()]


def verify_all_antichain(n: int) -> tuple[bool, list[tuple[tuple[Partition, ...], OrderType]]]:
    """Check that every generating four-set of Part(n) is an antichain.

    Returns the verdict and the offending sets with their order types.
    """
    quads = np.array(list_generating_quadruples(n), np.int64).reshape(-1, 4)
    kinds = classify_quadruples(n, quads)
    ctx = FullEquivalence(n)
    bad = [
        (tuple(ctx.element(int(r)) for r in quad), kind)
        for quad, kind in zip(quads, kinds)
        if kind is not OrderType.ANTICHAIN
    ]
    return not bad, bad


def quadruple_from_rank(n: int, rank: int) -> tuple[int, int, int, int]:
    from .tables import colex_unrank4

    out = np.empty(4, np.int64)
    colex_unrank4(rank, out)
    return tuple(out.tolist())


def quadruple_rank(quad) -> int:
    a, b, c, d = sorted(quad)
    return comb(a, 1) + comb(b, 2) + comb(c, 3) + comb(d, 4)
