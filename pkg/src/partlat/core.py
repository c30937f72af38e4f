"""Partitions of {0..n-1}, their lattice operations, and finite lattice contexts.

A partition is stored as its restricted growth string (RGS): ``block_of[i]``
is the block id of element ``i`` and ids are numbered by first occurrence.
That form is unique, so equality and hashing work on the tuple directly.

Ranks: partitions of an n-set are totally ordered by *descending*
lexicographic order of their RGS, so the bottom ``0,1,...,n-1`` has rank 0
and the top ``0,0,...,0`` has rank ``bell(n) - 1``.
"""
from __future__ import annotations

import itertools
from functools import lru_cache, reduce
from math import comb, prod
from typing import Iterable, Iterator, Sequence

from .errors import CapacityError, DimensionError

MAX_ENUM_N = 9


# ---------------------------------------------------------------------------
# Bell numbers and RGS counting tables


_bell_cache = [1]


def bell(n: int) -> int:
    """Number of partitions of an n-set, from the Bell triangle."""
    if n < 0:
        raise ValueError("bell(n) needs n >= 0")
    while len(_bell_cache) <= n:
        _extend_bell()
    return _bell_cache[n]


_triangle_row = [1]


def _extend_bell():
    global _triangle_row
    row = [_triangle_row[-1]]
    for x in _triangle_row:
        row.append(row[-1] + x)
    _triangle_row = row
    _bell_cache.append(row[0])


@lru_cache(maxsize=None)
def completion_table(n: int) -> tuple[tuple[int, ...], ...]:
    """``T[i][b]``: number of RGS tails for positions i..n-1 when b blocks are open."""
    T = [[0] * (n + 2) for _ in range(n + 1)]
    for b in range(n + 2):
        T[n][b] = 1
    for i in range(n - 1, -1, -1):
        for b in range(n + 1):
            T[i][b] = b * T[i + 1][b] + T[i + 1][b + 1]
    return tuple(tuple(r) for r in T)


# ---------------------------------------------------------------------------
# Partition


def _canonical(labels: Sequence) -> tuple[int, ...]:
    ids: dict = {}
    out = []
    for x in labels:
        j = ids.get(x)
        if j is None:
            j = ids[x] = len(ids)
        out.append(j)
    return tuple(out)


class Partition:
    """An equivalence relation on {0..n-1} in canonical block-id form.

    Instances are immutable. ``p & q`` is the meet, ``p | q`` the join and
    ``p <= q`` the refinement order.
    """

    __slots__ = ("block_of", "_hash")

    def __init__(self, labels: Iterable, *, canonical: bool = False):
        block_of = tuple(labels) if canonical else _canonical(tuple(labels))
        if not block_of:
            raise ValueError("a partition needs at least one element")
        self.block_of = block_of
        self._hash = hash(block_of)

    # constructors -------------------------------------------------------

    @classmethod
    def bottom(cls, n: int) -> "Partition":
        return cls(range(n), canonical=True)

    @classmethod
    def top(cls, n: int) -> "Partition":
        return cls((0,) * n, canonical=True)

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        """Blocks may omit singletons; overlapping blocks are merged."""
        return graph_equivalence(n, ((b[0], x) for b in map(list, blocks) if b for x in b[1:]))

    @classmethod
    def from_rgs(cls, text: str) -> "Partition":
        """Parse the compact form, e.g. ``"0010"``; ids above 9 need commas."""
        parts = text.split(",") if "," in text else list(text)
        p = cls(int(x) for x in parts)
        if p.block_of != tuple(int(x) for x in parts):
            raise ValueError(f"{text!r} is not a restricted growth string")
        return p

    # basic accessors ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.block_of)

    @property
    def nblocks(self) -> int:
        return max(self.block_of) + 1

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.nblocks)]
        for i, b in enumerate(self.block_of):
            out[b].append(i)
        return out

    def related(self, u: int, v: int) -> bool:
        return self.block_of[u] == self.block_of[v]

    def pairs(self) -> set[tuple[int, int]]:
        """The relation as a set of ordered pairs (including the diagonal)."""
        return {(u, v) for blk in self.blocks() for u in blk for v in blk}

    def to_rgs(self) -> str:
        sep = "," if self.n > 10 else ""
        return sep.join(map(str, self.block_of))

    def rank(self) -> int:
        return rgs_rank(self.block_of)

    def relabel(self, perm: Sequence[int]) -> "Partition":
        """Image under the permutation ``i -> perm[i]`` of the ground set."""
        labels = [0] * self.n
        for i, b in enumerate(self.block_of):
            labels[perm[i]] = b
        return Partition(labels)

    # lattice operations -------------------------------------------------

    def _check(self, other: "Partition"):
        if len(self.block_of) != len(other.block_of):
            raise DimensionError(f"partitions over {self.n} and {other.n} elements")

    def meet(self, other: "Partition") -> "Partition":
        self._check(other)
        nb = len(self.block_of)
        return Partition([a * nb + b for a, b in zip(self.block_of, other.block_of)])

    def join(self, other: "Partition") -> "Partition":
        self._check(other)
        p, q = self.block_of, other.block_of
        parent = list(range(max(p) + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        first = {}
        for a, b in zip(p, q):
            r = first.setdefault(b, a)
            if r != a:
                ra, rb = find(a), find(r)
                if ra != rb:
                    parent[ra] = rb
        return Partition([find(a) for a in p])

    def leq(self, other: "Partition") -> bool:
        self._check(other)
        image = {}
        for a, b in zip(self.block_of, other.block_of):
            if image.setdefault(a, b) != b:
                return False
        return True

    __and__ = meet
    __or__ = join

    def __le__(self, other: "Partition") -> bool:
        return self.leq(other)

    def __lt__(self, other: "Partition") -> bool:
        return self != other and self.leq(other)

    def __ge__(self, other: "Partition") -> bool:
        return other.leq(self)

    def __gt__(self, other: "Partition") -> bool:
        return self != other and other.leq(self)

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self.block_of == other.block_of

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "Partition(" + "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks()) + ")"


def kequ(n: int, elements: Iterable[int]) -> Partition:
    """Partition whose only nonsingleton block is ``elements``.

    Repeated elements are allowed, so ``kequ(n, [u, u])`` is the bottom.
    """
    elements = list(elements)
    return graph_equivalence(n, ((elements[0], x) for x in elements[1:]))


def atom(n: int, u: int, v: int) -> Partition:
    if u == v:
        raise ValueError("an atom needs two distinct elements; use kequ for the diagonal")
    if not (0 <= u < n and 0 <= v < n):
        raise ValueError(f"elements {u}, {v} out of range for n={n}")
    labels = list(range(n))
    labels[max(u, v)] = min(u, v)
    return Partition(labels)


def graph_equivalence(n: int, edges: Iterable[tuple[int, int]]) -> Partition:
    """Connected components of an undirected edge set on {0..n-1}."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    return Partition(find(i) for i in range(n))


def join_all(parts: Iterable[Partition], n: int) -> Partition:
    return reduce(Partition.join, parts, Partition.bottom(n))


# ---------------------------------------------------------------------------
# Ranking and enumeration


def rgs_rank(rgs: Sequence[int]) -> int:
    n = len(rgs)
    T = completion_table(n)
    lex = 0
    b = 1
    for i in range(1, n):
        x = rgs[i]
        lex += x * T[i + 1][b]
        if x == b:
            b += 1
    return bell(n) - 1 - lex


def rgs_unrank(n: int, rank: int) -> Partition:
    if not 0 <= rank < bell(n):
        raise ValueError(f"rank {rank} out of range for n={n}")
    T = completion_table(n)
    lex = bell(n) - 1 - rank
    out = [0]
    b = 1
    for i in range(1, n):
        step = T[i + 1][b]
        x = min(lex // step, b)
        lex -= x * step
        out.append(x)
        if x == b:
            b += 1
    return Partition(out, canonical=True)


def enumerate_partitions(n: int, max_n: int = MAX_ENUM_N) -> Iterator[Partition]:
    """All partitions of an n-set in rank order (bottom first, top last)."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > max_n:
        raise CapacityError(f"enumeration of Part({n}) exceeds max_n={max_n}")
    rgs = [0] * n

    def rec(i, b):
        if i == n:
            yield Partition(rgs, canonical=True)
            return
        for x in range(b, -1, -1):
            rgs[i] = x
            yield from rec(i + 1, b + 1 if x == b else b)

    yield from rec(1, 1)


# ---------------------------------------------------------------------------
# Padded block-vector format


def encode_canonical(p: Partition, pad_to: int | None = None) -> list[int]:
    """Blocks as sorted 1-indexed lists, ordered lexicographically, each
    followed by 0, then padded with -1 up to ``pad_to`` (default ``2n+1``)."""
    if pad_to is None:
        pad_to = 2 * p.n + 1
    out: list[int] = []
    for blk in sorted(p.blocks()):
        out.extend(x + 1 for x in blk)
        out.append(0)
    if len(out) > pad_to:
        raise CapacityError(f"encoding needs {len(out)} entries, pad_to={pad_to}")
    return out + [-1] * (pad_to - len(out))


def decode_canonical(vec: Sequence[int]) -> Partition:
    blocks: list[list[int]] = []
    cur: list[int] = []
    for x in vec:
        if x == -1:
            break
        if x == 0:
            if not cur:
                raise ValueError("empty block in encoded vector")
            blocks.append(cur)
            cur = []
        else:
            cur.append(x - 1)
    if cur:
        raise ValueError("encoded vector ends inside a block")
    elements = sorted(x for b in blocks for x in b)
    n = len(elements)
    if elements != list(range(n)):
        raise ValueError("encoded blocks do not cover 1..n exactly once")
    labels = [0] * n
    for j, blk in enumerate(blocks):
        for x in blk:
            labels[x] = j
    return Partition(labels)


def format_vector(vec: Sequence[int]) -> str:
    return "(" + ",".join(map(str, vec)) + ")"


def parse_vector(text: str) -> list[int]:
    return [int(x) for x in text.strip().strip("()").split(",") if x.strip()]


# ---------------------------------------------------------------------------
# Lattice contexts


class LatticeContext:
    """Read-only finite lattice: element access plus meet/join/leq."""

    # every element is a join of atoms; lets generation stop once all atoms appear
    atomistic = False

    def meet(self, x, y):
        raise NotImplementedError

    def join(self, x, y):
        raise NotImplementedError

    def leq(self, x, y) -> bool:
        return self.meet(x, y) == x

    @property
    def bottom(self):
        raise NotImplementedError

    @property
    def top(self):
        raise NotImplementedError

    @property
    def size(self) -> int:
        raise NotImplementedError

    def atoms(self) -> list:
        raise NotImplementedError

    def elements(self) -> Iterator:
        raise NotImplementedError

    def __contains__(self, x) -> bool:
        raise NotImplementedError


class FullEquivalence(LatticeContext):
    """Equ(n): all partitions of {0..n-1}."""

    TABLE_MAX_N = 8
    atomistic = True

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self._table = None

    def meet(self, x: Partition, y: Partition) -> Partition:
        return x.meet(y)

    def join(self, x: Partition, y: Partition) -> Partition:
        return x.join(y)

    def leq(self, x: Partition, y: Partition) -> bool:
        return x.leq(y)

    @property
    def bottom(self) -> Partition:
        return Partition.bottom(self.n)

    @property
    def top(self) -> Partition:
        return Partition.top(self.n)

    @property
    def size(self) -> int:
        return bell(self.n)

    def atoms(self) -> list[Partition]:
        return [atom(self.n, u, v) for u, v in itertools.combinations(range(self.n), 2)]

    def elements(self) -> Iterator[Partition]:
        return enumerate_partitions(self.n, max_n=max(MAX_ENUM_N, self.n))

    def __contains__(self, x) -> bool:
        return isinstance(x, Partition) and x.n == self.n

    def index(self, p: Partition) -> int:
        return p.rank()

    def element(self, i: int) -> Partition:
        return rgs_unrank(self.n, i)

    @property
    def has_table(self) -> bool:
        return self.n <= self.TABLE_MAX_N

    def table(self):
        """Dense meet/join tables over ranks (built once, n <= TABLE_MAX_N)."""
        if self._table is None:
            from .tables import PartitionTable

            self._table = PartitionTable.get(self.n)
        return self._table

    def __eq__(self, other):
        return isinstance(other, FullEquivalence) and other.n == self.n

    def __hash__(self):
        return hash(("Equ", self.n))

    def __repr__(self):
        return f"FullEquivalence({self.n})"


class ProductLattice(LatticeContext):
    """Direct product; elements are tuples, operations act componentwise."""

    def __init__(self, factors: Sequence[LatticeContext]):
        if not factors:
            raise ValueError("a product needs at least one factor")
        self.factors = tuple(factors)
        self.atomistic = all(f.atomistic for f in self.factors)

    def meet(self, x, y):
        return tuple(f.meet(a, b) for f, a, b in zip(self.factors, x, y))

    def join(self, x, y):
        return tuple(f.join(a, b) for f, a, b in zip(self.factors, x, y))

    def leq(self, x, y) -> bool:
        return all(f.leq(a, b) for f, a, b in zip(self.factors, x, y))

    @property
    def bottom(self):
        return tuple(f.bottom for f in self.factors)

    @property
    def top(self):
        return tuple(f.top for f in self.factors)

    @property
    def size(self) -> int:
        return prod(f.size for f in self.factors)

    def atoms(self) -> list:
        bottoms = self.bottom
        out = []
        for i, f in enumerate(self.factors):
            for a in f.atoms():
                out.append(bottoms[:i] + (a,) + bottoms[i + 1:])
        return out

    def elements(self) -> Iterator:
        return itertools.product(*(list(f.elements()) for f in self.factors))

    def __contains__(self, x) -> bool:
        return (
            isinstance(x, tuple)
            and len(x) == len(self.factors)
            and all(a in f for f, a in zip(self.factors, x))
        )

    def __repr__(self):
        return "ProductLattice(" + ", ".join(map(repr, self.factors)) + ")"


class ExplicitLattice(LatticeContext):
    """A finite sublattice given by its element list inside a parent context."""

    def __init__(self, elements: Iterable, parent: LatticeContext):
        self.parent = parent
        self._elements = list(dict.fromkeys(elements))
        if not self._elements:
            raise ValueError("empty lattice")
        self._set = set(self._elements)

    def meet(self, x, y):
        return self.parent.meet(x, y)

    def join(self, x, y):
        return self.parent.join(x, y)

    def leq(self, x, y) -> bool:
        return self.parent.leq(x, y)

    @property
    def bottom(self):
        return reduce(self.parent.meet, self._elements)

    @property
    def top(self):
        return reduce(self.parent.join, self._elements)

    @property
    def size(self) -> int:
        return len(self._elements)

    def atoms(self) -> list:
        bot = self.bottom
        above = [x for x in self._elements if x != bot]
        return [x for x in above if not any(y != x and self.leq(y, x) for y in above)]

    def elements(self) -> Iterator:
        return iter(self._elements)

    def __contains__(self, x) -> bool:
        return x in self._set


def choose4(n: int) -> int:
    """Number of four-element subsets of Part(n)."""
    return comb(bell(n), 4)
