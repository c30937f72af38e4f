"""Dense rank-indexed meet/join tables and the compiled closure kernels.

Everything here works on partition *ranks* (see ``core.rgs_rank``) so the
inner loops are plain integer table lookups.
"""
from __future__ import annotations

import threading

import numpy as np
from numba import njit

from .core import bell, completion_table, enumerate_partitions

STATUS_DONE = 0
STATUS_ATOMS = 1
STATUS_CAP = 2

# pruning bits for the enumeration kernels
PRUNE_JOIN = 1  # join of the four must be top
PRUNE_ENDS = 2  # bottom and top never belong to a generating four-set (n >= 4)


@njit(cache=True)
def _rank(rgs, T, total):
    n = rgs.shape[0]
    lex = 0
    b = 1
    for i in range(1, n):
        x = rgs[i]
        lex += x * T[i + 1, b]
        if x == b:
            b += 1
    return total - 1 - lex


@njit(cache=True)
def rank_rows(labels, T, total):
    """Canonicalize each row of arbitrary labels and return its rank."""
    m, n = labels.shape
    out = np.empty(m, np.int64)
    rgs = np.empty(n, np.int64)
    ids = np.empty(labels.max() + 1 if m > 0 else 1, np.int64)
    for r in range(m):
        mx = 0
        for i in range(n):
            v = labels[r, i]
            if v > mx:
                mx = v
        for v in range(mx + 1):
            ids[v] = -1
        nxt = 0
        for i in range(n):
            v = labels[r, i]
            if ids[v] < 0:
                ids[v] = nxt
                nxt += 1
            rgs[i] = ids[v]
        out[r] = _rank(rgs, T, total)
    return out


@njit(cache=True)
def _build_tables(rgs_all, T, total, meet, join):
    B, n = rgs_all.shape
    key = np.empty(n * n, np.int64)
    lab = np.empty(n, np.int64)
    parent = np.empty(n, np.int64)
    firstq = np.empty(n, np.int64)
    for i in range(B):
        p = rgs_all[i]
        for j in range(i, B):
            q = rgs_all[j]
            # meet: pairs of block ids
            for t in range(n * n):
                key[t] = -1
            nxt = 0
            for x in range(n):
                kk = p[x] * n + q[x]
                if key[kk] < 0:
                    key[kk] = nxt
                    nxt += 1
                lab[x] = key[kk]
            r = _rank(lab, T, total)
            meet[i, j] = r
            meet[j, i] = r
            # join: union p-blocks that share a q-block
            for t in range(n):
                parent[t] = t
                firstq[t] = -1
            for x in range(n):
                a = p[x]
                b = q[x]
                if firstq[b] < 0:
                    firstq[b] = a
                else:
                    ra = a
                    while parent[ra] != ra:
                        ra = parent[ra]
                    rb = firstq[b]
                    while parent[rb] != rb:
                        rb = parent[rb]
                    if ra != rb:
                        if ra < rb:
                            parent[rb] = ra
                        else:
                            parent[ra] = rb
            for t in range(n * n):
                key[t] = -1
            nxt = 0
            for x in range(n):
                ra = p[x]
                while parent[ra] != ra:
                    ra = parent[ra]
                if key[ra] < 0:
                    key[ra] = nxt
                    nxt += 1
                lab[x] = key[ra]
            r = _rank(lab, T, total)
            join[i, j] = r
            join[j, i] = r


@njit(cache=True)
def closure_kernel(gens, meet, join, is_atom, natoms, early_exit, cap, in_set, elems):
    """Semi-naive fixpoint: every new element is combined with all older ones.

    Returns (size, status). ``elems[:size]`` holds the elements found.
    ``in_set`` must be all-zero on entry and is left all-zero.
    """
    size = 0
    found = 0
    status = STATUS_DONE
    for g in gens:
        if in_set[g] == 0:
            in_set[g] = 1
            elems[size] = g
            size += 1
            if is_atom[g]:
                found += 1
    if early_exit and found == natoms:
        status = STATUS_ATOMS
    i = 0
    while status == STATUS_DONE and i < size:
        x = elems[i]
        for j in range(i):
            y = elems[j]
            z = meet[x, y]
            if in_set[z] == 0:
                if size >= cap:
                    status = STATUS_CAP
                    break
                in_set[z] = 1
                elems[size] = z
                size += 1
                if is_atom[z]:
                    found += 1
                    if early_exit and found == natoms:
                        status = STATUS_ATOMS
                        break
            z = join[x, y]
            if in_set[z] == 0:
                if size >= cap:
                    status = STATUS_CAP
                    break
                in_set[z] = 1
                elems[size] = z
                size += 1
                if is_atom[z]:
                    found += 1
                    if early_exit and found == natoms:
                        status = STATUS_ATOMS
                        break
        i += 1
    for t in range(size):
        in_set[elems[t]] = 0
    return size, status


@njit(cache=True)
def _generates(a, b, c, d, meet, join, is_atom, natoms, top, prune, in_set, elems, gens):
    if prune & PRUNE_ENDS:
        if a == 0 or b == 0 or c == 0 or d == 0:
            return False
        if a == top or b == top or c == top or d == top:
            return False
    if prune & PRUNE_JOIN:
        if join[join[a, b], join[c, d]] != top:
            return False
    gens[0] = a
    gens[1] = b
    gens[2] = c
    gens[3] = d
    size, status = closure_kernel(gens, meet, join, is_atom, natoms, True, elems.shape[0], in_set, elems)
    return status == STATUS_ATOMS


@njit(cache=True)
def _binom(n, k):
    if k < 0 or n < k:
        return 0
    r = 1
    for i in range(k):
        r = r * (n - i) // (i + 1)
    return r


@njit(cache=True)
def colex_unrank4(rank, out):
    """Four-subset {x0<x1<x2<x3} with sum C(x_i, i+1) == rank."""
    for k in range(4, 0, -1):
        x = k - 1
        while _binom(x + 1, k) <= rank:
            x += 1
        out[k - 1] = x
        rank -= _binom(x, k)


@njit(cache=True)
def _advance4(q):
    # next four-subset in colex order
    for i in range(3):
        if q[i] + 1 < q[i + 1]:
            q[i] += 1
            for j in range(i):
                q[j] = j
            return
    q[3] += 1
    for j in range(3):
        q[j] = j


@njit(cache=True)
def count_range(lo, hi, meet, join, is_atom, natoms, top, prune):
    B = meet.shape[0]
    in_set = np.zeros(B, np.uint8)
    elems = np.empty(B, np.int64)
    gens = np.empty(4, np.int64)
    q = np.empty(4, np.int64)
    colex_unrank4(lo, q)
    count = 0
    for r in range(lo, hi):
        if _generates(q[0], q[1], q[2], q[3], meet, join, is_atom, natoms, top, prune, in_set, elems, gens):
            count += 1
        _advance4(q)
    return count


@njit(cache=True)
def list_range(lo, hi, meet, join, is_atom, natoms, top, prune):
    B = meet.shape[0]
    in_set = np.zeros(B, np.uint8)
    elems = np.empty(B, np.int64)
    gens = np.empty(4, np.int64)
    q = np.empty(4, np.int64)
    out = np.empty((1024, 4), np.int64)
    cnt = 0
    colex_unrank4(lo, q)
    for r in range(lo, hi):
        if _generates(q[0], q[1], q[2], q[3], meet, join, is_atom, natoms, top, prune, in_set, elems, gens):
            if cnt == out.shape[0]:
                bigger = np.empty((2 * cnt, 4), np.int64)
                bigger[:cnt] = out
                out = bigger
            out[cnt] = q
            cnt += 1
        _advance4(q)
    return out[:cnt].copy()


@njit(cache=True)
def generates_rows(quads, meet, join, is_atom, natoms, top, prune):
    B = meet.shape[0]
    in_set = np.zeros(B, np.uint8)
    elems = np.empty(B, np.int64)
    gens = np.empty(4, np.int64)
    out = np.zeros(quads.shape[0], np.bool_)
    for r in range(quads.shape[0]):
        out[r] = _generates(quads[r, 0], quads[r, 1], quads[r, 2], quads[r, 3],
                            meet, join, is_atom, natoms, top, prune, in_set, elems, gens)
    return out


@njit(cache=True)
def orbit_count_range(lo, hi, meet, join, is_atom, natoms, top, prune, perms):
    """Count generating four-sets in [lo, hi) by orbit representatives.

    A four-set is closed-tested only when it is the colex-least member of its
    orbit under the relabelings in ``perms`` (rows map rank -> rank); its
    whole orbit size is then added. Each orbit is credited to the range
    holding its representative, so counts over disjoint ranges covering
    everything still add up to the total.
    """
    B = meet.shape[0]
    in_set = np.zeros(B, np.uint8)
    elems = np.empty(B, np.int64)
    gens = np.empty(4, np.int64)
    q = np.empty(4, np.int64)
    img = np.empty(4, np.int64)
    P = perms.shape[0]
    seen = np.empty(P, np.int64)
    colex_unrank4(lo, q)
    count = 0
    for r in range(lo, hi):
        minimal = True
        for p in range(P):
            for t in range(4):
                img[t] = perms[p, q[t]]
            img.sort()
            code = _binom(img[0], 1) + _binom(img[1], 2) + _binom(img[2], 3) + _binom(img[3], 4)
            if code < r:
                minimal = False
                break
            seen[p] = code
        if minimal:
            if _generates(q[0], q[1], q[2], q[3], meet, join, is_atom, natoms, top, prune, in_set, elems, gens):
                count += np.unique(seen).shape[0]
        _advance4(q)
    return count


# ---------------------------------------------------------------------------
# products of tabled factors


@njit(cache=True)
def _pcombine(x, y, which, offs, sizes, meetflat, joinflat):
    r = 0
    mul = 1
    for f in range(sizes.shape[0]):
        s = sizes[f]
        a = x % s
        b = y % s
        x //= s
        y //= s
        if which == 0:
            z = meetflat[offs[f] + a * s + b]
        else:
            z = joinflat[offs[f] + a * s + b]
        r += z * mul
        mul *= s
    return r


@njit(cache=True)
def product_closure_kernel(gens, sizes, offs, meetflat, joinflat, atomflat, aoffs,
                           natoms, early_exit, cap, in_set, elems):
    size = 0
    found = 0
    status = STATUS_DONE
    for g in gens:
        if in_set[g] == 0:
            in_set[g] = 1
            elems[size] = g
            size += 1
            if _is_patom(g, sizes, atomflat, aoffs):
                found += 1
    if early_exit and found == natoms:
        status = STATUS_ATOMS
    i = 0
    while status == STATUS_DONE and i < size:
        x = elems[i]
        for j in range(i):
            y = elems[j]
            for which in range(2):
                z = _pcombine(x, y, which, offs, sizes, meetflat, joinflat)
                if in_set[z] == 0:
                    if size >= cap:
                        status = STATUS_CAP
                        break
                    in_set[z] = 1
                    elems[size] = z
                    size += 1
                    if _is_patom(z, sizes, atomflat, aoffs):
                        found += 1
                        if early_exit and found == natoms:
                            status = STATUS_ATOMS
                            break
            if status != STATUS_DONE:
                break
        i += 1
    for t in range(size):
        in_set[elems[t]] = 0
    return size, status


@njit(cache=True)
def _is_patom(code, sizes, atomflat, aoffs):
    nonzero = 0
    atomic = False
    for f in range(sizes.shape[0]):
        s = sizes[f]
        a = code % s
        code //= s
        if a != 0:
            nonzero += 1
            atomic = atomflat[aoffs[f] + a] != 0
    return nonzero == 1 and atomic


# ---------------------------------------------------------------------------


class PartitionTable:
    """All partitions of an n-set by rank, with dense meet/join tables."""

    _cache: dict[int, "PartitionTable"] = {}
    _lock = threading.Lock()

    def __init__(self, n: int):
        self.n = n
        self.size = bell(n)
        self.T = np.array(completion_table(n), dtype=np.int64)
        self.rgs = np.array([p.block_of for p in enumerate_partitions(n, max_n=n)], dtype=np.int64)
        dtype = np.int16 if self.size < 2**15 else np.int32
        self.meet = np.empty((self.size, self.size), dtype)
        self.join = np.empty((self.size, self.size), dtype)
        _build_tables(self.rgs, self.T, self.size, self.meet, self.join)
        nblocks = self.rgs.max(axis=1) + 1
        self.is_atom = (nblocks == n - 1).astype(np.uint8)
        self.natoms = n * (n - 1) // 2
        self.bottom = 0
        self.top = self.size - 1

    @classmethod
    def get(cls, n: int) -> "PartitionTable":
        with cls._lock:
            t = cls._cache.get(n)
            if t is None:
                t = cls._cache[n] = cls(n)
            return t

    def rank_labels(self, labels: np.ndarray) -> np.ndarray:
        """Ranks of the partitions given as rows of arbitrary integer labels."""
        return rank_rows(np.ascontiguousarray(labels, dtype=np.int64), self.T, self.size)
