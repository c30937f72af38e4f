"""Direct products of partition lattices that are still four-generated.

Each factor is the equivalence lattice of a configuration; a family of
id-quadruples is assembled from bit vectors so that a "key" term singles
out each factor, which yields terms projecting the product generators onto
one factor at a time.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterator, Sequence

import numpy as np

from .closure import ClosureOptions, closure_size
from .core import FullEquivalence, ProductLattice
from .errors import CapacityError
from .terms import A, B, C, D, Term, eval_term
from .zadori import (BETA_HAT, GAMMA_HAT, IdQuadruple, build_configuration, length,
                     make_e_term, make_f_term, make_h_term, verify_generation_via_terms, z_width)

FULL_CLOSURE_CAP = 200_000
SBA_EXACT_MAX_T = 14
EXHAUSTIVE_MAX_DBV = 16

BitVector = tuple


# ---------------------------------------------------------------------------
# bit vectors


def airiness(v: Sequence[int]) -> int:
    """Length of the longest run of zeros."""
    best = run = 0
    for bit in v:
        run = run + 1 if bit == 0 else 0
        best = max(best, run)
    return best


def vec_leq(x: Sequence[int], y: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(x, y))


def dbv(u: int, t: int) -> Iterator[BitVector]:
    """Vectors (1, x_2, ..., x_t) with airiness below u."""
    if u < 1 or t < 1:
        raise ValueError("need u >= 1 and t >= 1")
    for tail in itertools.product((1, 0), repeat=t - 1):
        v = (1,) + tail
        if airiness(v) < u:
            yield v


def _layer(u: int, t: int, zeros: int) -> list[BitVector]:
    """Vectors of DBV(u, t) with exactly ``zeros`` zeros (all of them when zeros < u)."""
    out = []
    for pos in itertools.combinations(range(1, t), zeros):
        v = [1] * t
        for p in pos:
            v[p] = 0
        v = tuple(v)
        if airiness(v) < u:
            out.append(v)
    return out


def _comparability_matrix(codes: np.ndarray):
    """Sparse strict order x < y (as bitmasks) for Dilworth matching."""
    from scipy.sparse import csr_matrix

    rows, cols = [], []
    step = max(1, 4_000_000 // max(1, len(codes)))
    for lo in range(0, len(codes), step):
        x = codes[lo:lo + step, None]
        hit = ((x & codes[None, :]) == x) & (x != codes[None, :])
        r, c = np.nonzero(hit)
        rows.append(r + lo)
        cols.append(c)
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    data = np.ones(len(r), np.int8)
    return csr_matrix((data, (r, c)), shape=(len(codes), len(codes)))


@lru_cache(maxsize=None)
def sba_exact(u: int, t: int) -> int:
    """Size of the largest antichain in DBV(u, t).

    By Dilworth's theorem this is |DBV| minus a maximum matching in the
    bipartite graph of the strict order.
    """
    if t > SBA_EXACT_MAX_T:
        raise CapacityError(f"sba_exact is limited to t <= {SBA_EXACT_MAX_T}")
    from scipy.sparse.csgraph import maximum_bipartite_matching

    vecs = list(dbv(u, t))
    codes = np.array([int("".join(map(str, v)), 2) for v in vecs], np.int64)
    graph = _comparability_matrix(codes)
    matched = maximum_bipartite_matching(graph, perm_type="column")
    return len(vecs) - int((matched >= 0).sum())


def sba_bound(u: int, t: int) -> int:
    """Binomial lower bound on sba(u, t); exact when u-1 >= ceil((t-1)/2)."""
    if u < 1 or t < 1:
        raise ValueError("need u >= 1 and t >= 1")
    half = -(-(t - 1) // 2)
    if u - 1 >= half:
        return comb(t - 1, half)
    return comb(t - 1, u - 1)


def sba_bound_is_exact(u: int, t: int) -> bool:
    return u - 1 >= -(-(t - 1) // 2)


def _is_antichain(vs) -> bool:
    return all(not vec_leq(x, y) and not vec_leq(y, x) for x, y in itertools.combinations(vs, 2))


def check_related_antichains(X, Y, u: int, t: int) -> bool:
    members = set(dbv(u, t))
    if not all(v in members for v in list(X) + list(Y)):
        return False
    if not (_is_antichain(X) and _is_antichain(Y)):
        return False
    return all(not vec_leq(x, y) for x in X for y in Y)


def _search_pairs(p: int, q: int, u: int, t: int):
    pool = list(dbv(u, t))
    for X in itertools.combinations(pool, p):
        if not _is_antichain(X):
            continue
        cand = [y for y in pool if not any(vec_leq(x, y) for x in X)]
        for Y in itertools.combinations(cand, q):
            if _is_antichain(Y):
                return list(X), list(Y)
    return None


def tra_witness(p: int, q: int, u: int, t: int):
    """Antichains X, Y in DBV(u, t) with |X| = p, |Y| = q and no x <= y.

    Returns None when no witness is found.
    """
    if p < 0 or q < 0:
        raise ValueError("sizes must be nonnegative")
    top = min(u - 1, t - 1)
    found = None
    # one layer split in two
    for r in range(top + 1):
        layer = _layer(u, t, r)
        if len(layer) >= p + q:
            found = layer[:p], layer[p:p + q]
            break
    # two adjacent layers: more ones on the X side
    if found is None:
        for i in range(1, min(u, t)):
            lo, hi = _layer(u, t, i - 1), _layer(u, t, i)
            if p <= len(lo) and q <= len(hi):
                found = lo[:p], hi[:q]
                break
    if found is None and 2 ** (t - 1) <= EXHAUSTIVE_MAX_DBV:
        found = _search_pairs(p, q, u, t)
    if found is None:
        return None
    X, Y = found
    assert check_related_antichains(X, Y, u, t)
    return list(X), list(Y)


# ---------------------------------------------------------------------------
# the family of id-quadruples


def index_parameters(d: int, i: int, m_i: int) -> tuple[int, int]:
    """(u_i, t_i): the DBV from which the vectors of index i are drawn."""
    if i == 1:
        return d, m_i - 1
    if i == 2:
        return m_i - d, m_i - d - 1
    return d + 3 - i, m_i - d - 1


def lift(d: int, j: int, v: Sequence[int]) -> BitVector:
    if j == 1:
        return (0,) + tuple(v)
    return (1,) * (j - 1) + (0,) * (d + 2 - j) + tuple(v)


@dataclass
class PhiFamily:
    d: int
    ms: tuple
    pairs: tuple
    X: list = field(default_factory=list)
    Y: list = field(default_factory=list)
    one_necktie: bool = False
    phis: list = field(default_factory=list)

    def factor_sizes(self) -> list[int]:
        return [phi.n for phi in self.phis]

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "m": list(self.ms),
            "pairs": [list(pq) for pq in self.pairs],
            "X": [["".join(map(str, v)) for v in xs] for xs in self.X],
            "Y": [["".join(map(str, v)) for v in ys] for ys in self.Y],
            "one_necktie": self.one_necktie,
            "phis": [str(phi) for phi in self.phis],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "PhiFamily":
        d = json.loads(text)

        def vecs(rows):
            return [[tuple(int(ch) for ch in s) for s in row] for row in rows]

        return cls(d["d"], tuple(d["m"]), tuple(tuple(pq) for pq in d["pairs"]),
                   vecs(d["X"]), vecs(d["Y"]), d["one_necktie"],
                   [IdQuadruple.parse(s) for s in d["phis"]])


def build_phi(d: int, ms: Sequence[int], pairs: Sequence[tuple[int, int]], *,
              relaxed: bool = False) -> PhiFamily:
    """Assemble the family for lengths ``ms`` and antichain sizes ``pairs``.

    Without ``relaxed`` exactly d+2 indices with p_i + q_i > 0 are needed and
    every necktie is used. With ``relaxed`` missing indices and (0, 0) pairs
    drop factors, and a single necktie stands in for each necktie set.
    """
    ms, pairs = tuple(ms), tuple(tuple(pq) for pq in pairs)
    if d < 1 or d % 2 == 0:
        raise ValueError(f"d must be odd and positive, got {d}")
    if len(ms) != len(pairs):
        raise ValueError("one (p, q) pair is needed per length")
    if not ms or len(ms) > d + 2:
        raise ValueError(f"between 1 and d+2 = {d + 2} lengths are allowed")
    if not relaxed and len(ms) != d + 2:
        raise ValueError(f"exactly d+2 = {d + 2} lengths are needed (or use the relaxed mode)")
    if any(m % 2 == 0 for m in ms) or any(a >= b for a, b in zip(ms, ms[1:])):
        raise ValueError("lengths must be odd and strictly increasing")
    if ms[0] < 3 or d > ms[0]:
        raise ValueError("need m_1 >= 3 and d <= m_1")
    if not relaxed and any(p + q == 0 for p, q in pairs):
        raise ValueError("every index needs p_i + q_i > 0 (or use the relaxed mode)")
    if all(p + q == 0 for p, q in pairs):
        raise ValueError("the family would be empty")

    fam = PhiFamily(d, ms, pairs, one_necktie=relaxed)
    for j, (m, (p, q)) in enumerate(zip(ms, pairs), 1):
        u, t = index_parameters(d, j, m)
        if u < 1 or t < 1:
            raise ValueError(f"index {j}: DBV({u},{t}) is empty")
        witness = tra_witness(p, q, u, t)
        if witness is None:
            raise ValueError(f"index {j}: ({p},{q}) is not certified in tra({u},{t})")
        X, Y = witness
        fam.X.append(X)
        fam.Y.append(Y)
        ties = [(0, 1)] if relaxed else list(itertools.combinations(range(z_width(m)), 2))
        for x in X:
            fam.phis.append(IdQuadruple(m, 1, 1, lift(d, j, x)))
        for y in Y:
            for s, tt in ties:
                fam.phis.append(IdQuadruple(m, s, tt, lift(d, j, y)))
    assert len(set(fam.phis)) == len(fam.phis)
    return fam


# ---------------------------------------------------------------------------
# generators and terms


def product_context(phis: Sequence[IdQuadruple]):
    factors = [FullEquivalence(phi.n) for phi in phis]
    return factors[0] if len(factors) == 1 else ProductLattice(factors)


def product_generators(phis: Sequence[IdQuadruple]):
    """The four generators of the product, one component per id-quadruple."""
    if not phis:
        raise ValueError("the family is empty")
    mus = [build_configuration(phi).mu for phi in phis]
    if len(phis) == 1:
        return mus[0]
    return tuple(tuple(mu[i] for mu in mus) for i in range(4))


@lru_cache(maxsize=None)
def key_term(phi: IdQuadruple) -> Term:
    """Evaluates to the last zigzag atom on phi's own factor and to bottom elsewhere."""
    k, m = phi.k, phi.m
    s, t = phi.s, phi.t
    a_s, a_t1 = s, t + 1
    c = k + 2 if phi.trivial_necktie else 2 * k + 1

    def e(u, v):
        return make_e_term(phi, u, v)

    dot = e(a_s, a_t1) * (e(a_s, c) + e(a_t1, c))
    left = e(k - 1, a_s) + dot + e(a_t1, k)
    right = e(k - 1, a_t1) + dot + e(a_s, k)
    return make_f_term(phi, m + 1) * make_h_term(0) * left * right


@lru_cache(maxsize=None)
def projection_terms(phi: IdQuadruple) -> tuple[Term, Term, Term, Term]:
    """Terms sending the product generators to phi's component, bottom elsewhere."""
    beta_g = (key_term(phi) + C * D) * BETA_HAT
    beta2 = BETA_HAT * (beta_g + A)
    gamma2 = GAMMA_HAT * (beta_g + A)
    alpha2 = A * (beta2 + gamma2)
    beta3 = B * (alpha2 + C)
    gamma3 = C * (alpha2 + B)
    delta3 = D * (beta3 + gamma3)
    return alpha2, beta3, gamma3, delta3


# ---------------------------------------------------------------------------
# verification


def structural_report(phis: Sequence[IdQuadruple]) -> dict:
    """Check the projection terms factor by factor and the per-factor terms."""
    phis = list(phis)
    isolation = []
    for target in phis:
        terms = projection_terms(target)
        ok = True
        for phi in phis:
            cfg = build_configuration(phi)
            cache: dict = {}
            want = cfg.mu if phi == target else (cfg.ctx.bottom,) * 4
            got = tuple(eval_term(tm, cfg.mu, cfg.ctx, cache) for tm in terms)
            ok = ok and got == want
        isolation.append({"phi": str(target), "ok": ok})
    factors = [{"phi": str(phi), "ok": verify_generation_via_terms(phi)} for phi in phis]
    ok = all(r["ok"] for r in isolation + factors) and len(set(phis)) == len(phis)
    return {"mode": "structural", "ok": ok, "isolation": isolation, "factors": factors}


def full_closure_report(phis: Sequence[IdQuadruple], cap: int = FULL_CLOSURE_CAP) -> dict:
    ctx = product_context(phis)
    if ctx.size > cap:
        raise CapacityError(f"product has {ctx.size} elements, above the cap {cap}; "
                            "use the structural mode")
    size = closure_size(product_generators(phis), ctx, ClosureOptions(max_elements=cap))
    return {"mode": "full_closure", "ok": size == ctx.size, "closure_size": size,
            "product_size": ctx.size}


def verify_product_generation(phis: Sequence[IdQuadruple], mode: str = "structural",
                              cap: int = FULL_CLOSURE_CAP, report: bool = False):
    if mode == "structural":
        rep = structural_report(phis)
    elif mode == "full_closure":
        rep = full_closure_report(phis, cap)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rep["factors_n"] = [phi.n for phi in phis]
    return rep if report else rep["ok"]


# ---------------------------------------------------------------------------
# two-factor products Part(n) x Part(n')


def two_factor_family(n: int, n2: int) -> tuple[str, list[IdQuadruple]]:
    """(case name, id-quadruples) realising Part(n) x Part(n2), 5 <= n < n2."""
    if not 5 <= n < n2:
        raise ValueError("need 5 <= n < n'")
    if n == 5 and n2 == 6:
        return "small", [IdQuadruple(1, 1, 1, (1,)), IdQuadruple(1, 0, 1, (0,))]
    if n in (5, 6):
        m2 = length(n2)
        tie = (1, 1) if n == 5 else (0, 1)
        tie2 = (1, 1) if n2 % 2 else (0, 1)
        return "small-large", [IdQuadruple(1, *tie, (0,)), IdQuadruple(m2, *tie2, (1,) * m2)]
    if n % 2 and n2 == n + 1:
        m = length(n)
        fam = build_phi(m, [m], [(1, 1)], relaxed=True)
        return "consecutive", fam.phis
    m1, m2 = length(n), length(n2)
    pq1 = (1, 0) if n % 2 else (0, 1)
    pq2 = (1, 0) if n2 % 2 else (0, 1)
    fam = build_phi(m1, [m1, m2], [pq1, pq2], relaxed=True)
    return "general", fam.phis


def consecutive_product_plan(n: int) -> dict:
    """Family for Part(n) x Part(n+1) x ... x Part(3n-14)."""
    if n < 9:
        raise ValueError("the consecutive plan needs n >= 9")
    d = n - 6 if n % 2 else n - 7
    ms = [d + 2 * i for i in range(1, d + 2)]
    fam = build_phi(d, ms, [(1, 1)] * len(ms), relaxed=True)
    sizes = sorted(fam.factor_sizes())
    return {"n": n, "d": d, "family": fam, "sizes": sizes,
            "target": list(range(n, 3 * n - 13)),
            "covers_target": set(range(n, 3 * n - 13)) <= set(sizes)}


def power_product_plan(u: int) -> dict:
    """Parameters for a product with every factor raised to a power >= u."""
    if u < 1:
        raise ValueError("u must be positive")
    v = max(9, -(-u // 2))
    d = 4 * v + 1
    ms = [8 * v + 2 * i - 1 for i in range(1, v + 1)]
    bounds = []
    for i, m in enumerate(ms, 1):
        ui, ti = index_parameters(d, i, m)
        bounds.append({"i": i, "u": ui, "t": ti, "sba_bound": sba_bound(ui, ti),
                       "exact": sba_bound_is_exact(ui, ti)})
    ok = all(b["sba_bound"] >= 4 * v for b in bounds)
    return {"u": u, "v": v, "d": d, "m": ms, "p": 2 * v, "q": 2 * v, "bounds": bounds,
            "ok": ok and 2 * v >= u, "first_n": ms[0] + 4}


def large_power_certificate(threshold: int = 10 ** 127) -> dict:
    """Exact-binomial certificate for the 505-index example."""
    d = 579
    rows = []
    for i in range(1, 506):
        m = 1005 + 2 * i
        u, t = index_parameters(d, i, m)
        p = sba_bound(u, t) // 2
        rows.append({"i": i, "m": m, "u": u, "t": t, "p": p})
    smallest = min(r["p"] for r in rows)
    return {"d": d, "count": len(rows), "min_p": smallest, "min_p_digits": len(str(smallest)),
            "ok": all(r["p"] >= threshold for r in rows)}
