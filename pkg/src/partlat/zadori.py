"""Zádori-type configurations, their quaternary terms, and the lower bound.

A configuration is a ground set a_0..a_k, b_0..b_{k-1} (plus an extra
point c when the necktie is nontrivial) carrying four equivalences
alpha, beta, gamma, delta. Elements are numbered a_i -> i, b_i -> k+1+i and
c -> 2k+1; with the trivial necktie, c is b_1.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Callable, Iterator, Sequence

import numpy as np

from .closure import OrderType, close, generates, order_type
from .core import FullEquivalence, Partition, atom, bell, enumerate_partitions, graph_equivalence, kequ
from .terms import A, B, C, D, Term, eval_term, join_all_terms, meet_all

# ---------------------------------------------------------------------------
# id-quadruples and configurations


def z_width(m: int) -> int:
    return (m + 3) // 2


@dataclass(frozen=True)
class IdQuadruple:
    """(m, s, t, z): odd length m, necktie (s, t), pin vector z of m bits."""

    m: int
    s: int
    t: int
    z: tuple

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(int(b) for b in self.z))
        if self.m < 1 or self.m % 2 == 0:
            raise ValueError(f"length must be odd and positive, got {self.m}")
        if len(self.z) != self.m or any(b not in (0, 1) for b in self.z):
            raise ValueError(f"pin vector must have {self.m} bits")
        if (self.s, self.t) != (1, 1) and not 0 <= self.s < self.t <= self.k - 1:
            raise ValueError(f"({self.s},{self.t}) is not a necktie for width {self.k}")

    @property
    def k(self) -> int:
        return z_width(self.m)

    @property
    def trivial_necktie(self) -> bool:
        return (self.s, self.t) == (1, 1)

    @property
    def n(self) -> int:
        return self.m + 4 if self.trivial_necktie else self.m + 5

    def necktie_free(self) -> "IdQuadruple":
        return IdQuadruple(self.m, 1, 1, self.z)

    def __str__(self):
        return f"{self.m}:{self.s}:{self.t}:{''.join(map(str, self.z))}"

    @classmethod
    def parse(cls, text: str) -> "IdQuadruple":
        m, s, t, bits = text.strip().split(":")
        return cls(int(m), int(s), int(t), tuple(int(ch) for ch in bits))


def neckties(m: int, include_trivial: bool = True) -> list[tuple[int, int]]:
    k = z_width(m)
    out = [(1, 1)] if include_trivial else []
    return out + list(itertools.combinations(range(k), 2))


def all_id_quadruples(m: int) -> Iterator[IdQuadruple]:
    for s, t in neckties(m):
        for z in itertools.product((0, 1), repeat=m):
            yield IdQuadruple(m, s, t, z)


class ZConfig:
    """The configuration of an id-quadruple with its four equivalences."""

    def __init__(self, phi: IdQuadruple):
        self.phi = phi
        k = self.k = phi.k
        self.n = phi.n
        self.a = list(range(k + 1))
        self.b = [k + 1 + i for i in range(k)]
        self.c = self.b[1] if phi.trivial_necktie else 2 * k + 1
        self.ctx = FullEquivalence(self.n)
        self.names = {x: f"a{i}" for i, x in enumerate(self.a)}
        self.names.update({x: f"b{i}" for i, x in enumerate(self.b)})
        if not phi.trivial_necktie:
            self.names[self.c] = "c"

        # zigzag edges I_0 .. I_{m+1}
        self.edges = []
        for j in range(phi.m + 2):
            half = j // 2
            if j % 2 == 0:
                self.edges.append((self.a[half], self.a[half + 1]))
            else:
                self.edges.append((self.b[half], self.b[half + 1]))

        n, a, b, s, t = self.n, self.a, self.b, phi.s, phi.t
        self.alpha = kequ(n, a) | kequ(n, b)
        self.beta = graph_equivalence(n, [(b[s], self.c)] + [(a[i], b[i]) for i in range(k)])
        self.gamma = graph_equivalence(n, [(b[t], self.c)] + [(a[i + 1], b[i]) for i in range(k)])
        pins = [self.edges[i] for i in range(1, phi.m + 1) if phi.z[i - 1] == 1]
        self.delta = graph_equivalence(n, [(a[0], b[0]), (a[k], b[k - 1])] + pins)

    @property
    def mu(self) -> tuple[Partition, Partition, Partition, Partition]:
        return self.alpha, self.beta, self.gamma, self.delta

    def edge_atom(self, j: int) -> Partition:
        return atom(self.n, *self.edges[j])

    def edges_join(self, lo: int, hi: int) -> Partition:
        """Join of the zigzag atoms I_lo .. I_hi."""
        return graph_equivalence(self.n, self.edges[lo:hi + 1])

    def base_points(self) -> list[int]:
        return self.a + self.b

    def __repr__(self):
        return f"ZConfig({self.phi})"


@lru_cache(maxsize=None)
def build_configuration(phi: IdQuadruple) -> ZConfig:
    return ZConfig(phi)


# ---------------------------------------------------------------------------
# terms


BETA_HAT = B * (A + D)
GAMMA_HAT = C * (A + D)
BOTTOM_TERM = meet_all([A, BETA_HAT, GAMMA_HAT, D])


def side_terms() -> tuple[Term, Term]:
    """Terms giving equ(a_0, b_0) and equ(a_k, b_{k-1})."""
    return BETA_HAT * D, GAMMA_HAT * D


@lru_cache(maxsize=None)
def _f_chain(m: int, z: tuple) -> tuple[Term, ...]:
    f = [A * (BETA_HAT * D + GAMMA_HAT)]
    for i in range(m + 1):
        pinned = i < m and z[i] == 1  # z[i] is bit number i+1
        hat = BETA_HAT if i % 2 == 0 else GAMMA_HAT
        f.append((f[i] + hat) * (A * D if pinned else A))
    return tuple(f)


def make_f_term(phi: IdQuadruple, i: int) -> Term:
    """Term going to the right; defined for 0 <= i <= m+1."""
    if not 0 <= i <= phi.m + 1:
        raise ValueError(f"f_{i} is undefined for length {phi.m}")
    return _f_chain(phi.m, phi.z)[i]


@lru_cache(maxsize=None)
def make_h_term(i: int) -> Term:
    """Term going to the left."""
    if i < 0:
        raise ValueError("h_i needs i >= 0")
    if i == 0:
        return A * (GAMMA_HAT * D + BETA_HAT)
    hat = GAMMA_HAT if (i - 1) % 2 == 0 else BETA_HAT
    return (make_h_term(i - 1) + hat) * A


def make_g_term(phi: IdQuadruple, j: int) -> Term:
    if not 0 <= j <= phi.m + 1:
        raise ValueError(f"g_{j} is undefined for length {phi.m}")
    return make_f_term(phi, j) * make_h_term(phi.m + 1 - j)


def circle_term(length: int, i: int, j: int, neighbour: Callable[[int], Term]) -> Term:
    """Meet of the two arc-joins between circle positions i < j.

    ``neighbour(x)`` is a term for the pair (d_x, d_{x+1 mod length}).
    """
    if not 0 <= i < j < length:
        raise ValueError("need 0 <= i < j < length")
    inner = join_all_terms([neighbour(x) for x in range(i, j)])
    outer = join_all_terms([neighbour(x) for x in itertools.chain(range(j, length), range(i))])
    return inner * outer


def _trivial_circle(cfg_k: int) -> list[tuple[str, int]]:
    return [("a", i) for i in range(cfg_k + 1)] + [("b", i) for i in range(cfg_k - 1, -1, -1)]


def _necktie_circle(k: int, s: int, t: int) -> list[tuple[str, int]]:
    seq = [("a", i) for i in range(s + 1)] + [("c", 0)]
    seq += [("a", i) for i in range(t + 1, k + 1)]
    seq += [("b", i) for i in range(k - 1, t - 1, -1)]
    for j in range(t, s, -1):
        seq += [("a", j), ("b", j - 1)]
    seq += [("b", i) for i in range(s - 1, -1, -1)]
    return seq


def _element_id(k: int, label: tuple[str, int], trivial: bool) -> int:
    kind, i = label
    if kind == "a":
        return i
    if kind == "b":
        return k + 1 + i
    return k + 2 if trivial else 2 * k + 1


@lru_cache(maxsize=None)
def _circle(phi: IdQuadruple) -> tuple[tuple[int, ...], dict]:
    k = phi.k
    if phi.trivial_necktie:
        labels = _trivial_circle(k)
    else:
        labels = _necktie_circle(k, phi.s, phi.t)
    ids = tuple(_element_id(k, lab, phi.trivial_necktie) for lab in labels)
    assert len(set(ids)) == phi.n == len(ids)
    return ids, {x: p for p, x in enumerate(ids)}


@lru_cache(maxsize=None)
def _trivial_neighbour(phi: IdQuadruple, x: int) -> Term:
    k = phi.k
    left, right = side_terms()
    if x < k:
        return make_g_term(phi, 2 * x)
    if x == k:
        return right
    if x < 2 * k:
        y = 2 * k - x - 1
        return make_g_term(phi, 2 * y + 1)
    return left


@lru_cache(maxsize=None)
def make_e_term(phi: IdQuadruple, u: int, v: int) -> Term:
    """Term whose value at the configuration's quadruple is equ(u, v)."""
    if not (0 <= u < phi.n and 0 <= v < phi.n):
        raise ValueError(f"{u}, {v} are not elements of the configuration {phi}")
    if u == v:
        return BOTTOM_TERM
    if u > v:
        u, v = v, u
    if phi.trivial_necktie:
        ids, pos = _circle(phi)
        i, j = sorted((pos[u], pos[v]))
        return circle_term(len(ids), i, j, lambda x: _trivial_neighbour(phi, x))

    k, s, t = phi.k, phi.s, phi.t
    c = 2 * k + 1
    base = phi.necktie_free()
    if c not in (u, v):
        return make_e_term(base, u, v)
    other = u if v == c else v
    joint = make_e_term(base, s, t + 1)
    if other == s:
        return B * (C + joint)
    if other == t + 1:
        return C * (B + joint)
    ids, pos = _circle(phi)
    i, j = sorted((pos[u], pos[v]))
    return circle_term(len(ids), i, j, lambda x: make_e_term(phi, ids[x], ids[(x + 1) % len(ids)]))


def evaluate(term: Term, cfg: ZConfig, cache: dict | None = None) -> Partition:
    return eval_term(term, cfg.mu, cfg.ctx, cache)


# ---------------------------------------------------------------------------
# verification


def verify_generation_via_terms(phi: IdQuadruple, report: bool = False):
    """Every atom of Equ(Z_phi) is the value of its e-term.

    With ``report`` a dict with the failures is returned instead of a bool.
    """
    cfg = build_configuration(phi)
    cache: dict = {}
    bad = []
    bottom = cfg.ctx.bottom
    for u in range(cfg.n):
        for v in range(u, cfg.n):
            want = bottom if u == v else atom(cfg.n, u, v)
            got = evaluate(make_e_term(phi, u, v), cfg, cache)
            if got != want:
                bad.append((u, v))
    if report:
        return {"phi": str(phi), "n": cfg.n, "ok": not bad, "failures": bad}
    return not bad


def closure_generates(phi: IdQuadruple) -> bool:
    cfg = build_configuration(phi)
    return generates(cfg.mu, cfg.ctx)


def gets_through(phi_key: IdQuadruple, phi: IdQuadruple, i: int | None = None) -> bool:
    """Does f'_i of ``phi_key`` reach the last zigzag atom of Z_phi?

    ``i`` defaults to the last index m'+1.
    """
    cfg = build_configuration(phi)
    i = phi_key.m + 1 if i is None else i
    value = evaluate(make_f_term(phi_key, i), cfg)
    return cfg.edge_atom(phi.m + 1) <= value


def effectiveness(phi_key: IdQuadruple, phi: IdQuadruple, j: int) -> int | None:
    """Smallest u <= m+1 with f'_j(mu_phi) below the join of I_0 .. I_u."""
    cfg = build_configuration(phi)
    value = evaluate(make_f_term(phi_key, j), cfg)
    for u in range(phi.m + 2):
        if value <= cfg.edges_join(0, u):
            return u
    return None


# ---------------------------------------------------------------------------
# lower bound and the explicit family


def width(n: int) -> int:
    return (n - 1) // 2


def length(n: int) -> int:
    return n - 4 if n % 2 else n - 5


def lower_bound(n: int) -> int:
    """Explicit lower bound on the number of four-element generating sets (n >= 7)."""
    if n < 7:
        raise ValueError("the bound is stated for n >= 7")
    w = width(n)
    num = factorial(n) * comb(w, 2) ** (n - 4 - length(n)) * bell(w - 1) * bell(w)
    assert num % 2 == 0
    return num // 2


def _base_phi(n: int, necktie: tuple[int, int] | None) -> IdQuadruple:
    m = length(n)
    if n % 2:
        necktie = (1, 1)
    elif necktie is None or necktie == (1, 1):
        necktie = (0, 1)
    return IdQuadruple(m, necktie[0], necktie[1], (0,) * m)


def family_member(n: int, mu1: Partition, mu2: Partition,
             necktie: tuple[int, int] | None = None) -> tuple[Partition, ...]:
    """(alpha, beta, gamma, delta') with delta' built from mu1 on a_1..a_{k-1}
    and mu2 on b_0..b_{k-1}."""
    phi = _base_phi(n, necktie)
    cfg = build_configuration(phi)
    k = cfg.k
    if mu1.n != k - 1 or mu2.n != k:
        raise ValueError(f"mu1 must live on {k - 1} points and mu2 on {k} points")
    carrier1 = cfg.a[1:k]
    carrier2 = cfg.b
    pairs = [(cfg.a[0], cfg.b[0]), (cfg.a[k], cfg.b[k - 1])]
    for mu, carrier in ((mu1, carrier1), (mu2, carrier2)):
        for block in mu.blocks():
            pairs += [(carrier[block[0]], carrier[x]) for x in block[1:]]
    delta = graph_equivalence(cfg.n, pairs)
    return cfg.alpha, cfg.beta, cfg.gamma, delta


def enumerate_family(n: int) -> Iterator[tuple[Partition, ...]]:
    """All quadruples of the explicit family on the fixed labeling of Z."""
    k = width(n)
    ties = [(1, 1)] if n % 2 else list(itertools.combinations(range(k), 2))
    for tie in ties:
        for mu1 in enumerate_partitions(k - 1, max_n=k):
            for mu2 in enumerate_partitions(k, max_n=k):
                yield family_member(n, mu1, mu2, tie)


def orbit_count(n: int, quads: Sequence[Sequence[Partition]]) -> int:
    """Number of distinct four-sets obtained from ``quads`` by all relabelings."""
    from .core import completion_table
    from .tables import rank_rows

    distinct = list(dict.fromkeys(p for q in quads for p in q))
    index = {p: i for i, p in enumerate(distinct)}
    R = np.array([p.block_of for p in distinct], np.int64)
    perms = np.array(list(itertools.permutations(range(n))), np.int64)
    inv = np.argsort(perms, axis=1)
    T = np.array(completion_table(n), np.int64)
    images = rank_rows(R[:, inv].reshape(-1, n), T, bell(n)).reshape(len(distinct), len(perms))
    B = bell(n)
    codes = []
    for q in quads:
        cols = np.sort(images[[index[p] for p in q]], axis=0)
        code = ((cols[0] * B + cols[1]) * B + cols[2]) * B + cols[3]
        codes.append(code)
    return int(np.unique(np.concatenate(codes)).size)


def family_sample_generates(n: int, size: int = 100, seed: int = 0) -> bool:
    """Random relabelings of random family members all generate Equ(n)."""
    rng = random.Random(seed)
    fam = list(enumerate_family(n))
    ctx = FullEquivalence(n)
    for _ in range(size):
        quad = rng.choice(fam)
        perm = list(range(n))
        rng.shuffle(perm)
        if not generates([p.relabel(perm) for p in quad], ctx):
            return False
    return True


# ---------------------------------------------------------------------------
# the (1+1+2) fixture on six points


def one_one_two_fixture() -> dict[str, Partition]:
    n = 6
    u = {i: i - 1 for i in range(1, 7)}  # u1..u6 -> 0..5
    alpha = kequ(n, [u[4], u[5], u[6]])
    eps = kequ(n, [u[1], u[2], u[3]])
    gamma = kequ(n, [u[1], u[2], u[4]]) | atom(n, u[3], u[5])
    delta = kequ(n, [u[1], u[3], u[6]]) | atom(n, u[2], u[5])
    return {"alpha": alpha, "beta": alpha | eps, "gamma": gamma, "delta": delta, "epsilon": eps}


def one_one_two_identities() -> list[tuple[str, Partition, Partition]]:
    """(name, expected atom, value of the expression) for the six displayed steps."""
    f = one_one_two_fixture()
    al, be, ga, de = f["alpha"], f["beta"], f["gamma"], f["delta"]

    def eq(i, j):
        return atom(6, i - 1, j - 1)

    e21 = be & ga
    e13 = be & de
    e54 = al & (ga | e13)
    e65 = al & (de | e21)
    e42 = ga & (de | e54)
    e36 = de & (ga | e65)
    return [
        ("u2u1", eq(2, 1), e21),
        ("u1u3", eq(1, 3), e13),
        ("u5u4", eq(5, 4), e54),
        ("u6u5", eq(6, 5), e65),
        ("u4u2", eq(4, 2), e42),
        ("u3u6", eq(3, 6), e36),
    ]


def verify_one_one_two_generates() -> bool:
    f = one_one_two_fixture()
    quad = [f["alpha"], f["beta"], f["gamma"], f["delta"]]
    ctx = FullEquivalence(6)
    full = len(close(quad, ctx)) == bell(6)
    return full and all(want == got for _, want, got in one_one_two_identities())


def verify_one_one_two_order() -> bool:
    f = one_one_two_fixture()
    quad = [f["alpha"], f["beta"], f["gamma"], f["delta"]]
    return order_type(quad, FullEquivalence(6)) is OrderType.ONE_ONE_TWO


def report_json(phi: IdQuadruple) -> str:
    rep = verify_generation_via_terms(phi, report=True)
    rep["closure_generates"] = closure_generates(phi) if phi.n <= FullEquivalence.TABLE_MAX_N + 1 else None
    return json.dumps(rep)
