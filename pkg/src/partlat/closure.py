"""Sublattice generated by a set of elements, generation tests, order types."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Sequence

import numpy as np

from .core import FullEquivalence, LatticeContext, Partition, ProductLattice
from .errors import CapacityError
from .terms import Term, var


@dataclass(frozen=True)
class ClosureOptions:
    early_exit_on_atoms: bool = False
    max_elements: int | None = None
    record_witness_terms: bool = False
    use_tables: bool = True


class ClosureSet(frozenset):
    """The generated sublattice.

    ``terms`` maps each element to a term over the generators that produces
    it (only when witness terms were requested).
    """

    terms: dict | None = None


class OrderType(str, Enum):
    ANTICHAIN = "antichain"
    ONE_ONE_TWO = "one_one_two"
    OTHER = "other"


def _check_cap(opts: ClosureOptions, gens):
    if opts.max_elements is not None and opts.max_elements < len(set(gens)):
        raise ValueError("max_elements is smaller than the generating set")


# ---------------------------------------------------------------------------
# table-backed fast paths


def _tabled_factors(ctx) -> list[FullEquivalence] | None:
    if isinstance(ctx, FullEquivalence):
        return [ctx] if ctx.has_table else None
    if isinstance(ctx, ProductLattice):
        if all(isinstance(f, FullEquivalence) and f.has_table for f in ctx.factors):
            return list(ctx.factors)
    return None


@lru_cache(maxsize=4)
def _product_arrays(ns: tuple[int, ...]):
    from .tables import PartitionTable

    tabs = [PartitionTable.get(n) for n in ns]
    sizes = np.array([t.size for t in tabs], np.int64)
    offs = np.zeros(len(tabs), np.int64)
    aoffs = np.zeros(len(tabs), np.int64)
    for i in range(1, len(tabs)):
        offs[i] = offs[i - 1] + sizes[i - 1] ** 2
        aoffs[i] = aoffs[i - 1] + sizes[i - 1]
    meet = np.concatenate([t.meet.ravel().astype(np.int32) for t in tabs])
    join = np.concatenate([t.join.ravel().astype(np.int32) for t in tabs])
    atoms = np.concatenate([t.is_atom for t in tabs])
    natoms = sum(t.natoms for t in tabs)
    return tabs, sizes, offs, meet, join, atoms, aoffs, natoms


def _encode(x, factors) -> int:
    if len(factors) == 1 and isinstance(x, Partition):
        return x.rank()
    code = 0
    mul = 1
    for f, p in zip(factors, x):
        code += p.rank() * mul
        mul *= f.size
    return code


def _tabled_closure(gens, ctx, factors, early_exit: bool, cap: int | None):
    """Run the compiled closure; returns (codes, status)."""
    from .tables import STATUS_CAP, closure_kernel, product_closure_kernel

    codes = np.array([_encode(g, factors) for g in gens], np.int64)
    total = ctx.size
    limit = total if cap is None else min(cap, total)
    elems = np.empty(total, np.int64)
    if len(factors) == 1:
        t = factors[0].table()
        in_set = np.zeros(total, np.uint8)
        size, status = closure_kernel(codes, t.meet, t.join, t.is_atom, t.natoms,
                                      early_exit, limit, in_set, elems)
    else:
        tabs, sizes, offs, meet, join, atoms, aoffs, natoms = _product_arrays(
            tuple(f.n for f in factors))
        in_set = np.zeros(total, np.uint8)
        size, status = product_closure_kernel(codes, sizes, offs, meet, join, atoms, aoffs,
                                              natoms, early_exit, limit, in_set, elems)
    if status == STATUS_CAP:
        raise CapacityError(f"closure exceeded {limit} elements", partial=int(size))
    return elems[:size], status


def _decode(code: int, factors, single: bool):
    parts = []
    for f in factors:
        t = f.table()
        r = code % t.size
        code //= t.size
        parts.append(Partition(t.rgs[r].tolist(), canonical=True))
    return parts[0] if single else tuple(parts)


# ---------------------------------------------------------------------------
# generic worklist


def _close_generic(gens, ctx, opts: ClosureOptions):
    elems = list(dict.fromkeys(gens))
    seen = set(elems)
    terms = None
    if opts.record_witness_terms:
        terms = {}
        for i, g in enumerate(gens):
            terms.setdefault(g, var(i))
    atoms_left = None
    if opts.early_exit_on_atoms and ctx.atomistic:
        atoms_left = set(ctx.atoms()) - seen
        if not atoms_left:
            return elems, terms, True
    cap = opts.max_elements
    i = 0
    while i < len(elems):
        x = elems[i]
        for j in range(i):
            y = elems[j]
            for opname in ("meet", "join"):
                z = ctx.meet(x, y) if opname == "meet" else ctx.join(x, y)
                if z in seen:
                    continue
                if cap is not None and len(elems) >= cap:
                    raise CapacityError(f"closure exceeded {cap} elements", partial=len(elems))
                seen.add(z)
                elems.append(z)
                if terms is not None:
                    terms[z] = Term(opname, terms[x], terms[y])
                if atoms_left is not None:
                    atoms_left.discard(z)
                    if not atoms_left:
                        return elems, terms, True
        i += 1
    return elems, terms, False


# ---------------------------------------------------------------------------
# public API


def close(generators: Sequence, ctx: LatticeContext, opts: ClosureOptions | None = None) -> ClosureSet:
    """Least subset of ``ctx`` containing ``generators`` and closed under meet and join.

    With ``early_exit_on_atoms`` on an atomistic context the search stops once
    every atom has been produced; the answer is then all of ``ctx``.
    """
    opts = opts or ClosureOptions()
    gens = list(generators)
    if not gens:
        return ClosureSet()
    for g in gens:
        if g not in ctx:
            raise ValueError(f"{g!r} is not an element of {ctx!r}")
    _check_cap(opts, gens)

    factors = _tabled_factors(ctx) if opts.use_tables else None
    if factors is not None and not opts.record_witness_terms:
        from .tables import STATUS_ATOMS

        codes, status = _tabled_closure(gens, ctx, factors, opts.early_exit_on_atoms,
                                        opts.max_elements)
        if status == STATUS_ATOMS:
            return ClosureSet(ctx.elements())
        single = isinstance(ctx, FullEquivalence)
        return ClosureSet(_decode(c, factors, single) for c in codes.tolist())

    elems, terms, all_atoms = _close_generic(gens, ctx, opts)
    res = ClosureSet(ctx.elements()) if all_atoms else ClosureSet(elems)
    res.terms = terms
    return res


def closure_size(generators: Sequence, ctx: LatticeContext, opts: ClosureOptions | None = None) -> int:
    """Size of the generated sublattice without materializing its elements."""
    opts = opts or ClosureOptions()
    gens = list(generators)
    _check_cap(opts, gens)
    factors = _tabled_factors(ctx) if opts.use_tables else None
    if factors is None:
        return len(close(gens, ctx, opts))
    from .tables import STATUS_ATOMS

    codes, status = _tabled_closure(gens, ctx, factors, opts.early_exit_on_atoms, opts.max_elements)
    return ctx.size if status == STATUS_ATOMS else len(codes)


def generates(generators: Sequence, ctx: LatticeContext, opts: ClosureOptions | None = None) -> bool:
    """True iff the generators generate all of ``ctx``."""
    if opts is None:
        opts = ClosureOptions(early_exit_on_atoms=True)
    gens = list(generators)
    if not gens:
        return False
    factors = _tabled_factors(ctx) if opts.use_tables else None
    if factors is not None:
        from .tables import STATUS_ATOMS

        codes, status = _tabled_closure(gens, ctx, factors,
                                        opts.early_exit_on_atoms and ctx.atomistic,
                                        opts.max_elements)
        return status == STATUS_ATOMS or len(codes) == ctx.size
    return len(close(gens, ctx, opts)) == ctx.size


def order_type(quad: Sequence, ctx: LatticeContext) -> OrderType:
    """antichain, one_one_two (exactly one comparable pair) or other."""
    if len(quad) != 4 or len(set(quad)) != 4:
        raise ValueError("order_type needs four distinct elements")
    comparable = sum(
        1 for x, y in itertools.combinations(quad, 2) if ctx.leq(x, y) or ctx.leq(y, x)
    )
    if comparable == 0:
        return OrderType.ANTICHAIN
    if comparable == 1:
        return OrderType.ONE_ONE_TWO
    return OrderType.OTHER
