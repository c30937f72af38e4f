"""Quaternary lattice terms.

Terms are hash-consed: structurally equal terms are the same object, so a
term DAG with heavy sharing (the circle constructions reuse the same
subterms many times) stays small and evaluation can cache by identity.
"""
from __future__ import annotations

from typing import Sequence

VAR_NAMES = ("A", "B", "C", "D")


class Term:
    __slots__ = ("op", "left", "right", "index", "__weakref__")
    _interned: dict = {}

    def __new__(cls, op: str, left=None, right=None, index: int = -1):
        if op in ("meet", "join") and id(left) > id(right):
            # both operations are commutative
            left, right = right, left
        key = (op, id(left), id(right), index)
        t = cls._interned.get(key)
        if t is None:
            t = object.__new__(cls)
            t.op = op
            t.left = left
            t.right = right
            t.index = index
            cls._interned[key] = t
        return t

    def __mul__(self, other: "Term") -> "Term":
        if self is other:
            return self
        return Term("meet", self, other)

    def __add__(self, other: "Term") -> "Term":
        if self is other:
            return self
        return Term("join", self, other)

    def __repr__(self):
        if self.op == "var":
            return VAR_NAMES[self.index]
        sym = "*" if self.op == "meet" else " + "
        return f"({self.left!r}{sym}{self.right!r})"

    def dag_size(self) -> int:
        seen = set()
        stack = [self]
        while stack:
            t = stack.pop()
            if id(t) in seen:
                continue
            seen.add(id(t))
            if t.op != "var":
                stack.append(t.left)
                stack.append(t.right)
        return len(seen)


def var(i: int) -> Term:
    return Term("var", index=i)


A, B, C, D = (var(i) for i in range(4))


def meet_all(terms: Sequence[Term]) -> Term:
    it = iter(terms)
    out = next(it)
    for t in it:
        out = out * t
    return out


def join_all_terms(terms: Sequence[Term]) -> Term:
    it = iter(terms)
    out = next(it)
    for t in it:
        out = out + t
    return out


def eval_term(term: Term, quad: Sequence, ctx, cache: dict | None = None):
    """Evaluate ``term`` with A, B, C, D bound to ``quad`` in ``ctx``.

    ``cache`` maps id(subterm) to its value and may be shared between calls
    that use the same quadruple.
    """
    if cache is None:
        cache = {}
    stack = [term]
    while stack:
        t = stack[-1]
        if id(t) in cache:
            stack.pop()
            continue
        if t.op == "var":
            cache[id(t)] = quad[t.index]
            stack.pop()
            continue
        lv = cache.get(id(t.left), _MISSING)
        rv = cache.get(id(t.right), _MISSING)
        if lv is _MISSING or rv is _MISSING:
            if lv is _MISSING:
                stack.append(t.left)
            if rv is _MISSING:
                stack.append(t.right)
            continue
        cache[id(t)] = ctx.meet(lv, rv) if t.op == "meet" else ctx.join(lv, rv)
        stack.pop()
    return cache[id(term)]


_MISSING = object()
