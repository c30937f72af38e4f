import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partlat import (FullEquivalence, Partition, ProductLattice, atom, bell, decode_canonical,
                     encode_canonical, enumerate_partitions, format_vector, kequ, parse_vector)
from partlat.core import graph_equivalence, rgs_rank, rgs_unrank
from partlat.errors import CapacityError, DimensionError


def partitions(max_n=7):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.integers(0, n - 1), min_size=n, max_size=n).map(Partition))


def same_size_pair(max_n=7):
    return st.integers(1, max_n).flatmap(lambda n: st.tuples(
        *[st.lists(st.integers(0, n - 1), min_size=n, max_size=n).map(Partition)] * 3))


def test_bell_numbers():
    assert [bell(n) for n in range(10)] == [1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147]
    assert bell(16) == 10480142147


def test_enumeration_is_complete_and_ranked():
    for n in range(1, 7):
        parts = list(enumerate_partitions(n))
        assert len(parts) == len(set(parts)) == bell(n)
        assert [p.rank() for p in parts] == list(range(bell(n)))
    assert Partition.bottom(5).rank() == 0
    assert Partition.top(5).rank() == bell(5) - 1


def test_canonical_form():
    p = Partition([3, 3, 1, 0, 1])
    assert p.block_of == (0, 0, 1, 2, 1)
    assert p == Partition.from_blocks(5, [[0, 1], [2, 4], [3]])
    assert Partition.from_rgs(p.to_rgs()) == p


def test_encoding_matches_reference_vector():
    p = Partition.from_blocks(8, [[3, 5], [0, 4, 2, 6], [1, 7]])
    assert format_vector(encode_canonical(p)) == "(1,3,5,7,0,2,8,0,4,6,0,-1,-1,-1,-1,-1,-1)"


@given(partitions())
def test_encoding_round_trip(p):
    vec = encode_canonical(p)
    assert decode_canonical(vec) == p
    assert parse_vector(format_vector(vec)) == vec


@given(partitions())
def test_rank_round_trip(p):
    assert rgs_unrank(p.n, rgs_rank(p.block_of)) == p


def test_decode_rejects_bad_vectors():
    for bad in ([1, 0, 0, -1], [1, 2, -1], [1, 3, 0, -1]):
        with pytest.raises(ValueError):
            decode_canonical(bad)
    with pytest.raises(CapacityError):
        encode_canonical(Partition.bottom(4), pad_to=3)


@settings(max_examples=200)
@given(same_size_pair())
def test_lattice_laws(triple):
    x, y, z = triple
    assert x & (x | y) == x and x | (x & y) == x
    assert (x & y) & z == x & (y & z) and (x | y) | z == x | (y | z)
    assert x & y == y & x and x | y == y | x
    assert (x <= y) == (x & y == x) == (x | y == y)
    # meet is the intersection of the relations
    assert (x & y).pairs() == x.pairs() & y.pairs()
    assert x.pairs() | y.pairs() <= (x | y).pairs()


def test_join_is_transitive_closure():
    x = atom(5, 0, 1) | atom(5, 3, 4)
    y = atom(5, 1, 2) | atom(5, 2, 3)
    assert x | y == Partition.top(5)
    assert kequ(5, [0, 2, 4]) == graph_equivalence(5, [(0, 2), (2, 4)])


def test_mismatched_sizes():
    with pytest.raises(DimensionError):
        Partition.bottom(3) & Partition.bottom(4)


def test_tables_agree_with_direct_operations():
    ctx = FullEquivalence(5)
    t = ctx.table()
    parts = list(ctx.elements())
    for i, j in itertools.product(range(0, len(parts), 3), range(len(parts))):
        assert parts[t.meet[i, j]] == parts[i] & parts[j]
        assert parts[t.join[i, j]] == parts[i] | parts[j]
    assert t.natoms == 10


def test_product_context():
    ctx = ProductLattice([FullEquivalence(2), FullEquivalence(3)])
    assert ctx.size == 10
    assert len(ctx.atoms()) == 1 + 3
    assert (Partition.bottom(2), Partition.top(3)) in ctx
    assert len(list(ctx.elements())) == 10
