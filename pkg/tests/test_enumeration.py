import io
import itertools
from math import comb

import pytest

from conftest import long_only
from partlat import FullEquivalence, bell, generates, count_generating_quadruples
from partlat.enumeration import (EnumJob, classify_quadruples, list_generating_quadruples,
                                 quadruple_from_rank, quadruple_rank, read_checkpoint,
                                 verify_all_antichain, write_checkpoint)
from partlat.errors import CapacityError, IntegrityError


def brute_count(n):
    ctx = FullEquivalence(n)
    return sum(generates(q, ctx) for q in itertools.combinations(list(ctx.elements()), 4))


def test_small_counts_match_brute_force():
    for n in (3, 4):
        assert count_generating_quadruples(n).count == brute_count(n)
    assert count_generating_quadruples(4).count == 50


def test_pruning_and_orbits_do_not_change_counts():
    for n in (4, 5):
        base = count_generating_quadruples(n).count
        assert count_generating_quadruples(n, prune=False).count == base
        assert count_generating_quadruples(n, orbit_mode=True, chunk_size=997).count == base
    assert count_generating_quadruples(5).count == 5305


def test_ranges_add_up():
    total = comb(bell(5), 4)
    cuts = [0, 1000, 77777, 200000, total]
    parts = [count_generating_quadruples(5, lo=a, hi=b, chunk_size=50000).count
             for a, b in zip(cuts, cuts[1:])]
    assert sum(parts) == 5305


def test_colex_rank_round_trip():
    for r in (0, 1, 5, 12345, comb(52, 4) - 1):
        assert quadruple_rank(quadruple_from_rank(5, r)) == r


def test_enumeration_refuses_large_n():
    with pytest.raises(CapacityError):
        EnumJob(9)


class Interrupt(Exception):
    pass


def test_checkpoint_resume(tmp_path):
    ck = tmp_path / "run.ck"
    calls = []

    def stop_after_two(pos, count):
        calls.append((pos, count))
        if len(calls) == 2:
            raise Interrupt

    with pytest.raises(Interrupt):
        count_generating_quadruples(5, checkpoint=ck, chunk_size=30000, progress=stop_after_two)
    saved = read_checkpoint(ck, EnumJob(5, checkpoint=ck, chunk_size=30000))
    assert saved == calls[-1] and 0 < saved[0] < comb(52, 4)
    resumed = []
    res = count_generating_quadruples(5, checkpoint=ck, chunk_size=30000,
                                      progress=lambda p, c: resumed.append(p))
    assert res.count == 5305
    assert resumed[0] > saved[0]


def test_checkpoint_integrity(tmp_path):
    ck = tmp_path / "run.ck"
    job = EnumJob(4, checkpoint=ck)
    assert read_checkpoint(ck, job) is None
    write_checkpoint(ck, job, 100, 3)
    assert read_checkpoint(ck, job) == (100, 3)
    with pytest.raises(IntegrityError):
        read_checkpoint(ck, EnumJob(5, checkpoint=ck))
    ck.write_text(ck.read_text().replace("next=100", "next=99999"))
    with pytest.raises(IntegrityError):
        read_checkpoint(ck, job)
    ck.write_text("garbage\n")
    with pytest.raises(IntegrityError):
        read_checkpoint(ck, job)


def test_listing_format():
    buf = io.StringIO()
    assert list_generating_quadruples(4, buf) == 50
    lines = buf.getvalue().splitlines()
    assert len(lines) == 50
    assert all(line.count("|") == 3 and line.count("(") == 4 for line in lines)


def test_generating_sets_of_equ4_and_equ5_are_antichains():
    for n in (4, 5):
        ok, bad = verify_all_antichain(n)
        assert ok and bad == []


def test_classification_matches_order_type():
    from partlat import order_type

    ctx = FullEquivalence(4)
    quads = list(itertools.islice(itertools.combinations(range(15), 4), 0, 1365, 11))
    kinds = classify_quadruples(4, quads)
    for q, kind in zip(quads, kinds):
        assert kind is order_type([ctx.element(r) for r in q], ctx)


@long_only
def test_gamma6():
    assert count_generating_quadruples(6, parallelism=None).count == 1107900
