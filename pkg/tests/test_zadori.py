import itertools

import pytest

from partlat import FullEquivalence, Partition, atom, generates
from partlat.zadori import (IdQuadruple, all_id_quadruples, build_configuration, closure_generates,
                            effectiveness, enumerate_family, evaluate, family_sample_generates,
                            gets_through, length, lower_bound, make_e_term, make_f_term,
                            make_g_term, make_h_term, neckties, orbit_count, one_one_two_identities,
                            verify_generation_via_terms, verify_one_one_two_generates, verify_one_one_two_order,
                            width)


def bits(m):
    return list(itertools.product((0, 1), repeat=m))


def test_id_quadruple_validation_and_text():
    phi = IdQuadruple.parse("3:0:2:101")
    assert (phi.m, phi.s, phi.t, phi.z) == (3, 0, 2, (1, 0, 1))
    assert str(phi) == "3:0:2:101" and phi.n == 8 and phi.k == 3
    assert IdQuadruple(3, 1, 1, (0, 0, 0)).n == 7
    for bad in [(2, 1, 1, (0, 0)), (3, 1, 1, (0, 0)), (3, 2, 1, (0, 0, 0)),
                (3, 0, 3, (0, 0, 0)), (1, 1, 1, (2,))]:
        with pytest.raises(ValueError):
            IdQuadruple(*bad)


def test_configuration_shape():
    for phi in (IdQuadruple(3, 1, 1, (1, 0, 1)), IdQuadruple(5, 0, 2, (0,) * 5)):
        cfg = build_configuration(phi)
        assert cfg.n == phi.n
        assert cfg.alpha.nblocks == (2 if phi.trivial_necktie else 3)
        assert len(cfg.edges) == phi.m + 2
        # delta collapses exactly the pinned zigzag edges plus the two ends
        pinned = sum(phi.z)
        assert cfg.n - cfg.delta.nblocks == 2 + pinned


def test_zigzag_terms():
    for m in (1, 3, 5):
        for phi in all_id_quadruples(m):
            cfg = build_configuration(phi)
            cache = {}
            for j in range(m + 2):
                f = evaluate(make_f_term(phi, j), cfg, cache)
                assert cfg.edge_atom(j) <= f <= cfg.edges_join(0, j)
                assert evaluate(make_g_term(phi, j), cfg, cache) == cfg.edge_atom(j)
                assert evaluate(make_h_term(j), cfg, cache) == cfg.edges_join(m + 1 - j, m + 1)


def test_atom_terms_for_every_configuration():
    for m in (1, 3, 5):
        for phi in all_id_quadruples(m):
            assert verify_generation_via_terms(phi), phi


def test_atom_terms_agree_with_closure():
    for m in (1, 3):
        for phi in all_id_quadruples(m):
            assert closure_generates(phi) == verify_generation_via_terms(phi) is True


def test_e_term_is_symmetric_and_diagonal_is_bottom():
    phi = IdQuadruple(3, 0, 2, (1, 1, 0))
    cfg = build_configuration(phi)
    for u in range(cfg.n):
        assert evaluate(make_e_term(phi, u, u), cfg) == cfg.ctx.bottom
    assert make_e_term(phi, 2, 5) is make_e_term(phi, 5, 2)
    with pytest.raises(ValueError):
        make_e_term(phi, 0, cfg.n)


def test_four_point_identity():
    n = 5
    for x, y, z, w in itertools.permutations(range(n), 4):
        val = atom(n, x, y) & (atom(n, x, z) | atom(n, w, y)) & (atom(n, x, w) | atom(n, z, y))
        assert val == Partition.bottom(n)


def test_key_gets_through_iff_pins_dominate():
    for m in (1, 3, 5):
        for tie in neckties(m):
            for z in bits(m):
                phi = IdQuadruple(m, *tie, z)
                for zk in bits(m):
                    key = IdQuadruple(m, 1, 1, zk)
                    assert gets_through(key, phi) == all(a <= b for a, b in zip(zk, z))


def test_zero_prefix_blocks_one_prefix():
    for m, mk in itertools.product((1, 3, 5), repeat=2):
        for z in bits(m):
            if z[0] != 0:
                continue
            phi = IdQuadruple(m, 1, 1, z)
            for zk in bits(mk):
                if zk[0] == 1:
                    assert not gets_through(IdQuadruple(mk, 1, 1, zk), phi)


def test_effectiveness_bounded():
    for m, mk in ((1, 3), (3, 5), (3, 1), (5, 3), (3, 3)):
        for z in bits(m):
            phi = IdQuadruple(m, 1, 1, z)
            for zk in bits(mk):
                key = IdQuadruple(mk, 1, 1, zk)
                for j in range(mk + 2):
                    e = effectiveness(key, phi, j)
                    assert e is not None and e <= min(j, m + 1)


def test_pinned_keys_reach_far_edges():
    # a key with pins inside the target's pins reaches every zigzag atom up to its length
    for m, mk in ((1, 3), (3, 5)):
        for z in bits(m):
            phi = IdQuadruple(m, 1, 1, z)
            cfg = build_configuration(phi)
            for zk in bits(mk):
                if not all(a <= b for a, b in zip(zk[:m], z)):
                    continue
                key = IdQuadruple(mk, 1, 1, zk)
                for i in range(m + 1):
                    assert cfg.edge_atom(i) <= evaluate(make_f_term(key, i), cfg)


def test_lower_bound_values():
    assert [lower_bound(n) for n in range(7, 11)] == [25200, 604800, 13608000, 816480000]
    assert f"{lower_bound(16):.3e}" == "3.911e+19"
    assert (width(7), length(7), width(8), length(8)) == (3, 3, 3, 3)
    with pytest.raises(ValueError):
        lower_bound(6)


def test_family_orbit_reaches_bound():
    fam = list(enumerate_family(7))
    assert len(fam) == 10
    assert orbit_count(7, fam) == lower_bound(7)
    assert family_sample_generates(7, 100, seed=1)


def test_family_members_generate_on_even_n():
    ctx = FullEquivalence(8)
    fam = list(enumerate_family(8))
    assert len(fam) == 30
    assert all(generates(q, ctx) for q in fam[::3])


def test_one_one_two_fixture():
    assert verify_one_one_two_generates() and verify_one_one_two_order()
    for name, want, got in one_one_two_identities():
        assert want == got, name
