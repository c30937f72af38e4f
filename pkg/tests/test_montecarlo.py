import math

import numpy as np
import pytest

from partlat import FullEquivalence, StamSampler, confidence_interval, estimate_rho
from partlat.montecarlo import (CSV_HEADER, _chunk_rng, draw_quadruples, SampleReport, Z_TABLE, csv_table, exact_rho,
                                gamma_bounds_from_sample, urn_distribution, z_for_level)


def test_z_values_by_inversion():
    for level, z in Z_TABLE.items():
        assert round(z_for_level(level), 5) == z


def test_interval_endpoints():
    lo, hi = confidence_interval(238223, 15_000_000, 0.999)
    assert (round(100 * lo, 5), round(100 * hi, 5)) == (1.57753, 1.59877)


def test_interval_rejects_bad_input():
    with pytest.raises(ValueError):
        confidence_interval(1, 10, 1.0)
    with pytest.raises(ValueError):
        confidence_interval(11, 10, 0.9)
    with pytest.raises(ValueError):
        confidence_interval(0, 1, 0.9)


def test_urn_distribution_mass():
    for n in (1, 4, 8, 12):
        probs = urn_distribution(n)
        assert math.fsum(probs) >= 1 - 1e-12
        assert probs[0] == 0


def test_sampler_is_uniform_on_small_n():
    sampler = StamSampler(4, seed=7)
    ranks = sampler.sample_ranks(150_000)
    freq = np.bincount(ranks, minlength=15) / len(ranks)
    se = math.sqrt((1 / 15) * (14 / 15) / len(ranks))
    assert np.all(np.abs(freq - 1 / 15) < 4 * se)


def test_sampler_outputs_partitions():
    sampler = StamSampler(6, seed=1)
    p = sampler.sample()
    assert p in FullEquivalence(6)


def test_estimate_is_deterministic_and_chunk_independent():
    a = estimate_rho(4, 20_000, seed=3, chunk=20_000)
    b = estimate_rho(4, 20_000, seed=3, chunk=20_000)
    assert a.s == b.s
    sampler = StamSampler(4, seed=None)
    first = draw_quadruples(sampler, 1000, _chunk_rng(3, 0))
    assert np.array_equal(first, draw_quadruples(sampler, 1000, _chunk_rng(3, 0)))
    assert not np.array_equal(first, draw_quadruples(sampler, 1000, _chunk_rng(4, 0)))
    assert not np.array_equal(first, draw_quadruples(sampler, 1000, _chunk_rng(3, 1)))


def test_parallel_matches_serial(monkeypatch):
    serial = estimate_rho(4, 30_000, seed=11, chunk=8192, parallelism=1)
    monkeypatch.setenv("PARTLAT_THREADS", "2")
    parallel = estimate_rho(4, 30_000, seed=11, chunk=8192)
    assert parallel.parallelism == 2 and parallel.s == serial.s


def test_estimate_close_to_exact_value():
    rep = estimate_rho(4, 200_000, seed=5)
    lo, hi = confidence_interval(rep.s, rep.k, 0.999)
    assert lo <= exact_rho(4, 50) <= hi


def test_report_formats():
    rep = SampleReport(7, 15_000_000, 238223, seed=1)
    assert rep.csv_row().startswith("7,15000000,238223,1.58815")
    assert csv_table([rep]).splitlines()[0] == CSV_HEADER
    d = rep.to_dict()
    assert d["version"] and "0.999" in d["intervals"]
    lo, hi = gamma_bounds_from_sample(rep)
    assert lo < hi


def test_estimate_rejects_tiny_inputs():
    with pytest.raises(ValueError):
        estimate_rho(2, 100)
    with pytest.raises(ValueError):
        estimate_rho(4, 1)
