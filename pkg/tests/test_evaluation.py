import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate, stats

from capgen.capacity import Capacity
from capgen.evaluation import (
    EvaluationError,
    Histogram,
    bench,
    empirical_centroid,
    exact_centroid,
    exact_centroid_fractions,
    exact_histogram,
    exact_marginal_cdf,
    histogram,
    kl_divergence,
    order_stat_cdf,
    symmetry_report,
)
from capgen.exact import ResourceLimitError
from capgen.generators import generate_batch
from capgen.lattice import full_mask, parse_subset, popcount

ALPHAS = np.linspace(0.0, 1.0, 41)


def test_order_stat_examples():
    assert order_stat_cdf(1, 2, 0.5) == pytest.approx(0.75, abs=1e-15)
    for m in (1, 3, 14):
        assert np.allclose(order_stat_cdf(m, m, ALPHAS), ALPHAS**m, atol=1e-14)
    assert np.allclose(order_stat_cdf(1, 1, ALPHAS), ALPHAS, atol=1e-15)


@pytest.mark.parametrize("m", [2, 6, 14, 30])
def test_order_stat_reflection_and_monotonicity(m):
    for k in range(1, m + 1):
        f = order_stat_cdf(k, m, ALPHAS)
        g = order_stat_cdf(m + 1 - k, m, 1.0 - ALPHAS)
        assert np.max(np.abs(f - (1.0 - g))) < 1e-12
        assert np.all(np.diff(f) >= 0)


def test_order_stat_domain():
    with pytest.raises(ValueError):
        order_stat_cdf(0, 3, 0.5)
    with pytest.raises(ValueError):
        order_stat_cdf(4, 3, 0.5)
    with pytest.raises(ValueError):
        order_stat_cdf(1, 3, 1.5)


def test_exact_marginal_n2_is_uniform():
    assert np.allclose(exact_marginal_cdf(2, 1, ALPHAS), ALPHAS, atol=1e-14)


def test_exact_marginal_median_of_pairs_n4():
    for s in range(1, 15):
        if popcount(s) == 2:
            assert exact_marginal_cdf(4, s, 0.5) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("n", [3, 4])
def test_exact_marginal_symmetries(n):
    full = full_mask(n)
    by_card = {}
    for s in range(1, full):
        f = exact_marginal_cdf(n, s, ALPHAS)
        by_card.setdefault(popcount(s), []).append(f)
        g = exact_marginal_cdf(n, full ^ s, 1.0 - ALPHAS)
        assert np.max(np.abs(f - (1.0 - g))) < 1e-12
    for fs in by_card.values():
        for f in fs[1:]:
            assert np.max(np.abs(f - fs[0])) < 1e-12


@pytest.mark.parametrize("n", [3, 4, 5])
def test_marginal_mean_equals_centroid(n):
    c = exact_centroid(n)
    for s in (1, 3, (1 << (n - 1)) - 1):
        mean, _ = integrate.quad(lambda a: 1.0 - exact_marginal_cdf(n, s, a), 0.0, 1.0, epsabs=1e-13)
        assert abs(mean - c.coordinates[s]) < 1e-9


def test_exact_marginal_limits():
    with pytest.raises(ResourceLimitError):
        exact_marginal_cdf(6, 1, 0.5)


def test_exact_centroid_values():
    assert exact_centroid(2).coordinates == {1: 0.5, 2: 0.5}
    c3 = exact_centroid(3)
    assert c3.exact[1] == Fraction(100, 336)
    assert np.allclose(c3.vector(), [0.298, 0.298, 0.702, 0.298, 0.702, 0.702], atol=5e-4)
    c4 = exact_centroid(4).by_cardinality()
    assert np.allclose(c4[1], 0.1810, atol=5e-5)
    assert np.allclose(c4[2], 0.5, atol=5e-5)
    assert np.allclose(c4[3], 0.8190, atol=5e-5)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_exact_centroid_rational_symmetry(n):
    fr = exact_centroid_fractions(n)
    full = full_mask(n)
    for s, v in fr.items():
        assert fr[full ^ s] == 1 - v
        assert all(fr[t] == v for t in fr if popcount(t) == popcount(s))
        assert 0 < v < 1


def test_empirical_centroid_of_reference_is_exact():
    ref = exact_centroid(3)
    v = np.zeros(8)
    v[-1] = 1.0
    for s, x in ref.coordinates.items():
        v[s] = x
    emp = empirical_centroid([Capacity(3, v)], ref)
    assert emp.squared_error == 0.0


def test_empirical_centroid_errors():
    with pytest.raises(EvaluationError):
        empirical_centroid([])
    with pytest.raises(EvaluationError):
        empirical_centroid([Capacity.minimal(2), Capacity.minimal(3)])
    with pytest.raises(EvaluationError):
        empirical_centroid([Capacity.minimal(2)], exact_centroid(3))


def test_histogram_right_closed():
    v = np.tile(Capacity.additive_uniform(2).values, (10, 1))
    h = histogram(v, 1, bins=2)
    assert list(h.mass) == [0.0, 1.0] and h.sample_count == 10
    top = histogram(np.tile(Capacity.maximal(2).values, (3, 1)), 1, bins=4)
    assert list(top.mass) == [0.0, 0.0, 0.0, 1.0]


def test_histogram_errors():
    with pytest.raises(EvaluationError):
        histogram(np.empty((0, 4)), 1)
    with pytest.raises(ValueError):
        histogram(np.tile(Capacity.minimal(2).values, (3, 1)), 1, bins=1)
    with pytest.raises(ValueError):
        Histogram(2, np.array([0, 0.5, 1]), np.array([0.5, 0.4]), 1)


def test_histogram_flat_for_n2_exact():
    v = generate_batch("exact", 2, 20000, seed=2)
    h = histogram(v, 1, bins=10)
    assert stats.chisquare(h.mass * 20000).pvalue > 0.001


def test_histogram_matches_exact_bins_n4():
    v = generate_batch("exact", 4, 10000, seed=3)
    h = histogram(v, 1, bins=20)
    e = exact_histogram(4, 1, bins=20)
    obs = h.mass * 10000
    exp = e.mass * 10000
    keep = exp >= 5
    # merge sparse tail bins into one
    obs = np.append(obs[keep], obs[~keep].sum())
    exp = np.append(exp[keep], exp[~keep].sum())
    assert stats.chisquare(obs, exp * obs.sum() / exp.sum()).pvalue > 0.001


def _hist(mass):
    mass = np.asarray(mass, dtype=float)
    return Histogram(len(mass), np.linspace(0, 1, len(mass) + 1), mass, None)


def test_kl_values():
    p = _hist([0.2, 0.3, 0.5])
    assert kl_divergence(p, p) == 0.0
    assert abs(kl_divergence(_hist([1, 0]), _hist([0.5, 0.5])) - math.log(2)) < 1e-6
    assert kl_divergence(_hist([0.5, 0.5]), _hist([0.9, 0.1])) > 0


def test_kl_layout_mismatch():
    with pytest.raises(ValueError):
        kl_divergence(_hist([0.5, 0.5]), _hist([0.2, 0.3, 0.5]))


def test_symmetry_report_degenerate():
    # quarters are exact in binary, so 1 - mu(N minus S) == mu(S) holds bitwise
    v = np.tile(Capacity.additive_uniform(4).values, (1000, 1))
    r = symmetry_report(v)
    assert r.max_distance == 0.0 and r.passed


def test_symmetry_report_needs_samples():
    with pytest.raises(EvaluationError):
        symmetry_report(np.tile(Capacity.additive_uniform(3).values, (999, 1)))


def test_symmetry_report_random_node():
    r = symmetry_report(generate_batch("randomnode", 4, 2000))
    assert set(r.cardinality) == {1, 2, 3} and len(r.complement) == 14
    assert all(0 <= m.value <= 1 for m in r.metrics())


def test_symmetry_exact_pipeline_n3():
    r = symmetry_report(generate_batch("exact", 3, 100_000, seed=17), threshold=0.01)
    assert r.passed, r


def test_bench_guards_and_rows():
    with pytest.raises(EvaluationError):
        bench(["twolayer"], 3, 0)
    with pytest.raises(EvaluationError):
        bench(["nope"], 3, 10)
    rows = bench(["twolayer", "exact"], 3, 1)
    assert [r.method for r in rows] == ["twolayer", "exact"]
    assert all(r.count == 1 and r.wall_seconds >= 0 for r in rows)


def test_bench_small_run_order():
    rows = {r.method: r for r in bench(["exact", "twolayer"], 3, 2000)}
    assert rows["exact"].wall_seconds < 60 and rows["twolayer"].wall_seconds < 60


def test_centroid_report_serialises():
    d = exact_centroid(2).to_dict()
    assert d["coordinates"] == {"1": 0.5, "2": 0.5}
    assert parse_subset("12") not in exact_centroid(2).coordinates
