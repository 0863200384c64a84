import numpy as np
import pytest
from scipy import stats as sps

from kummer_forge.errors import BinningError, MomentDomainError, SampleSizeError, ShapeError
from kummer_forge.rng import generator
from kummer_forge.stats import (distance_correlation, hill_tail_index, independence_test,
                                kolmogorov_sf, ks_test, regression_constancy_test)


def test_ks_statistic_matches_scipy(rng):
    x = rng.gamma(2.0, size=5000)
    ours = ks_test(x, sps.gamma(2.0).cdf)
    ref = sps.kstest(x, sps.gamma(2.0).cdf, method="asymp")
    assert ours.statistic == pytest.approx(ref.statistic, rel=1e-12)
    assert ours.p_value == pytest.approx(ref.pvalue, abs=1e-6)
    assert ours.passed


def test_ks_rejects_wrong_law(rng):
    x = rng.gamma(2.2, size=20000)
    assert not ks_test(x, sps.gamma(2.0).cdf).passed


def test_kolmogorov_tail_limits():
    assert kolmogorov_sf(0.0) == 1.0
    assert kolmogorov_sf(1.3580986393225507) == pytest.approx(0.05, abs=1e-9)
    assert kolmogorov_sf(10.0) == pytest.approx(2 * np.exp(-200.0), rel=1e-12)


def test_ks_needs_enough_values():
    with pytest.raises(SampleSizeError):
        ks_test(np.ones(10), lambda t: t)


def test_distance_correlation_extremes(rng):
    x = rng.normal(size=300)
    assert distance_correlation(x, 3 * x + 1) == pytest.approx(1.0, abs=1e-12)
    assert distance_correlation(x, x ** 2) > 0.3
    assert distance_correlation(x, np.zeros(300)) == 0.0


def test_independence_detects_nonmonotone_dependence(rng):
    x = rng.normal(size=3000)
    y = x ** 2 + 0.3 * rng.normal(size=3000)
    res = independence_test(x, y, seed=1)
    assert not res.passed
    assert res.extra["p_dcor"] == pytest.approx(1 / 200)


def test_independence_null_rejection_rate():
    # At level 0.05 the combined test is conservative (Bonferroni over two parts).
    rejections = 0
    for rep in range(200):
        g = generator(777, rep)
        u, v = g.random(400), g.gamma(2.0, size=400)
        res = independence_test(u, v, n_perm=99, seed=rep, significance=0.05)
        rejections += not res.passed
    assert 0.02 * 200 <= rejections <= 0.09 * 200


def test_independence_workers_do_not_change_result(rng):
    u, v = rng.random(1500), rng.random(1500)
    a = independence_test(u, v, seed=3, workers=1)
    b = independence_test(u, v, seed=3, workers=4)
    assert a == b and a.extra == b.extra


def test_independence_validation():
    with pytest.raises(ShapeError):
        independence_test(np.ones(200), np.ones(201))
    with pytest.raises(SampleSizeError):
        independence_test(np.ones(50), np.ones(50))
    with pytest.raises(SampleSizeError):
        independence_test(np.ones(200), np.ones(200), n_perm=10)


def test_hill_index_recovers_pareto_tail(rng):
    assert hill_tail_index(rng.pareto(1.5, 200_000) + 1) == pytest.approx(1.5, rel=0.1)
    assert hill_tail_index(rng.gamma(2.0, size=200_000)) > 4


def test_regression_constant_and_shifted(rng):
    n = 50_000
    u = rng.random(n)
    assert regression_constancy_test(u, rng.gamma(3.0, size=n)).passed
    v = rng.gamma(3.0, size=n) * (1 + 0.1 * u)
    res = regression_constancy_test(u, v)
    assert not res.passed and res.extra["calibration"] == "normal"
    assert len(res.extra["bin_statistics"]) == 10


def test_regression_ratio_form(rng):
    n = 50_000
    u = rng.random(n)
    v = rng.gamma(3.0, size=n) * (1 + u)
    # E(v^2|u)/E(v|u) scales with (1 + u): not constant.
    assert not regression_constancy_test(u, v, 2.0, denominator_exponent=1.0).passed
    w = rng.gamma(2.0 + u, size=n)
    # E(v|u)/E(1|u) is the mean, again not constant.
    assert not regression_constancy_test(u, w, 1.0, denominator_exponent=0.0).passed


def test_heavy_tail_normal_calibration_refuses(rng):
    n = 100_000
    u = rng.random(n)
    v = rng.gamma(2.0, size=n)
    with pytest.raises(MomentDomainError):
        regression_constancy_test(u, v, -1.0, calibration="normal")
    res = regression_constancy_test(u, v, -1.0, calibration="auto", seed=4)
    assert res.extra["calibration"] == "permutation"
    assert res.method.endswith("[permutation]")
    assert res.passed


def test_permutation_count_resolves_the_level(rng):
    n = 20_000
    u = rng.random(n)
    v = rng.gamma(2.0, size=n) * (1 + u)
    res = regression_constancy_test(u, v, -1.0, calibration="permutation", n_perm=99,
                                    significance=1e-3)
    assert res.extra["n_perm"] == 1999
    assert res.p_value == pytest.approx(1 / 2000)
    assert not res.passed


def test_permutation_is_seeded(rng):
    u, v = rng.random(3000), rng.gamma(2.0, size=3000)
    a = regression_constancy_test(u, v, calibration="permutation", seed=5, significance=0.05)
    b = regression_constancy_test(u, v, calibration="permutation", seed=5, significance=0.05)
    assert a == b


def test_regression_validation(rng):
    u, v = rng.random(1000), rng.random(1000)
    with pytest.raises(BinningError):
        regression_constancy_test(u, v, bins=3)
    with pytest.raises(BinningError):
        regression_constancy_test(u[:200], v[:200])
    with pytest.raises(ShapeError):
        regression_constancy_test(u, v[:-1])
    with pytest.raises(ValueError):
        regression_constancy_test(u, v, calibration="bootstrap")


def test_ks_perfectly_calibrated_sample():
    n = 1000
    q = (np.arange(n) + 0.5) / n
    assert ks_test(q, lambda t: t).statistic <= 1 / n


def test_ks_spec_examples():
    g = generator(8, 8)
    x = g.gamma(1.0, size=10_000)
    assert ks_test(x, sps.gamma(1.0).cdf).p_value > 1e-3
    assert ks_test(x, sps.gamma(2.0).cdf).p_value <= 1e-6


def test_independence_spec_examples():
    g = generator(9, 9)
    u = g.random(1000)
    dep = independence_test(u, u, seed=1)
    assert dep.p_value <= 1e-3 and dep.statistic == pytest.approx(1.0)
    assert independence_test(u, g.random(1000), seed=1).p_value > 1e-3


def test_regression_spec_examples():
    g = generator(10, 10)
    u = g.random(10_000)
    const = regression_constancy_test(u, np.full(10_000, 2.5))
    assert const.statistic == 0.0 and const.p_value == 1.0
    assert regression_constancy_test(u, u).p_value <= 1e-3
