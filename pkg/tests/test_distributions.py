import json
import math

import mpmath
import numpy as np
import pytest
from scipy import stats as sps

from kummer_forge.distributions import (BetaParams, GammaParams, KummerParams, cdf, draw,
                                        expectation, kummer_acceptance_rate, log_norm_const,
                                        log_pdf, moment, pdf, sample, spec_from_dict,
                                        spec_from_json, spec_to_dict, survival_power_moment)
from kummer_forge.errors import DomainError, MomentDomainError, SamplerDegenerateError
from kummer_forge.rng import generator
from kummer_forge.stats import ks_test

KUMMERS = [KummerParams(2.0, 1.0, 1.0), KummerParams(0.5, -0.3, 2.0),
           KummerParams(3.0, -2.5, 0.7), KummerParams(0.7, 2.0, 0.1),
           KummerParams(1.5, -4.2, 3.0)]


def _mp_kummer_integral(spec, upper):
    # Default 15-digit mpmath quadrature is not accurate enough near t = 0.
    with mpmath.workdps(30):
        a, b, c = (mpmath.mpf(v) for v in (spec.a, spec.b, spec.c))
        pts = [0, 1, mpmath.inf] if upper == math.inf else [0, upper]
        return mpmath.quad(lambda t: t ** (a - 1) * mpmath.exp(-c * t)
                           * (1 + t) ** (-(a + b)), pts)


@pytest.mark.parametrize("spec", KUMMERS, ids=str)
def test_kummer_normalizer_matches_mpmath(spec):
    want = float(mpmath.log(_mp_kummer_integral(spec, math.inf)))
    assert log_norm_const(spec) == pytest.approx(want, abs=1e-10)


def test_gamma_and_beta_match_scipy():
    x = np.linspace(0.05, 6.0, 40)
    np.testing.assert_allclose(pdf(GammaParams(2.5, 1.7), x),
                               sps.gamma(2.5, scale=1 / 1.7).pdf(x), rtol=1e-12)
    np.testing.assert_allclose(cdf(GammaParams(2.5, 1.7), x),
                               sps.gamma(2.5, scale=1 / 1.7).cdf(x), rtol=1e-12)
    u = np.linspace(0.01, 0.99, 40)
    np.testing.assert_allclose(pdf(BetaParams(0.7, 3.0), u), sps.beta(0.7, 3.0).pdf(u),
                               rtol=1e-12)
    np.testing.assert_allclose(cdf(BetaParams(0.7, 3.0), u), sps.beta(0.7, 3.0).cdf(u),
                               rtol=1e-12)


def test_kummer_reduces_to_gamma_when_a_plus_b_is_zero():
    x = np.geomspace(1e-3, 20, 30)
    np.testing.assert_allclose(pdf(KummerParams(2.0, -2.0, 1.5), x),
                               pdf(GammaParams(2.0, 1.5), x), rtol=1e-10)


@pytest.mark.parametrize("spec", KUMMERS, ids=str)
def test_kummer_cdf_against_mpmath(spec):
    z = _mp_kummer_integral(spec, math.inf)
    pts = np.array([0.05, 0.4, 1.0, 3.0, 9.0])
    for p, g in zip(pts, cdf(spec, pts)):
        want = _mp_kummer_integral(spec, float(p)) / z
        assert g == pytest.approx(float(want), abs=1e-9)


def test_cdf_clamps_and_is_monotone():
    spec = KUMMERS[0]
    assert cdf(spec, 0.0) == 0.0 and cdf(spec, -3.0) == 0.0
    assert cdf(spec, math.inf) == 1.0
    x = np.geomspace(1e-4, 50, 500)
    assert np.all(np.diff(cdf(spec, x)) >= 0)
    # Unsorted, duplicated input keeps its order.
    pts = np.array([3.0, 0.5, 3.0, 1.0])
    np.testing.assert_allclose(cdf(spec, pts), [cdf(spec, p) for p in pts], rtol=1e-12)


def test_log_pdf_support_checks():
    with pytest.raises(DomainError):
        log_pdf(KUMMERS[0], -1.0)
    with pytest.raises(DomainError):
        log_pdf(BetaParams(2, 2), 1.5)
    assert log_pdf(KummerParams(0.5, 1.0, 1.0), 0.0) == math.inf


@pytest.mark.parametrize("spec", KUMMERS, ids=str)
@pytest.mark.parametrize("s", [1.0, 2.0, -0.2, 0.5])
def test_moments_vs_quadrature(spec, s):
    if s <= -spec.a:
        pytest.skip("moment does not exist")
    assert moment(spec, s) == pytest.approx(expectation(spec, power=s), rel=1e-9)


def test_moment_domain_error_names_the_bound():
    with pytest.raises(MomentDomainError, match="requires s > -a"):
        moment(KummerParams(0.5, 1.0, 1.0), -0.5)
    with pytest.raises(MomentDomainError):
        moment(GammaParams(2.0, 1.0), -2.0)


@pytest.mark.parametrize("spec", [KUMMERS[0], KUMMERS[2], GammaParams(3.0, 2.0)], ids=str)
def test_survival_power_moment(spec):
    for k in (0.5, 1.0, 3.0):
        want = expectation(spec, log_weight=lambda x, k=k: -k * np.log1p(x))
        assert survival_power_moment(spec, k) == pytest.approx(want, rel=1e-9)
    assert survival_power_moment(spec, 0) == 1.0
    with pytest.raises(DomainError):
        survival_power_moment(spec, -1)


@pytest.mark.parametrize("spec", KUMMERS + [GammaParams(0.3, 2.0), BetaParams(0.5, 2.5)],
                         ids=str)
def test_sampler_goodness_of_fit(spec):
    x = sample(spec, 50_000, seed=99, stream_id=3).values
    assert ks_test(x, lambda t: cdf(spec, t)).p_value > 1e-3


def test_sampling_is_reproducible_and_stream_separated():
    spec = KUMMERS[1]
    a = sample(spec, 1000, seed=5, stream_id=1)
    b = sample(spec, 1000, seed=5, stream_id=1)
    c = sample(spec, 1000, seed=5, stream_id=2)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert len(a) == 1000 and a.seed == 5 and a.stream_id == 1


def test_acceptance_rate_matches_empirical():
    spec = KummerParams(2.0, 1.0, 1.0)
    rate = kummer_acceptance_rate(spec)
    assert rate == pytest.approx(0.1055, abs=5e-4)
    neg = KummerParams(3.0, -5.5, 1.0)
    assert 0 < kummer_acceptance_rate(neg) <= 1


def test_degenerate_sampler_raises():
    spec = KummerParams(1.0, 999.0, 0.001)
    with pytest.raises(SamplerDegenerateError) as info:
        draw(spec, 10, generator(0, 0))
    assert info.value.trials > 0


@pytest.mark.parametrize("bad", [dict(a=0, b=1, c=1), dict(a=1, b=math.nan, c=1),
                                 dict(a=1, b=1, c=-1)])
def test_parameter_validation(bad):
    with pytest.raises(DomainError):
        KummerParams(**bad)


def test_spec_serialization_round_trip():
    for spec in KUMMERS + [GammaParams(2.0, 3.0), BetaParams(1.5, 0.5)]:
        d = spec_to_dict(spec)
        assert spec_from_dict(d) == spec
        assert spec_from_json(json.dumps(d)) == spec
    with pytest.raises(DomainError):
        spec_from_dict({"family": "weibull", "k": 1})
    with pytest.raises(DomainError):
        spec_from_dict({"family": "gamma", "shape": 1})
    with pytest.raises(DomainError):
        spec_from_json("{not json")
