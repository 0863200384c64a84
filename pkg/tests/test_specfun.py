import math

import mpmath
import pytest

from kummer_forge.errors import DomainError, QuadratureError
from kummer_forge.specfun import QuadratureConfig, log_tricomi_u, tricomi_u

GRID = [(0.5, 0.5, 1.0), (1.0, 2.0, 0.3), (2.0, -1.0, 1.0), (3.0, 0.5, 0.7),
        (0.2, -3.0, 5.0), (5.0, 1.5, 20.0), (1.5, 4.0, 0.05), (7.0, -6.5, 2.0),
        (0.7, 1.0, 100.0), (2.5, 3.5, 1e-3)]


@pytest.mark.parametrize("a,b,z", GRID)
def test_matches_mpmath_hyperu(a, b, z):
    want = float(mpmath.hyperu(a, b, z))
    assert tricomi_u(a, b, z) == pytest.approx(want, rel=1e-9)


def test_exponential_integral_oracle():
    assert tricomi_u(1.0, 1.0, 1.0) == pytest.approx(float(mpmath.e * mpmath.e1(1)), rel=1e-12)
    assert tricomi_u(1.0, 1.0, 1.0) == pytest.approx(0.5963473623, abs=1e-10)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.5, 7.0])
@pytest.mark.parametrize("z", [0.1, 1.0, 20.0])
def test_power_identity(a, z):
    assert tricomi_u(a, a + 1.0, z) * z ** a == pytest.approx(1.0, abs=1e-9)


def test_log_form_avoids_overflow():
    # U(a, b, z) ~ z^(-a) for large z; at z tiny and a large the value overflows.
    val = log_tricomi_u(200.0, 250.0, 1e-3)
    assert math.isfinite(val) and val > 700
    want = float(mpmath.log(mpmath.hyperu(200, 250, mpmath.mpf("1e-3"))))
    assert val == pytest.approx(want, rel=1e-9)


@pytest.mark.parametrize("a,b,z", [(0.0, 1.0, 1.0), (-1.0, 1.0, 1.0), (1.0, 1.0, 0.0),
                                   (1.0, math.nan, 1.0), (1.0, 1.0, math.inf)])
def test_domain_errors(a, b, z):
    with pytest.raises(DomainError):
        tricomi_u(a, b, z)


def test_config_validation_and_budget():
    with pytest.raises(DomainError):
        QuadratureConfig(rel_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureConfig(max_subdivisions=0)
    tight = QuadratureConfig(rel_tol=1e-15, max_subdivisions=1)
    with pytest.raises(QuadratureError):
        tricomi_u(0.01, -40.0, 0.01, tight)
