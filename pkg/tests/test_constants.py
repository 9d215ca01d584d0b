import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from pfacorr.constants import (BoundaryCondition, PiRational, SUPPORTED_PAIRS, alpha_coefficient,
                               beta_coefficient, coefficient_set, plate_energy_density, plate_law,
                               theta1_exact, tilt_residual)
from pfacorr.errors import DomainError, UnsupportedConfigurationError

PI2 = math.pi ** 2


@pytest.mark.parametrize("bc, H, expected", [
    ("D", 1.0, -PI2 / 1440),
    ("EM", 1.0, -PI2 / 720),
    ("DN", 1.0, 7 * PI2 / 11520),
    ("D", 2.0, -PI2 / 1440 / 8),
])
def test_plate_energy_density_values(bc, H, expected):
    assert plate_energy_density(bc, H) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("H", [0.0, -1.0])
def test_plate_energy_density_rejects_nonpositive(H):
    with pytest.raises(DomainError):
        plate_energy_density("D", H)


def test_beta_values():
    assert beta_coefficient("D", exact=True) == PiRational(Fraction(2, 3))
    assert beta_coefficient("N") == pytest.approx(2 / 3 * (1 - 30 / PI2), rel=1e-15)
    assert beta_coefficient("N") == pytest.approx(-1.35976, abs=5e-6)
    assert beta_coefficient("EM") == pytest.approx(2 / 3 * (1 - 15 / PI2), rel=1e-15)
    assert beta_coefficient("EM") == pytest.approx(-0.3465452, abs=5e-8)
    assert beta_coefficient("ND") == pytest.approx(2 / 3 - 80 / (7 * PI2), rel=1e-15)
    assert beta_coefficient("DN") == pytest.approx(2 / 3, rel=1e-15)


def test_beta_em_is_average_exactly():
    avg = (beta_coefficient("D", exact=True) + beta_coefficient("N", exact=True)) / 2
    assert beta_coefficient("EM", exact=True) == avg


@pytest.mark.parametrize("pair", sorted(SUPPORTED_PAIRS))
def test_tilt_constraint_all_pairs(pair):
    cs = coefficient_set(*pair)
    total = cs.beta1_exact + cs.beta2_exact + cs.beta_cross_exact
    assert total == PiRational(Fraction(2))
    assert tilt_residual(cs.beta1, cs.beta2, cs.beta_cross) == pytest.approx(0.0, abs=1e-14)
    assert cs.beta_minus == 0.0


def test_coefficient_set_examples():
    dd = coefficient_set("D", "D")
    assert dd.beta1 == dd.beta2 == dd.beta_cross == pytest.approx(2 / 3)
    em = coefficient_set("EM")
    assert em.beta_cross == pytest.approx(2.69309, abs=5e-6)
    nd = coefficient_set("D", "N")
    assert nd.beta1 == pytest.approx(2 / 3)
    assert nd.beta2 == pytest.approx(2 / 3 - 80 / (7 * PI2))
    assert nd.beta_cross == pytest.approx(2 / 3 + 80 / (7 * PI2))
    # swapping the surfaces swaps beta1 and beta2 only
    dn = coefficient_set("ND")
    assert (dn.beta1, dn.beta2, dn.beta_cross) == (nd.beta2, nd.beta1, nd.beta_cross)


def test_unsupported_pair():
    with pytest.raises(UnsupportedConfigurationError):
        coefficient_set("D", "EM")
    with pytest.raises(UnsupportedConfigurationError):
        BoundaryCondition.parse("X")


def test_theta1_exact():
    assert theta1_exact("D") == PiRational(Fraction(1, 3))
    assert float(theta1_exact("N")) == pytest.approx(-3.72, abs=5e-3)
    assert float(theta1_exact("EM")) == pytest.approx(-1.69, abs=5e-3)
    assert str(theta1_exact("N")) == "1/3 - 40/pi^2"


def test_alpha_values():
    assert alpha_coefficient("EM") == alpha_coefficient("D") + alpha_coefficient("N")
    assert alpha_coefficient("DN") == Fraction(-7, 8)


@given(st.floats(1e-3, 1e3), st.sampled_from(["D", "N", "EM", "DN", "ND"]))
def test_plate_law_sign_and_scaling(H, bc):
    U = plate_energy_density(bc, H)
    if bc in ("DN", "ND"):
        assert U > 0
    else:
        assert U < 0
    assert plate_energy_density(bc, 2 * H) == pytest.approx(U / 8, rel=1e-13)


@given(st.floats(1e-2, 1e2))
def test_plate_law_derivatives(H):
    law = plate_law("D")
    U = law.energy_per_area(H)
    assert law.derivative(H, 1) == pytest.approx(-3 * U / H, rel=1e-13)
    assert law.derivative(H, 2) == pytest.approx(12 * U / H ** 2, rel=1e-13)


@given(st.fractions(), st.fractions(), st.fractions(), st.fractions())
def test_pirational_arithmetic(a, b, c, e):
    x, y = PiRational(a, b), PiRational(c, e)
    assert float(x + y) == pytest.approx(float(x) + float(y), rel=1e-12, abs=1e-12)
    assert x - x == PiRational(Fraction(0))
