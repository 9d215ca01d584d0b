import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfacorr.aeseries import force_series, series_fixture
from pfacorr.constants import beta_coefficient, theta1_exact
from pfacorr.errors import DomainError, FitError, PoleError, ValidityWarning
from pfacorr.pade import (AsymptoticSeries, EnergyCurve, PadeApproximant, build_energy_pade,
                          build_pade, classify_poles, deflate_doublets, energy_curve, eval_force,
                          extract_thetas, fit_theta1, large_r_targets, load_series, pole_check)

PUBLISHED_N = {"D": 7, "N": 13}


def built(bc, n=None):
    series = load_series(bc, n or PUBLISHED_N[bc])
    return series, build_pade(series, 1.0, beta_coefficient(bc))


# -- construction ----------------------------------------------------------------------

@pytest.mark.parametrize("bc, n, M", [("D", 7, 7), ("N", 13, 11), ("EM", 15, 12)])
def test_degree_counting(bc, n, M):
    j0 = 2 if bc == "D" else 4
    assert (j0 + n + 5) % 2 == 0 and (j0 + n + 5) // 2 == M
    if bc != "EM":
        assert built(bc, n)[1].M == M


def test_odd_count_is_an_input_error():
    with pytest.raises(DomainError):
        build_pade(load_series("D", 6), 1.0, 2 / 3)


@pytest.mark.parametrize("bc", ["D", "N"])
def test_constraints_are_met(bc):
    series, pade = built(bc)
    assert pade.residual <= 1e-10
    taylor = pade.taylor(series.j0 + series.n)
    assert np.allclose(taylor[series.j0 + 1:], series.coefficients, rtol=1e-9, atol=0)
    assert np.all(taylor[:series.j0 + 1] == 0)
    c3, c2 = large_r_targets(1.0, beta_coefficient(bc))
    assert pade.large_r(2) == pytest.approx([c3, c2], rel=1e-10)
    assert len(pade.denominator) - 1 == pade.M - 3


def test_round_trip_of_an_admissible_rational():
    # the series of a built approximant rebuilds the same approximant
    series, pade = built("D")
    coeffs = pade.taylor(series.j0 + series.n)[series.j0 + 1:]
    again = build_pade(AsymptoticSeries("D", series.j0, coeffs), 1.0, 2 / 3)
    assert np.allclose(again.p, pade.p, rtol=1e-10, atol=1e-12)
    assert np.allclose(again.q, pade.q, rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("bc", ["D", "N"])
def test_theta1_is_imposed(bc):
    _, pade = built(bc)
    assert extract_thetas(pade, 1.0)["theta1"] == pytest.approx(float(theta1_exact(bc)), abs=1e-9)


def test_theta2_values():
    assert extract_thetas(built("D")[1], 1.0)["theta2"] == pytest.approx(0.08, abs=0.03)
    assert extract_thetas(built("N")[1], 1.0)["theta2"] == pytest.approx(-24.01, rel=0.1)


def test_theta2_sensitivity_is_finite():
    # diagnostic only: rebuilding with n - 2 terms moves theta2 by a finite amount
    a = extract_thetas(built("N", 13)[1], 1.0)["theta2"]
    b = extract_thetas(built("N", 11)[1], 1.0)["theta2"]
    assert math.isfinite(a - b)


# -- fixtures ----------------------------------------------------------------------------

@pytest.mark.parametrize("bc, n", [("D", 13), ("N", 15)])
def test_fixture_matches_exact_recursion(bc, n):
    series = load_series(bc)
    assert series.n == n
    exact = force_series(bc, n)
    assert list(series.exact) == [str(c) for c in exact]
    assert series.coefficients == pytest.approx([float(c) / math.pi for c in exact], rel=1e-15)


def test_fixture_schema_round_trip(tmp_path):
    path = tmp_path / "ae.json"
    path.write_text(json.dumps(series_fixture("D", 5)))
    s = AsymptoticSeries.from_json(path)
    assert s.n == 5 and s.j0 == 2
    path.write_text(json.dumps({"coefficients": [1.0]}))
    with pytest.raises(DomainError, match="'bc'"):
        AsymptoticSeries.from_json(path)


def test_missing_fixture_names_schema():
    with pytest.raises(DomainError, match="coefficients"):
        load_series("EM")


# -- poles ---------------------------------------------------------------------------------

def test_pole_check_simple_denominators():
    assert pole_check([1.0, 1.0], 100.0) == []
    assert pole_check([1.0, -0.2], 10.0) == [pytest.approx(5.0)]
    assert pole_check([1.0, -0.2], 4.0) == []


def test_nD_doublet_is_classified():
    info = classify_poles(built("D")[1], 100.0)
    assert len(info) == 1 and info[0]["doublet"]
    assert info[0]["root"] == pytest.approx(0.04715, abs=1e-5)


def test_deflation_keeps_the_small_r_zero():
    series, pade = built("D")
    with pytest.warns(ValidityWarning):
        clean = deflate_doublets(pade, 100.0)
    assert np.all(clean.p[:series.j0 + 1] == 0)
    assert eval_force(clean, 1e-6) / 1e-18 == pytest.approx(series.coefficients[0], rel=1e-5)


def test_n_approximant_pole_free():
    assert pole_check(built("N")[1], 100.0) == []


def test_genuine_pole_blocks_the_energy():
    pade = PadeApproximant(p=np.array([0.0, 0.0, 0.0, -1.0]), q=np.array([-0.2]))
    with pytest.raises(PoleError):
        energy_curve(pade, 1.0, [1.0, 10.0])
    with pytest.raises(PoleError):
        eval_force(pade, 5.0)


# -- evaluation -----------------------------------------------------------------------------

def test_force_limits():
    series, pade = built("D")
    r = 1e-4
    assert eval_force(pade, r) / r ** (series.j0 + 1) == pytest.approx(series.coefficients[0], rel=1e-3)
    r = 1e6
    assert eval_force(pade, r) / r ** 3 == pytest.approx(pade.c3, rel=1e-5)


def _pfa_only(alpha, beta, with_c2):
    c3, c2 = large_r_targets(alpha, beta)
    return PadeApproximant(p=np.array([0.0, 0.0, c2 if with_c2 else 0.0, c3]), q=np.array([]),
                           c3=c3, c2=c2)


@given(st.floats(0.01, 1.0))
@settings(max_examples=20, deadline=None)
def test_energy_of_pure_pfa_is_one(x):
    curve = energy_curve(_pfa_only(1.0, 2 / 3, False), 1.0, [1.0 / x])
    assert curve.ratio[0] == pytest.approx(1.0, rel=1e-12)


@given(st.floats(0.01, 1.0), st.sampled_from(["D", "N", "EM"]))
@settings(max_examples=20, deadline=None)
def test_energy_first_correction(x, bc):
    beta = beta_coefficient(bc)
    curve = energy_curve(_pfa_only(2.0, beta, True), 2.0, [1.0 / x])
    assert curve.ratio[0] == pytest.approx(1 + (2 * beta - 1) * x, rel=1e-11)


def test_energy_derivative_is_force():
    _, pade = built("N")
    r = np.linspace(2.0, 6.0, 401)
    curve = energy_curve(pade, 1.0, r)
    rs = 1.0 / curve.d_over_R
    ER = curve.ratio * (-math.pi ** 3 * rs ** 2 / 1440)
    dER = np.gradient(ER, rs, edge_order=2)
    assert np.allclose(dER[5:-5], eval_force(pade, rs[5:-5]) / rs[5:-5] ** 2, rtol=1e-5)


@pytest.mark.parametrize("bc", ["D", "N"])
def test_small_distance_behaviour_follows_theta2(bc):
    # E/E_PFA - 1 - theta1 x = x^2 (theta2 ln x + c) + ..., so the rest divided
    # by x^2 ln x is linear in 1 / ln x with intercept theta2
    _, pade = built(bc)
    th = extract_thetas(pade, 1.0)
    x = np.geomspace(1e-5, 1e-3, 5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        curve = energy_curve(pade, 1.0, 1.0 / x)
    x = curve.d_over_R
    rest = (curve.ratio - 1 - th["theta1"] * x) / (x * x * np.log(x))
    slope, intercept = np.polyfit(1 / np.log(x), rest, 1)
    assert intercept == pytest.approx(th["theta2"], rel=1e-2)


# -- fitting ---------------------------------------------------------------------------------

def test_fit_theta1_round_trip():
    x = np.linspace(0.1, 0.5, 9)
    curve = EnergyCurve(x, 1 + x / 3 + 0.08 * x * x * np.log(x))
    fit = fit_theta1(curve, (0.1, 0.5))
    assert fit.theta1 == pytest.approx(1 / 3, rel=1e-12)
    assert fit.theta2 == pytest.approx(0.08, rel=1e-10)
    assert fit.residual < 1e-14


def test_fit_needs_six_points():
    x = np.linspace(0.1, 0.5, 5)
    with pytest.raises(FitError):
        fit_theta1(EnergyCurve(x, 1 + x / 3), (0.1, 0.5))


def test_energy_curve_validation():
    with pytest.raises(DomainError):
        EnergyCurve([0.2, 0.1], [1.0, 1.0])
    with pytest.raises(DomainError):
        EnergyCurve([0.1, 0.2], [1.0, np.nan])


def test_energy_variant_builds():
    series = load_series("D", 7)
    ep = build_energy_pade(series, 1.0, 2 / 3)
    assert ep.residual <= 1e-10
