"""Acceptance criteria 1 to 12.

Each test records a verdict line that is printed after the run (see
``conftest.py``) and then asserts it. Tolerances are the acceptance
tolerances; expected shortfalls are left failing.
"""
import math
import time
import warnings

import numpy as np
import pytest

from pairs import random_pairs
from pfacorr.cli import DEFAULT_TERMS, FIGURE_ORACLE_POINTS, TABLE_FIT_GRID
from pfacorr.constants import (PiRational, alpha_coefficient, beta_coefficient, coefficient_set,
                               theta1_exact)
from pfacorr.errors import DomainError, FitError
from pfacorr.functional import (IntegrationDomain, closed_form_two_spheres, fit_linear_correction,
                                gradient_energy, hyperboloid_correction, hyperboloid_zero,
                                pfa_energy_paraboloid, pfa_scaling_exponent)
from pfacorr.oracle import OracleConfig, ae_extract, oracle_curve, oracle_energy_D, pfa_energy_sphere_plate
from pfacorr.pade import (build_energy_pade, build_pade, classify_poles, energy_curve,
                          eval_energy_pade, extract_thetas, fit_theta1, load_series, pole_check)
from pfacorr.profiles import Flat, Hyperboloid, Polynomial, Radial, Sphere, tilt_transform

PI2 = math.pi ** 2


def _check(verdict, label, ok, detail):
    verdict(label, "PASS" if ok else "FAIL", detail)
    assert ok, detail


@pytest.fixture(scope="module")
def oracle_D():
    """Converged D sphere-plate oracle on the figure grid (adaptive truncation)."""
    return oracle_curve(OracleConfig(R=1.0, d=1.0), FIGURE_ORACLE_POINTS)


@pytest.fixture(scope="module")
def pade_D():
    series = load_series("D", DEFAULT_TERMS["D"])
    return series, build_pade(series, 1.0, beta_coefficient("D"))


# -- 1, 2: exact coefficients ---------------------------------------------------------

def test_criterion_1_coefficient_exactness(verdict):
    t0 = time.perf_counter()
    ref = {"D": 2 / 3, "N": 2 / 3 * (1 - 30 / PI2), "ND": 2 / 3 - 80 / (7 * PI2),
           "EM": 2 / 3 * (1 - 15 / PI2), "DN": 2 / 3}
    worst = max(abs(beta_coefficient(bc) - v) / abs(v) for bc, v in ref.items())
    em = beta_coefficient("EM", exact=True)
    half = (beta_coefficient("D", exact=True) + beta_coefficient("N", exact=True)) / 2
    exact_half = em == half
    worst = max(worst, abs(float(em) - (ref["D"] + ref["N"]) / 2) / abs(float(em)))
    sums = []
    for pair in [("D", None), ("N", None), ("EM", None), ("D", "N"), ("N", "D")]:
        cs = coefficient_set(*pair)
        exact_sum = cs.beta1_exact + cs.beta2_exact + cs.beta_cross_exact
        sums.append(exact_sum == PiRational(2))
        worst = max(worst, abs(cs.beta1 + cs.beta2 + cs.beta_cross - 2) / 2)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-14 and exact_half and all(sums) and dt < 1.0
    _check(verdict, "1", ok, f"max rel dev {worst:.1e}, exact identities {exact_half and all(sums)}, "
                             f"{dt:.3f} s")


def test_criterion_2_table_exact_column(verdict):
    printed = {"D": 0.333, "N": -3.72, "EM": -1.69}
    forms = {"D": "1/3", "N": "1/3 - 40/pi^2", "EM": "1/3 - 20/pi^2"}
    rows, ok = [], True
    for bc, p in printed.items():
        th = theta1_exact(bc)
        digits = len(str(p).split(".")[1])
        ok &= round(float(th), digits) == p and str(th) == forms[bc]
        rows.append(f"{bc} {str(th)} = {float(th):.4f}")
    _check(verdict, "2", ok, ", ".join(rows))


# -- 3, 4: invariants of the gradient functional -----------------------------------------

def test_criterion_3_tilt_invariance(verdict):
    eps = 0.02
    t0 = time.perf_counter()
    worst = 0.0
    for i, (H1, H2) in enumerate(random_pairs(100, seed=3)):
        bc = ("D", "N", "EM")[i % 3]
        a = gradient_energy(H1, H2, bc).energy
        b = gradient_energy(tilt_transform(H1, eps), tilt_transform(H2, eps), bc).energy
        worst = max(worst, abs(b - a) / (eps ** 2 * abs(a)))
    dt = time.perf_counter() - t0
    _check(verdict, "3", worst <= 5 and dt < 60,
           f"max |dE| / (eps^2 |E|) = {worst:.3f} (limit 5) over 100 pairs, {dt:.1f} s")


def test_criterion_4_em_additivity(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    for H1, H2 in random_pairs(100, seed=4):
        em = gradient_energy(H1, H2, "EM").energy
        dn = gradient_energy(H1, H2, "D").energy + gradient_energy(H1, H2, "N").energy
        worst = max(worst, abs(em - dn) / abs(em))
    dt = time.perf_counter() - t0
    _check(verdict, "4", worst <= 1e-12 and dt < 60,
           f"max rel |E_EM - E_D - E_N| = {worst:.1e} over 100 pairs, {dt:.1f} s")


# -- 5, 6, 7: curved geometries ------------------------------------------------------------

def test_criterion_5_sphere_plate_quadrature(verdict):
    t0 = time.perf_counter()
    x = np.array([1e-3, 3e-3, 1e-2])
    rows, ok = [], True
    for bc in ("D", "N", "EM"):
        y = [gradient_energy(Flat(0.0), Sphere(1.0, xi), bc).energy
             / closed_form_two_spheres(1.0, math.inf, xi, bc)["E_PFA"] - 1 for xi in x]
        slope = fit_linear_correction(x, y).slope
        target = 2 * beta_coefficient(bc) - 1
        rel = abs(slope / target - 1)
        ok &= rel <= 1e-2
        rows.append(f"{bc} {slope:.6f} vs {target:.6f} ({rel:.1e})")
    dt = time.perf_counter() - t0
    _check(verdict, "5", ok and dt < 300, ", ".join(rows) + f", {dt:.1f} s")


def test_criterion_6_hyperboloid_zero(verdict):
    lam = hyperboloid_zero("EM")
    root_ok = abs(lam - 1.2011) <= 1e-3 and abs(hyperboloid_correction(lam, "EM")) < 1e-14
    # the quadrature slope of E/E_PFA - 1 changes sign across the root
    x = np.array([1e-3, 3e-3, 1e-2])
    slopes = []
    for l in (lam - 0.05, lam + 0.05):
        y = [gradient_energy(Flat(0.0), Hyperboloid(l * l, l, xi), "EM").energy
             / pfa_energy_paraboloid(xi, 1.0, 1.0, 2) - 1 for xi in x]
        slopes.append(fit_linear_correction(x, y).slope)
    bracket = slopes[0] > 0 > slopes[1]
    _check(verdict, "6", root_ok and bracket,
           f"lambda = {lam:.5f}; quadrature slopes {slopes[0]:+.4f} / {slopes[1]:+.4f} "
           f"at lambda -/+ 0.05")


def test_criterion_7_cubic_asymmetry_scaling(verdict):
    d = np.geomspace(1e-6, 1e-4, 7)
    cubic = pfa_scaling_exponent(lambda di: (Flat(0.0), Radial({2: 0.5, 3: 0.1}, di)), "D", d, (1, 1))
    para = pfa_scaling_exponent(lambda di: (Flat(0.0), Radial({2: 0.5}, di)), "D", d, (1, 1))
    ok = abs(cubic.exponent - 0.5) <= 0.05 and abs(para.exponent - 1.0) <= 0.05
    detail = (f"radial cubic {cubic.exponent:.3f} +- {cubic.stderr:.3f}, "
              f"paraboloid {para.exponent:.3f} +- {para.stderr:.3f}")
    verdict("7", "PASS" if ok else "FAIL", detail)
    # informational: a cubic term odd in x alone cancels at leading order
    try:
        xc = pfa_scaling_exponent(
            lambda di: (Flat(0.0), Polynomial({(2, 0): 0.5, (0, 2): 0.5, (3, 0): 0.1}, di)), "D", d,
            (1, 1), domain=IntegrationDomain(decay=1e-12))
        verdict("7x", "INFO", f"x^3 cubic {xc.exponent:.3f}")
    except (FitError, DomainError) as exc:
        verdict("7x", "INFO", f"x^3 cubic not fitted: {exc}")
    assert ok, detail


# -- 8, 9: Padé pipeline -------------------------------------------------------------------

def test_criterion_8a_theta1(verdict, pade_D):
    th1 = extract_thetas(pade_D[1], 1.0)["theta1"]
    _check(verdict, "8a", abs(th1 - 1 / 3) <= 1e-9, f"theta1 - 1/3 = {th1 - 1 / 3:.1e}")


def test_criterion_8b_theta2(verdict, pade_D):
    th2 = extract_thetas(pade_D[1], 1.0)["theta2"]
    _check(verdict, "8b", abs(th2 - 0.08) <= 0.03, f"theta2 = {th2:.5f}")


def test_criterion_8c_no_poles(verdict, pade_D):
    info = classify_poles(pade_D[1], 100.0)
    desc = ", ".join(f"r = {p['root']:.5f} ({'doublet' if p['doublet'] else 'pole'})" for p in info)
    _check(verdict, "8c", not info, f"denominator roots on (0, 100]: {desc or 'none'}")


def test_criterion_8d_oracle_agreement(verdict, pade_D, oracle_D):
    t0 = time.perf_counter()
    oc40 = oracle_curve(OracleConfig(R=1.0, d=1.0, ell_max=40), FIGURE_ORACLE_POINTS)
    pc = energy_curve(pade_D[1], 1.0, 1.0 / oc40.d_over_R)
    rel40 = np.abs(pc.ratio / oc40.ratio - 1)
    rel = np.abs(pc.ratio / oracle_D.ratio - 1)
    dt = time.perf_counter() - t0
    verdict("8x", "INFO", f"vs converged oracle max {rel.max():.3%}")
    # the fixture's leading terms are regenerable from far-distance oracle data
    est = ae_extract(oracle_curve(OracleConfig(R=1.0, d=1.0), np.linspace(10, 40, 9)))
    f1 = load_series("D").coefficients[0]
    verdict("8y", "INFO", f"ae_extract f1 = {est.coefficients[0]:.6f} vs fixture {f1:.6f}")
    i = int(np.argmax(rel40))
    _check(verdict, "8d", rel40.max() <= 1e-3 and dt < 600,
           f"ell_max=40 max |Pade/oracle - 1| = {rel40.max():.3%} at d/R = {oc40.d_over_R[i]:g}")


@pytest.mark.parametrize("bc, target", [("N", -24.01), ("EM", -4.52)])
def test_criterion_9_other_fixtures(verdict, bc, target):
    try:
        series = load_series(bc, DEFAULT_TERMS[bc])
    except DomainError as exc:
        verdict(f"9{bc}", "BLOCKED", f"{bc} fixture unavailable")
        pytest.skip(f"blocked: {exc}")
    pade = build_pade(series, float(alpha_coefficient(bc)), beta_coefficient(bc))
    th2 = extract_thetas(pade, float(alpha_coefficient(bc)))["theta2"]
    poles = pole_check(pade, 100.0)
    _check(verdict, f"9{bc}", abs(th2 / target - 1) <= 0.1 and not poles,
           f"{bc} n={series.n} theta2 = {th2:.4f}, poles {len(poles)}")


# -- 10, 11: oracle -----------------------------------------------------------------------

def test_criterion_10_table_fit(verdict):
    curve = oracle_curve(OracleConfig(R=1.0, d=1.0), TABLE_FIT_GRID)
    fit = fit_theta1(curve, (0.1, 0.5))
    _check(verdict, "10", 0.30 <= fit.theta1 <= 0.42,
           f"theta1 fit = {fit.theta1:.4f} +- {fit.theta1_stderr:.4f}")


def test_criterion_11_oracle_soundness(verdict, pade_D):
    t0 = time.perf_counter()
    base = oracle_energy_D(OracleConfig(1.0, 0.5, ell_max=20))
    scale = max(abs(c * oracle_energy_D(OracleConfig(c, 0.5 * c, ell_max=20)) / base - 1)
                for c in (0.3, 2.5))
    E = [oracle_energy_D(OracleConfig(1.0, 1.0, ell_max=l)) for l in (10, 14, 18, 22, 26)]
    steps = np.abs(np.diff(E))
    monotone = bool(np.all(np.diff(E) <= 0))
    geometric = bool(np.all(steps[1:] <= 0.5 * steps[:-1]))
    x = 0.05
    ratio = oracle_energy_D(OracleConfig(1.0, x)) / pfa_energy_sphere_plate(1.0, x)
    th2 = extract_thetas(pade_D[1], 1.0)["theta2"]
    expansion = 1 + x / 3 + th2 * x * x * math.log(x)
    dev = abs(ratio / expansion - 1)
    dt = time.perf_counter() - t0
    ok = scale <= 1e-10 and monotone and geometric and dev <= 1e-2 and dt < 600
    _check(verdict, "11", ok,
           f"scale {scale:.1e}, monotone {monotone}, step ratios "
           f"{', '.join(f'{r:.3f}' for r in steps[1:] / steps[:-1])}, d/R=0.05 {ratio:.6f} vs "
           f"{expansion:.6f} ({dev:.2%}), {dt:.0f} s")


# -- 12: energy-resummed counterexample ------------------------------------------------------

def test_criterion_12_energy_pade_counterexample(verdict, pade_D, oracle_D):
    series, force = pade_D
    epade = build_energy_pade(series, 1.0, beta_coefficient("D"))
    poles = pole_check(epade, 100.0)
    x = oracle_D.d_over_R
    r = 1.0 / x
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        e_ratio = eval_energy_pade(epade, r) / (-math.pi ** 3 * r * r / 1440.0)
    f_ratio = energy_curve(force, 1.0, r).ratio
    e_err = np.abs(e_ratio / oracle_D.ratio - 1).max()
    f_err = np.abs(f_ratio / oracle_D.ratio - 1).max()
    factor = e_err / f_err
    _check(verdict, "12", bool(poles) or factor >= 50,
           f"energy variant poles {len(poles)}, max error {e_err:.3%} vs force {f_err:.3%} "
           f"({factor:.1f}x, need 50x)")
