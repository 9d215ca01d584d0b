import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfacorr.quadrature import cubature_polar, cubature_rectangles, gk15_1d


def test_gk15_weights():
    x, wk, wg = gk15_1d()
    assert wk.sum() == pytest.approx(2.0, rel=1e-15)
    assert wg.sum() == pytest.approx(2.0, rel=1e-15)
    # Kronrod is exact through degree 22, Gauss through degree 13
    assert wk @ x ** 22 == pytest.approx(2.0 / 23, rel=1e-13)
    assert wg @ x ** 12 == pytest.approx(2.0 / 13, rel=1e-13)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 6), st.integers(0, 6))
def test_rectangle_polynomials_exact(i, j):
    res = cubature_rectangles(lambda X, Y: X ** i * Y ** j, [(0.0, 1.0, 0.0, 2.0)])
    assert res.value[0] == pytest.approx(2.0 ** (j + 1) / ((i + 1) * (j + 1)), rel=1e-14)
    assert res.n_cells == 1


def test_polar_gaussian():
    res = cubature_polar(lambda X, Y: np.exp(-(X * X + Y * Y)), [0.0, 1.0, 3.0, 8.0], rtol=1e-12)
    assert res.converged
    assert res.value[0] == pytest.approx(math.pi * (1 - math.exp(-64)), rel=1e-12)


def test_peaked_integrand_refines():
    eps = 1e-3
    res = cubature_rectangles(lambda X, Y: 1.0 / (eps + X * X + Y * Y) ** 2,
                              [(-1.0, 1.0, -1.0, 1.0)], rtol=1e-9)
    assert res.converged and res.n_cells > 1
    # compare with the polar form over the inscribed disk plus the corners
    disk = math.pi * (1 / eps - 1 / (eps + 1.0))
    assert res.value[0] > disk


def test_vector_components_converge_separately():
    # the second component is much smaller; it still meets its own tolerance
    f = lambda X, Y: np.stack((np.ones_like(X), 1e-9 * np.sin(7 * X) ** 2))
    res = cubature_rectangles(f, [(0.0, 1.0, 0.0, 1.0)], rtol=1e-10)
    exact = 1e-9 * (0.5 - math.sin(14) / 28)
    assert res.value[1] == pytest.approx(exact, rel=1e-10)


def test_summation_is_deterministic():
    f = lambda X, Y: np.exp(-X * X - 3 * Y * Y) * np.cos(X * Y)
    a = cubature_rectangles(f, [(-3, 3, -3, 3)], rtol=1e-11)
    b = cubature_rectangles(f, [(-3, 3, -3, 3)], rtol=1e-11)
    assert a.value[0] == b.value[0]
