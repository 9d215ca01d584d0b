import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfacorr.errors import DomainError, GeometryError
from pfacorr.profiles import (Flat, Grid, Hyperboloid, ParallelCylinder, Polynomial, Radial, Sphere,
                              load_grid_csv, load_profile, profile_from_dict, tilt_transform)

PROFILES = [
    Flat(0.3, (0.1, -0.05)),
    Sphere(2.0, 0.1, 1, (0.2, -0.1)),
    Sphere(1.5, 0.0, -1),
    ParallelCylinder(1.3, 0.7, 0.2, 1, (0.1, 0.0)),
    Hyperboloid(0.8, 0.6, 0.05, -1, (0.0, 0.3)),
    Polynomial({(2, 0): 0.4, (1, 1): 0.1, (0, 2): 0.3, (3, 0): 0.05, (0, 4): 0.02}, 0.1, (0.1, 0.1)),
    Radial({2: 0.5, 3: 0.1, 4: -0.01}, 0.2, 1, (-0.1, 0.0)),
]


def _fd_gradient(p, x, y, h=1e-5):
    gx = (p.height(x + h, y) - p.height(x - h, y)) / (2 * h)
    gy = (p.height(x, y + h) - p.height(x, y - h)) / (2 * h)
    return gx, gy


def _fd_hessian(p, x, y, h=1e-4):
    gxp, gyp = p.gradient(x + h, y)
    gxm, gym = p.gradient(x - h, y)
    _, gyq = p.gradient(x, y + h)
    _, gyr = p.gradient(x, y - h)
    return (gxp - gxm) / (2 * h), (gyp - gym) / (2 * h), (gyq - gyr) / (2 * h)


@pytest.mark.parametrize("profile", PROFILES, ids=lambda p: p.kind)
@settings(max_examples=30, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_derivatives_match_finite_differences(profile, x, y):
    g = profile.gradient(x, y)
    fd = _fd_gradient(profile, x, y)
    assert np.allclose(g, fd, rtol=1e-7, atol=1e-8)
    hs = profile.hessian(x, y)
    fdh = _fd_hessian(profile, x, y)
    assert np.allclose(hs, fdh, rtol=1e-6, atol=1e-7)


@pytest.mark.parametrize("profile", PROFILES, ids=lambda p: p.kind)
def test_descriptor_round_trip(profile):
    clone = profile_from_dict(json.loads(json.dumps(profile.to_dict())))
    pts = np.array([[0.0, 0.1], [0.3, -0.2], [-0.25, 0.4]])
    assert np.allclose(clone.height(pts[:, 0], pts[:, 1]), profile.height(pts[:, 0], pts[:, 1]),
                       rtol=1e-15, atol=0)


def test_sphere_shape_and_patch():
    s = Sphere(2.0, 0.5)
    assert s.height(0.0, 0.0) == pytest.approx(0.5)
    assert s.height(1.2, 0.0) == pytest.approx(0.5 + 2.0 - np.sqrt(4.0 - 1.44))
    r = s.patch_radius(3.0)
    gx, _ = s.gradient(r, 0.0)
    assert gx == pytest.approx(3.0, rel=1e-12)
    with pytest.raises(GeometryError):
        s.height(2.5, 0.0)


def test_cylinder_invariant_along_axis():
    c = ParallelCylinder(1.0, np.pi / 3, 0.1)
    ax = np.array([np.cos(np.pi / 3), np.sin(np.pi / 3)])
    assert c.height(*(0.4 * ax)) == pytest.approx(0.1, abs=1e-15)
    assert c.height(0.3, -0.2) == pytest.approx(c.height(0.3 + 0.5 * ax[0], -0.2 + 0.5 * ax[1]))


def test_hyperboloid_apex_curvature():
    h = Hyperboloid(0.5, 0.5)
    assert h.curvature_radius == pytest.approx(2.0)
    hxx, hxy, hyy = h.hessian(0.0, 0.0)
    assert hxx == pytest.approx(0.5) and hyy == pytest.approx(0.5) and hxy == 0.0


def test_polynomial_rejects_linear_terms():
    with pytest.raises(DomainError):
        Polynomial({(1, 0): 1.0})
    with pytest.raises(DomainError):
        Polynomial({(5, 0): 1.0})


def test_grid_matches_smooth_function(tmp_path):
    x = np.linspace(-1, 1, 81)
    y = np.linspace(-1, 1, 81)
    X, Y = np.meshgrid(x, y, indexing="ij")
    f = lambda a, b: 0.3 * a * a + 0.2 * b * b + 0.05 * a ** 3
    g = Grid(x, y, f(X, Y))
    assert g.height(0.33, -0.21) == pytest.approx(f(0.33, -0.21), abs=1e-7)
    gx, gy = g.gradient(0.33, -0.21)
    assert gx == pytest.approx(0.6 * 0.33 + 0.15 * 0.33 ** 2, abs=1e-6)
    assert gy == pytest.approx(0.4 * -0.21, abs=1e-6)
    # the CSV reader gives the same profile
    path = tmp_path / "grid.csv"
    rows = ["x,y,H"] + [f"{float(a)!r},{float(b)!r},{float(f(a, b))!r}" for a in x for b in y]
    path.write_text("\n".join(rows) + "\n")
    g2 = load_profile(path)
    assert g2.height(0.33, -0.21) == pytest.approx(g.height(0.33, -0.21), rel=1e-14)
    with pytest.raises(GeometryError):
        g.height(1.5, 0.0)


def test_grid_csv_must_be_row_major(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y,H\n0,0,1\n1,0,1\n0,1,1\n1,1,1\n")
    with pytest.raises(DomainError):
        load_grid_csv(path)
    path.write_text("x,y,H\n0,0,1\n0,1,oops\n")
    with pytest.raises(DomainError):
        load_grid_csv(path)


def test_profile_descriptor_errors():
    with pytest.raises(DomainError):
        profile_from_dict({"kind": "torus"})
    with pytest.raises(DomainError):
        profile_from_dict({"kind": "sphere"})
    with pytest.raises(DomainError):
        profile_from_dict([1, 2])


def test_tilt_of_flat_is_shear():
    t = tilt_transform(Flat(0.7), 0.05)
    assert t.height(0.4, 0.1) == pytest.approx(0.7 - 0.05 * 0.4, rel=1e-15)
    assert t.gradient(0.4, 0.1) == pytest.approx((-0.05, 0.0))


def test_tilt_identity_and_range():
    f = Sphere(1.0, 0.1)
    assert tilt_transform(f, 0.0) is f
    with pytest.raises(DomainError):
        tilt_transform(f, 0.2)


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.05, 0.05), st.floats(-0.4, 0.4), st.floats(-0.4, 0.4))
def test_tilted_gradient_matches_finite_differences(eps, x, y):
    t = tilt_transform(Sphere(1.5, 0.2, 1, (0.1, 0.0)), eps)
    assert np.allclose(t.gradient(x, y), _fd_gradient(t, x, y), rtol=1e-7, atol=1e-8)
