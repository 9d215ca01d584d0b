"""Single-valued height profiles ``z = H(x, y)`` over the reference plane.

Every profile returns heights, gradients and Hessians for arrays of points.
Curved analytic profiles take an ``apex`` height and a ``direction``:
``+1`` for a surface that rises away from its apex (the upper body of a
pair), ``-1`` for one that falls (the lower body).
"""
import csv
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .errors import DomainError, GeometryError

__all__ = [
    "HeightProfile",
    "Flat",
    "Sphere",
    "ParallelCylinder",
    "Hyperboloid",
    "Polynomial",
    "Radial",
    "Grid",
    "Tilted",
    "tilt_transform",
    "profile_from_dict",
    "load_profile",
    "load_grid_csv",
]


class HeightProfile:
    """Interface shared by all profiles."""

    kind = "abstract"
    center = (0.0, 0.0)

    def height(self, x, y):
        raise NotImplementedError

    def gradient(self, x, y):
        raise NotImplementedError

    def hessian(self, x, y):
        raise NotImplementedError(f"{self.kind} profiles do not provide second derivatives")

    def patch_radius(self, slope_limit):
        """Radius around ``center`` inside which the profile can be integrated.

        Profiles that end at a vertical tangent (sphere, cylinder) are cut where
        ``|grad H|`` reaches ``slope_limit``; profiles defined over the whole
        plane return ``inf``.
        """
        return np.inf

    def to_dict(self):
        raise NotImplementedError

    def _local(self, x, y):
        return np.asarray(x, float) - self.center[0], np.asarray(y, float) - self.center[1]


def _pair(value):
    a, b = value
    return (float(a), float(b))


def _check_direction(direction):
    if direction not in (1, -1):
        raise DomainError("direction must be +1 or -1")


@dataclass(frozen=True)
class Flat(HeightProfile):
    """Plane ``H = offset + slope_x x + slope_y y``."""

    offset: float = 0.0
    slope: tuple = (0.0, 0.0)
    kind = "flat"

    def height(self, x, y):
        return self.offset + self.slope[0] * np.asarray(x, float) + self.slope[1] * np.asarray(y, float)

    def gradient(self, x, y):
        z = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
        return z + self.slope[0], z + self.slope[1]

    def hessian(self, x, y):
        z = np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
        return z, z, z

    def to_dict(self):
        return {"kind": self.kind, "offset": self.offset, "slope": list(self.slope)}


@dataclass(frozen=True)
class Sphere(HeightProfile):
    """Spherical cap ``H = apex + direction (R - sqrt(R^2 - rho^2))``."""

    R: float
    apex: float = 0.0
    direction: int = 1
    center: tuple = (0.0, 0.0)
    kind = "sphere"

    def __post_init__(self):
        if not self.R > 0:
            raise DomainError("sphere radius must be positive")
        _check_direction(self.direction)
        object.__setattr__(self, "center", _pair(self.center))

    def _s(self, x, y):
        s2 = self.R ** 2 - x * x - y * y
        if np.any(s2 <= 0):
            raise GeometryError("point outside the sphere's projection")
        return np.sqrt(s2)

    def height(self, x, y):
        x, y = self._local(x, y)
        return self.apex + self.direction * (self.R - self._s(x, y))

    def gradient(self, x, y):
        x, y = self._local(x, y)
        s = self._s(x, y)
        return self.direction * x / s, self.direction * y / s

    def hessian(self, x, y):
        x, y = self._local(x, y)
        s = self._s(x, y)
        s3 = s ** 3
        c = self.direction
        return c * (1 / s + x * x / s3), c * x * y / s3, c * (1 / s + y * y / s3)

    def patch_radius(self, slope_limit):
        return self.R * slope_limit / np.sqrt(1.0 + slope_limit ** 2)

    def to_dict(self):
        return {"kind": self.kind, "R": self.R, "apex": self.apex,
                "direction": self.direction, "center": list(self.center)}


@dataclass(frozen=True)
class ParallelCylinder(HeightProfile):
    """Circular cylinder with its axis along angle ``axis_angle`` in the plane."""

    R: float
    axis_angle: float = 0.0
    apex: float = 0.0
    direction: int = 1
    center: tuple = (0.0, 0.0)
    kind = "cylinder"

    def __post_init__(self):
        if not self.R > 0:
            raise DomainError("cylinder radius must be positive")
        _check_direction(self.direction)
        object.__setattr__(self, "center", _pair(self.center))

    def _u(self, x, y):
        x, y = self._local(x, y)
        nx, ny = -np.sin(self.axis_angle), np.cos(self.axis_angle)
        return nx * x + ny * y, nx, ny

    def _s(self, u):
        s2 = self.R ** 2 - u * u
        if np.any(s2 <= 0):
            raise GeometryError("point outside the cylinder's projection")
        return np.sqrt(s2)

    def height(self, x, y):
        u, _, _ = self._u(x, y)
        return self.apex + self.direction * (self.R - self._s(u))

    def gradient(self, x, y):
        u, nx, ny = self._u(x, y)
        g = self.direction * u / self._s(u)
        return g * nx, g * ny

    def hessian(self, x, y):
        u, nx, ny = self._u(x, y)
        s = self._s(u)
        k = self.direction * (1 / s + u * u / s ** 3)
        return k * nx * nx, k * nx * ny, k * ny * ny

    def patch_radius(self, slope_limit):
        return self.R * slope_limit / np.sqrt(1.0 + slope_limit ** 2)

    def to_dict(self):
        return {"kind": self.kind, "R": self.R, "axis_angle": self.axis_angle, "apex": self.apex,
                "direction": self.direction, "center": list(self.center)}


@dataclass(frozen=True)
class Hyperboloid(HeightProfile):
    """``H = apex + direction (sqrt(R^2 + lam^2 rho^2) - R)``; apex curvature radius ``R / lam^2``."""

    R: float
    lam: float
    apex: float = 0.0
    direction: int = 1
    center: tuple = (0.0, 0.0)
    kind = "hyperboloid"

    def __post_init__(self):
        if not (self.R > 0 and self.lam > 0):
            raise DomainError("hyperboloid needs R > 0 and lam > 0")
        _check_direction(self.direction)
        object.__setattr__(self, "center", _pair(self.center))

    @property
    def curvature_radius(self):
        return self.R / self.lam ** 2

    def height(self, x, y):
        x, y = self._local(x, y)
        return self.apex + self.direction * (np.sqrt(self.R ** 2 + self.lam ** 2 * (x * x + y * y)) - self.R)

    def gradient(self, x, y):
        x, y = self._local(x, y)
        q = np.sqrt(self.R ** 2 + self.lam ** 2 * (x * x + y * y))
        k = self.direction * self.lam ** 2 / q
        return k * x, k * y

    def hessian(self, x, y):
        x, y = self._local(x, y)
        l2 = self.lam ** 2
        q = np.sqrt(self.R ** 2 + l2 * (x * x + y * y))
        c = self.direction
        return (c * (l2 / q - l2 * l2 * x * x / q ** 3), -c * l2 * l2 * x * y / q ** 3,
                c * (l2 / q - l2 * l2 * y * y / q ** 3))

    def to_dict(self):
        return {"kind": self.kind, "R": self.R, "lam": self.lam, "apex": self.apex,
                "direction": self.direction, "center": list(self.center)}


@dataclass(frozen=True)
class Polynomial(HeightProfile):
    """``H = apex + sum c_ij (x - x0)^i (y - y0)^j`` through quartic order.

    ``coefficients`` maps ``(i, j)`` to ``c_ij`` with ``2 <= i + j <= 4``
    (linear terms would move the point of closest approach).
    """

    coefficients: dict
    apex: float = 0.0
    center: tuple = (0.0, 0.0)
    kind = "polynomial"

    def __post_init__(self):
        coeffs = {}
        for key, value in dict(self.coefficients).items():
            i, j = (int(k) for k in (key if not isinstance(key, str) else key.split(",")))
            if i < 0 or j < 0 or not 2 <= i + j <= 4:
                raise DomainError(f"polynomial term x^{i} y^{j} outside degrees 2..4")
            coeffs[(i, j)] = coeffs.get((i, j), 0.0) + float(value)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "center", _pair(self.center))

    def height(self, x, y):
        x, y = self._local(x, y)
        out = np.full(np.broadcast(x, y).shape, float(self.apex))
        for (i, j), c in self.coefficients.items():
            out = out + c * x ** i * y ** j
        return out

    def gradient(self, x, y):
        x, y = self._local(x, y)
        gx = np.zeros(np.broadcast(x, y).shape)
        gy = np.zeros_like(gx)
        for (i, j), c in self.coefficients.items():
            if i:
                gx = gx + c * i * x ** (i - 1) * y ** j
            if j:
                gy = gy + c * j * x ** i * y ** (j - 1)
        return gx, gy

    def hessian(self, x, y):
        x, y = self._local(x, y)
        hxx = np.zeros(np.broadcast(x, y).shape)
        hxy = np.zeros_like(hxx)
        hyy = np.zeros_like(hxx)
        for (i, j), c in self.coefficients.items():
            if i >= 2:
                hxx = hxx + c * i * (i - 1) * x ** (i - 2) * y ** j
            if i and j:
                hxy = hxy + c * i * j * x ** (i - 1) * y ** (j - 1)
            if j >= 2:
                hyy = hyy + c * j * (j - 1) * x ** i * y ** (j - 2)
        return hxx, hxy, hyy

    def to_dict(self):
        return {"kind": self.kind, "apex": self.apex, "center": list(self.center),
                "coefficients": {f"{i},{j}": c for (i, j), c in sorted(self.coefficients.items())}}


@dataclass(frozen=True)
class Radial(HeightProfile):
    """Surface of revolution ``H = apex + direction sum_k a_k rho^k`` (``k = 2..6``)."""

    coefficients: dict
    apex: float = 0.0
    direction: int = 1
    center: tuple = (0.0, 0.0)
    kind = "radial"

    def __post_init__(self):
        coeffs = {}
        for k, a in dict(self.coefficients).items():
            k = int(k)
            if not 2 <= k <= 6:
                raise DomainError("radial powers must lie in 2..6")
            coeffs[k] = float(a)
        object.__setattr__(self, "coefficients", coeffs)
        _check_direction(self.direction)
        object.__setattr__(self, "center", _pair(self.center))

    def _polar(self, x, y):
        x, y = self._local(x, y)
        rho = np.hypot(x, y)
        safe = np.where(rho > 0, rho, 1.0)
        return x, y, rho, np.where(rho > 0, x / safe, 0.0), np.where(rho > 0, y / safe, 0.0)

    def height(self, x, y):
        _, _, rho, _, _ = self._polar(x, y)
        return self.apex + self.direction * sum(a * rho ** k for k, a in self.coefficients.items())

    def gradient(self, x, y):
        x, y, rho, _, _ = self._polar(x, y)
        # h'(rho) / rho
        a = self.direction * sum(k * c * rho ** (k - 2) for k, c in self.coefficients.items())
        return a * x, a * y

    def hessian(self, x, y):
        x, y, rho, cx, cy = self._polar(x, y)
        a = sum(k * c * rho ** (k - 2) for k, c in self.coefficients.items())
        # h'' - h'/rho
        b = sum(k * (k - 2) * c * rho ** (k - 2) for k, c in self.coefficients.items())
        s = self.direction
        return s * (a + b * cx * cx), s * b * cx * cy, s * (a + b * cy * cy)

    def to_dict(self):
        return {"kind": self.kind, "apex": self.apex, "direction": self.direction,
                "center": list(self.center),
                "coefficients": {str(k): a for k, a in sorted(self.coefficients.items())}}


def _fd4(F, h, axis):
    """Fourth-order central differences, fourth-order one-sided at the edges."""
    F = np.moveaxis(np.asarray(F, float), axis, 0)
    n = F.shape[0]
    if n < 5:
        raise DomainError("grid profiles need at least 5 points per axis")
    D = np.empty_like(F)
    D[2:-2] = (F[:-4] - 8 * F[1:-3] + 8 * F[3:-1] - F[4:]) / (12 * h)
    D[0] = (-25 * F[0] + 48 * F[1] - 36 * F[2] + 16 * F[3] - 3 * F[4]) / (12 * h)
    D[1] = (-3 * F[0] - 10 * F[1] + 18 * F[2] - 6 * F[3] + F[4]) / (12 * h)
    D[-1] = (25 * F[-1] - 48 * F[-2] + 36 * F[-3] - 16 * F[-4] + 3 * F[-5]) / (12 * h)
    D[-2] = (3 * F[-1] + 10 * F[-2] - 18 * F[-3] + 6 * F[-4] - F[-5]) / (12 * h)
    return np.moveaxis(D, 0, axis)


@dataclass(frozen=True, eq=False)
class Grid(HeightProfile):
    """Heights on a regular lattice, interpolated with bicubic splines.

    Gradients and Hessians come from fourth-order finite differences of the
    lattice values, splined in turn.
    """

    x: np.ndarray
    y: np.ndarray
    H: np.ndarray
    center: tuple = (0.0, 0.0)
    kind = "grid"
    _splines: dict = field(default=None, repr=False)

    def __post_init__(self):
        x = np.asarray(self.x, float)
        y = np.asarray(self.y, float)
        H = np.asarray(self.H, float)
        if H.shape != (len(x), len(y)):
            raise DomainError(f"grid heights must have shape ({len(x)}, {len(y)}), got {H.shape}")
        if not np.all(np.isfinite(H)):
            raise DomainError("grid heights must be finite")
        hx, hy = np.diff(x), np.diff(y)
        if np.any(hx <= 0) or np.any(hy <= 0) or np.ptp(hx) > 1e-9 * hx[0] or np.ptp(hy) > 1e-9 * hy[0]:
            raise DomainError("grid coordinates must be increasing and evenly spaced")
        Hx = _fd4(H, hx[0], 0)
        Hy = _fd4(H, hy[0], 1)
        splines = {
            "H": RectBivariateSpline(x, y, H, kx=3, ky=3, s=0),
            "Hx": RectBivariateSpline(x, y, Hx, kx=3, ky=3, s=0),
            "Hy": RectBivariateSpline(x, y, Hy, kx=3, ky=3, s=0),
            "Hxx": RectBivariateSpline(x, y, _fd4(Hx, hx[0], 0), kx=3, ky=3, s=0),
            "Hxy": RectBivariateSpline(x, y, _fd4(Hx, hy[0], 1), kx=3, ky=3, s=0),
            "Hyy": RectBivariateSpline(x, y, _fd4(Hy, hy[0], 1), kx=3, ky=3, s=0),
        }
        for name, val in (("x", x), ("y", y), ("H", H), ("_splines", splines)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "center", _pair(self.center))

    def _eval(self, name, x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        if (np.any(x < self.x[0]) or np.any(x > self.x[-1])
                or np.any(y < self.y[0]) or np.any(y > self.y[-1])):
            raise GeometryError("point outside the grid profile")
        shape = np.broadcast(x, y).shape
        xb, yb = np.broadcast_to(x, shape).ravel(), np.broadcast_to(y, shape).ravel()
        return self._splines[name].ev(xb, yb).reshape(shape)

    def height(self, x, y):
        return self._eval("H", x, y)

    def gradient(self, x, y):
        return self._eval("Hx", x, y), self._eval("Hy", x, y)

    def hessian(self, x, y):
        return self._eval("Hxx", x, y), self._eval("Hxy", x, y), self._eval("Hyy", x, y)

    def patch_radius(self, slope_limit):
        cx, cy = self.center
        edge = min(cx - self.x[0], self.x[-1] - cx, cy - self.y[0], self.y[-1] - cy)
        return float(max(edge, 0.0))

    def to_dict(self):
        return {"kind": self.kind, "x": self.x.tolist(), "y": self.y.tolist(),
                "H": self.H.tolist(), "center": list(self.center)}


@dataclass(frozen=True, eq=False)
class Tilted(HeightProfile):
    """First-order image of a profile under a tilt of the reference plane by ``epsilon``.

    ``H' = H - epsilon (x + H dH/dx)``, with ``x`` measured from the origin
    of the reference plane.
    """

    base: HeightProfile
    epsilon: float
    kind = "tilted"

    @property
    def center(self):
        return self.base.center

    def height(self, x, y):
        H = self.base.height(x, y)
        gx, _ = self.base.gradient(x, y)
        return H - self.epsilon * (np.asarray(x, float) + H * gx)

    def gradient(self, x, y):
        H = self.base.height(x, y)
        gx, gy = self.base.gradient(x, y)
        hxx, hxy, _ = self.base.hessian(x, y)
        e = self.epsilon
        return (gx - e * (1.0 + gx * gx + H * hxx),
                gy - e * (gy * gx + H * hxy))

    def patch_radius(self, slope_limit):
        return self.base.patch_radius(slope_limit)

    def to_dict(self):
        return {"kind": self.kind, "epsilon": self.epsilon, "base": self.base.to_dict()}


def tilt_transform(profile, epsilon):
    """Tilt a profile to first order in ``epsilon`` (``|epsilon| <= 0.1``).

    Examples
    --------
    >>> Tilted(Flat(1.0), 0.0).height(0.5, 0.0)
    1.0
    """
    if abs(epsilon) > 0.1:
        raise DomainError("tilt angle must satisfy |epsilon| <= 0.1")
    if epsilon == 0:
        return profile
    return Tilted(profile, float(epsilon))


_KINDS = {
    "flat": lambda d: Flat(d.get("offset", 0.0), tuple(d.get("slope", (0.0, 0.0)))),
    "sphere": lambda d: Sphere(d["R"], d.get("apex", 0.0), int(d.get("direction", 1)),
                               tuple(d.get("center", (0.0, 0.0)))),
    "cylinder": lambda d: ParallelCylinder(d["R"], d.get("axis_angle", 0.0), d.get("apex", 0.0),
                                           int(d.get("direction", 1)),
                                           tuple(d.get("center", (0.0, 0.0)))),
    "hyperboloid": lambda d: Hyperboloid(d["R"], d["lam"], d.get("apex", 0.0),
                                         int(d.get("direction", 1)),
                                         tuple(d.get("center", (0.0, 0.0)))),
    "polynomial": lambda d: Polynomial(d["coefficients"], d.get("apex", 0.0),
                                       tuple(d.get("center", (0.0, 0.0)))),
    "radial": lambda d: Radial(d["coefficients"], d.get("apex", 0.0), int(d.get("direction", 1)),
                               tuple(d.get("center", (0.0, 0.0)))),
    "grid": lambda d: Grid(d["x"], d["y"], d["H"], tuple(d.get("center", (0.0, 0.0)))),
}


def profile_from_dict(data):
    """Build a profile from a descriptor ``{"kind": ..., parameters}``."""
    if not isinstance(data, dict) or "kind" not in data:
        raise DomainError("profile descriptor must be an object with a 'kind' key")
    kind = str(data["kind"]).lower()
    if kind not in _KINDS:
        raise DomainError(f"unknown profile kind {data['kind']!r}; expected one of {sorted(_KINDS)}")
    try:
        return _KINDS[kind](data)
    except KeyError as exc:
        raise DomainError(f"profile kind {kind!r} is missing parameter {exc}") from None


def load_grid_csv(path, center=(0.0, 0.0)):
    """Read a grid profile from CSV columns ``x, y, H`` in row-major order (``y`` fastest)."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    try:
        data = np.array([[float(v) for v in r[:3]] for r in rows])
    except ValueError as exc:
        raise DomainError(f"grid CSV {path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != 3:
        raise DomainError("grid CSV needs three columns x, y, H")
    xs = np.unique(data[:, 0])
    ys = np.unique(data[:, 1])
    if len(xs) * len(ys) != len(data):
        raise DomainError("grid CSV does not describe a full rectangular lattice")
    if not (np.allclose(data[:, 0], np.repeat(xs, len(ys)))
            and np.allclose(data[:, 1], np.tile(ys, len(xs)))):
        raise DomainError("grid CSV rows must be row-major: x outer, y inner, both ascending")
    return Grid(xs, ys, data[:, 2].reshape(len(xs), len(ys)), center)


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_profile(path):
    """Load a profile from a JSON descriptor or a CSV grid."""
    if str(path).lower().endswith(".csv"):
        return load_grid_csv(path)
    with open(path) as fh:
        return profile_from_dict(json.load(fh))
