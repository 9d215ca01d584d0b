"""Second-order gradient expansion of the interaction energy of two surfaces.

For profiles ``H1 < H2`` with local separation ``H = H2 - H1``::

    E = int d^2x U(H) [1 + beta1 |grad H1|^2 + beta2 |grad H2|^2
                         + beta_cross grad H1 . grad H2]

The quadrature integrates four unit-alpha moments
``int U``, ``int U |grad H1|^2``, ``int U |grad H2|^2``, ``int U grad H1 . grad H2``
with a refinement pattern that never depends on the coefficients, so energies
for different boundary conditions are exact linear combinations of the same
numbers. Closed forms for spheres, crossed cylinders and hyperboloids are
separate operations because they already carry the small-``d/R`` truncation.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .constants import PLATE_EXPONENT, PlateLaw, beta_coefficient, coefficient_set
from .errors import DomainError, FitError, GeometryError, ValidityWarning
from .quadrature import cubature_polar, cubature_rectangles

__all__ = [
    "IntegrationDomain",
    "GradientEnergy",
    "gradient_energy",
    "closest_approach",
    "pfa_energy_paraboloid",
    "closed_form_two_spheres",
    "closed_form_inclined_cylinders",
    "hyperboloid_correction",
    "hyperboloid_zero",
    "ScalingFit",
    "LinearFit",
    "pfa_scaling_exponent",
    "fit_linear_correction",
]


@dataclass(frozen=True)
class IntegrationDomain:
    """Integration region around the point of closest approach.

    Parameters
    ----------
    shape : {"disk", "rectangle"}
    radius : float, optional
        disk radius; chosen automatically when omitted
    extents : (float, float), optional
        full side lengths of the rectangle
    center : (float, float), optional
        defaults to the point of closest approach
    rtol : float
        target relative quadrature error of the plain PFA moment
    slope_cap : float
        slopes above this inside the dominant region raise :class:`ValidityWarning`
    patch_slope : float
        sphere and cylinder profiles are cut where their slope reaches this value
    decay : float
        automatic radius: the integrand falls below ``decay`` times its peak
    points_per_axis : int
        minimum quadrature nodes per axis (at least 16)
    max_cells : int
    """

    shape: str = "disk"
    radius: float = None
    extents: tuple = None
    center: tuple = None
    rtol: float = 1e-8
    slope_cap: float = 0.5
    patch_slope: float = 3.0
    decay: float = 1e-12
    points_per_axis: int = 30
    max_cells: int = 40000

    def __post_init__(self):
        if self.shape not in ("disk", "rectangle"):
            raise DomainError("domain shape must be 'disk' or 'rectangle'")
        if self.radius is not None and not self.radius > 0:
            raise DomainError("domain radius must be positive")
        if self.shape == "rectangle":
            if self.extents is None or len(self.extents) != 2 or min(self.extents) <= 0:
                raise DomainError("rectangle domains need two positive extents")
        if self.points_per_axis < 16:
            raise DomainError("quadrature resolution must be at least 16 points per axis")
        if not 0 < self.rtol < 1 or not 0 < self.decay < 1:
            raise DomainError("rtol and decay must lie in (0, 1)")


@dataclass
class GradientEnergy:
    """Result of :func:`gradient_energy`.

    Attributes
    ----------
    energy : float
        gradient-expansion energy
    error : float
        error estimate of ``energy``: quadrature plus, for automatic disks,
        the neglected tail of the integrand
    pfa_energy : float
        the same quadrature with every gradient coefficient set to zero
    moments : np.ndarray
        unit-alpha moments ``[int U, int U g1^2, int U g2^2, int U g1.g2]``
    moment_errors : np.ndarray
    center : tuple
    radius : float
        disk radius, or half the rectangle diagonal
    truncated : bool
        the disk was cut at a profile patch before the integrand decayed
    max_slope : float
        largest sampled slope where the integrand exceeds 1e-3 of its peak
    n_cells : int
    converged : bool
    """

    energy: float
    error: float
    pfa_energy: float
    moments: np.ndarray
    moment_errors: np.ndarray
    center: tuple
    radius: float
    truncated: bool
    max_slope: float
    n_cells: int
    converged: bool
    coefficients: dict = field(default_factory=dict)

    @property
    def ratio(self):
        """``energy / pfa_energy``."""
        return self.energy / self.pfa_energy


def _separation(H1, H2, x, y):
    return H2.height(x, y) - H1.height(x, y)


def closest_approach(H1, H2):
    """Point of smallest separation, refined from the profile centers.

    Returns
    -------
    (float, float)
    """
    starts = {tuple(H1.center), tuple(H2.center)}
    best = None
    for start in sorted(starts):
        try:
            h0 = float(_separation(H1, H2, *start))
        except GeometryError:
            continue
        scale = max(abs(h0), 1e-300)

        def f(p):
            try:
                return float(_separation(H1, H2, p[0], p[1])) / scale
            except GeometryError:
                return np.inf

        res = minimize(f, np.array(start), method="Nelder-Mead",
                       options={"xatol": 1e-12 * max(1.0, np.hypot(*start)), "fatol": 1e-15,
                                "maxiter": 4000})
        cand = (float(res.x[0]), float(res.x[1]))
        value = f(res.x) * scale
        if best is None or value < best[1]:
            best = (cand, value)
    if best is None:
        raise GeometryError("no profile center lies inside both profiles")
    return best[0]


def _ray_survey(H1, H2, center, r_max, h_peak, n_angles=64, n_radii=3000):
    """Sample the separation and slopes on rays; returns radii, H and max slope arrays."""
    phi = np.linspace(0.0, 2 * np.pi, n_angles, endpoint=False)
    r_lo = 1e-4 * min(h_peak, r_max)
    r_hi = r_max if np.isfinite(r_max) else 1e12 * h_peak
    rho = np.geomspace(r_lo, r_hi, n_radii)
    X = center[0] + np.outer(np.cos(phi), rho)
    Y = center[1] + np.outer(np.sin(phi), rho)
    H = _separation(H1, H2, X, Y)
    g1 = np.hypot(*H1.gradient(X, Y))
    g2 = np.hypot(*H2.gradient(X, Y))
    return rho, H, np.maximum(g1, g2)


def _geometric_breaks(width, radius):
    breaks = [0.0]
    r = 0.25 * width
    while r < radius:
        breaks.append(r)
        r *= 2.0
    breaks.append(radius)
    return np.array(breaks)


def gradient_energy(H1, H2, coeffs, law=None, domain=None):
    """Energy of two profiles in the second-order gradient expansion.

    Parameters
    ----------
    H1, H2 : HeightProfile
        lower and upper surface; ``H2 - H1`` must stay positive
    coeffs : CoefficientSet or str
        coefficient set, or a boundary-condition name passed to
        :func:`coefficient_set`
    law : PlateLaw, optional
        defaults to the law of ``coeffs``
    domain : IntegrationDomain, optional

    Returns
    -------
    GradientEnergy

    Raises
    ------
    GeometryError
        the surfaces touch or cross inside the domain
    DomainError
        the integrand does not decay and no explicit domain was given

    Examples
    --------
    >>> from pfacorr.profiles import Flat
    >>> dom = IntegrationDomain("rectangle", extents=(2.0, 3.0))
    >>> r = gradient_energy(Flat(0.0), Flat(1.0), "D", domain=dom)
    >>> round(r.energy / (6.0 * -np.pi**2 / 1440), 12)
    1.0
    """
    if isinstance(coeffs, str):
        coeffs = coefficient_set(coeffs)
    law = coeffs.law if law is None else law
    domain = IntegrationDomain() if domain is None else domain
    p = law.exponent
    unit = -math.pi ** 2 / 1440.0

    center = closest_approach(H1, H2) if domain.center is None else tuple(map(float, domain.center))
    h_peak = float(_separation(H1, H2, *center))
    if not h_peak > 0:
        raise GeometryError(f"surfaces touch or cross at {center}: separation {h_peak:.6g}")

    patch = min(H1.patch_radius(domain.patch_slope), H2.patch_radius(domain.patch_slope))
    if domain.shape == "disk" and domain.radius is not None:
        patch = min(patch, domain.radius)
    elif domain.shape == "rectangle":
        patch = 0.5 * math.hypot(*domain.extents)
    rho, Hs, slopes = _ray_survey(H1, H2, center, patch, h_peak)
    # width of the peak: first radius where H doubles on any ray
    above = Hs >= 2.0 * h_peak
    width = rho[np.argmax(above.any(axis=0))] if above.any() else rho[-1]

    truncated = False
    auto_sized = domain.shape == "disk" and domain.radius is None
    if auto_sized:
        threshold = h_peak * domain.decay ** (-1.0 / p)
        reached = Hs >= threshold
        if not reached.any(axis=1).all():
            if not np.isfinite(patch):
                raise DomainError(
                    "the integrand does not decay along every direction; give an explicit "
                    "disk radius or a rectangle")
            radius = patch
            truncated = True
        else:
            radius = float(np.max(rho[np.argmax(reached, axis=1)]))
            if radius > patch:
                radius, truncated = patch, True
    elif domain.shape == "disk":
        radius = domain.radius
        truncated = radius > patch
        radius = min(radius, patch) if np.isfinite(patch) else radius
    else:
        radius = patch

    inside = rho <= radius
    if np.any(Hs[:, inside] <= 0):
        i = np.argmax((Hs[:, inside] <= 0).any(axis=0))
        raise GeometryError(f"surfaces touch or cross at distance {rho[i]:.6g} from closest approach")
    # dominant region: U >= 1e-3 peak
    dominant = (Hs <= h_peak * 1e3 ** (1.0 / p)) & inside[None, :]
    max_slope = float(np.max(np.where(dominant, slopes, 0.0)))
    if max_slope > domain.slope_cap:
        warnings.warn(
            f"surface slope {max_slope:.3g} exceeds the cap {domain.slope_cap} where the "
            "energy density is large; the gradient expansion is advisory here",
            ValidityWarning, stacklevel=2)

    def integrand(X, Y):
        H = _separation(H1, H2, X, Y)
        if np.any(H <= 0):
            raise GeometryError("surfaces touch or cross inside the integration domain")
        U = unit / H ** p
        g1x, g1y = H1.gradient(X, Y)
        g2x, g2y = H2.gradient(X, Y)
        return np.stack((U, U * (g1x * g1x + g1y * g1y), U * (g2x * g2x + g2y * g2y),
                         U * (g1x * g2x + g1y * g2y)))

    n_seed = max(1, math.ceil(domain.points_per_axis / 15))
    if domain.shape == "disk":
        breaks = _geometric_breaks(width, radius)
        if len(breaks) - 1 < n_seed:
            breaks = np.linspace(0.0, radius, n_seed + 1)
        res = cubature_polar(integrand, breaks, n_angular=max(8, n_seed), center=center,
                             rtol=domain.rtol, max_cells=domain.max_cells)
    else:
        axes = []
        for c, L in zip(center, domain.extents):
            half = 0.5 * L
            pos = _geometric_breaks(width, half)[1:]
            if len(pos) < n_seed:
                pos = np.linspace(0.0, half, n_seed + 1)[1:]
            axes.append(np.concatenate((c - pos[::-1], [c], c + pos)))
        xb, yb = axes
        cells = np.array([(xb[i], xb[i + 1], yb[j], yb[j + 1])
                          for i in range(len(xb) - 1) for j in range(len(yb) - 1)])
        res = cubature_rectangles(integrand, cells, rtol=domain.rtol, max_cells=domain.max_cells)
    if not res.converged:
        warnings.warn(f"quadrature stopped at {res.n_cells} cells before reaching rtol "
                      f"{domain.rtol:g}", ValidityWarning, stacklevel=2)

    moment_errors = res.error.copy()
    if auto_sized and not truncated:
        # neglected tail beyond H = h_peak decay^(-1/p) for a quadratic peak:
        # fraction decay^((p-1)/p) of int U, about 2 decay^((p-2)/p) of the slope moments
        moment_errors[0] += abs(res.value[0]) * domain.decay ** ((p - 1.0) / p)
        moment_errors[1:] += 2.0 * np.abs(res.value[1:]) * domain.decay ** ((p - 2.0) / p)
    alpha = float(law.alpha)
    b = np.array([1.0, coeffs.beta1, coeffs.beta2, coeffs.beta_cross])
    energy = alpha * math.fsum(b * res.value)
    error = abs(alpha) * float(np.abs(b) @ moment_errors)
    return GradientEnergy(
        energy=energy, error=error, pfa_energy=alpha * res.value[0], moments=res.value,
        moment_errors=moment_errors, center=center, radius=float(radius), truncated=truncated,
        max_slope=max_slope, n_cells=res.n_cells, converged=res.converged,
        coefficients={"alpha": alpha, "beta1": coeffs.beta1, "beta2": coeffs.beta2,
                      "beta_cross": coeffs.beta_cross, "exponent": p})


def _coeffs(bc1, bc2):
    return coefficient_set(bc1) if bc2 is None else coefficient_set(bc1, bc2)


def pfa_energy_paraboloid(d, R1, R2=np.inf, alpha=1, exponent=PLATE_EXPONENT):
    """PFA energy of an osculating paraboloid ``d + x^2/(2 R1) + y^2/(2 R2)`` over a plane.

    ``R2 = inf`` gives the energy per unit length of a cylinder.
    """
    if not (d > 0 and R1 > 0 and R2 > 0):
        raise DomainError("separation and radii must be positive")
    c = -float(alpha) * math.pi ** 2 / 1440.0
    if np.isinf(R2):
        # int dx U(d + x^2/2R) = c sqrt(2R) d^(1/2-p) B(1/2, p - 1/2)
        beta_fn = math.gamma(0.5) * math.gamma(exponent - 0.5) / math.gamma(exponent)
        return c * math.sqrt(2 * R1) * d ** (0.5 - exponent) * beta_fn
    return c * 2 * math.pi * math.sqrt(R1 * R2) * d ** (1 - exponent) / (exponent - 1)


def closed_form_two_spheres(R1, R2, d, bc1="D", bc2=None):
    """Leading correction to PFA for two spheres (``R2 = inf``: sphere and plate).

    Parameters
    ----------
    R1, R2 : float
        radii; ``R2`` may be ``inf``
    d : float
        closest separation
    bc1, bc2 : str
        boundary conditions of sphere 1 and sphere 2

    Returns
    -------
    dict
        ``E``, ``E_PFA`` and ``ratio = E / E_PFA``

    Examples
    --------
    >>> round(closed_form_two_spheres(1.0, np.inf, 0.01, "D")["ratio"], 6)
    1.003333
    """
    if not (R1 > 0 and R2 > 0 and d > 0):
        raise DomainError("radii and separation must be positive")
    cs = _coeffs(bc1, bc2)
    i1, i2 = 1.0 / R1, 1.0 / R2
    reff = 1.0 / (i1 + i2)
    e_pfa = -float(cs.alpha) * math.pi ** 3 * reff / (1440.0 * d * d)
    # 1 - Reff^2 d (1/R1^3 + 1/R2^3) + 2 d Reff (b1/R1^2 + b2/R2^2 - bx/(R1 R2))
    ratio = (1.0 - reff * reff * d * (i1 ** 3 + i2 ** 3)
             + 2.0 * d * reff * (cs.beta1 * i1 * i1 + cs.beta2 * i2 * i2 - cs.beta_cross * i1 * i2))
    return {"E": e_pfa * ratio, "E_PFA": e_pfa, "ratio": ratio}


def closed_form_inclined_cylinders(R1, R2, d, theta, bc="D"):
    """Two cylinders whose axes cross at angle ``theta``, same boundary condition.

    Returns
    -------
    dict
        ``E``, ``leading`` (the PFA term) and ``correction`` (the bracket,
        independent of ``theta``)

    Notes
    -----
    With ``u``, ``v`` the distances from the two axes' projections,
    ``H = d + u^2/2R1 + u^4/8R1^3 + v^2/2R2 + v^4/8R2^3 + ...`` and
    ``dx dy = du dv / sin theta``. The quartic terms give ``-3/8`` and the
    slope terms give ``beta`` per unit of ``d (1/R1 + 1/R2)``::

        leading    = -alpha pi^3 sqrt(R1 R2) / (1440 d^2 sin theta)
        correction = 1 + (beta - 3/8) d (R1 + R2) / (R1 R2)

    The cross term ``grad H1 . grad H2`` is odd in ``u`` and ``v`` and drops out.

    Examples
    --------
    >>> round(closed_form_inclined_cylinders(1.0, 1.0, 0.01, np.pi / 2)["correction"], 7)
    1.0058333
    """
    if not (R1 > 0 and R2 > 0 and d > 0):
        raise DomainError("radii and separation must be positive")
    s = math.sin(theta)
    if not 0 < theta < math.pi or abs(s) < 1e-12:
        raise DomainError("parallel axes (theta = 0 or pi) have no finite energy; "
                          "use gradient_energy with a rectangle domain instead")
    cs = coefficient_set(bc)
    if cs.pair[0] != cs.pair[1]:
        raise DomainError("the crossed-cylinder closed form needs identical boundary conditions")
    alpha = float(cs.alpha)
    leading = -alpha * math.pi ** 3 * math.sqrt(R1 * R2) / (1440.0 * d * d * s)
    correction = 1.0 + (cs.beta1 - 0.375) * d * (1.0 / R1 + 1.0 / R2)
    return {"E": leading * correction, "leading": leading, "correction": correction}


def hyperboloid_correction(lam, bc="D"):
    """Coefficient of ``d / R_c`` in ``E / E_PFA - 1`` for a hyperboloid facing a plate.

    The hyperboloid is ``sqrt(R^2 + lam^2 rho^2) - R`` with apex curvature
    radius ``R_c = R / lam^2``; the coefficient is ``2 beta + 1 / lam^2``.

    Examples
    --------
    >>> round(hyperboloid_correction(1.0, "EM"), 6)
    0.306906
    """
    if not lam > 0:
        raise DomainError("lambda must be positive")
    return 2.0 * beta_coefficient(bc) + 1.0 / lam ** 2


def hyperboloid_zero(bc="EM"):
    """Opening ``lam`` at which :func:`hyperboloid_correction` vanishes, ``1 / sqrt(-2 beta)``."""
    beta = beta_coefficient(bc)
    if beta >= 0:
        raise DomainError(f"beta_{bc} = {beta:.6g} is not negative; the correction has no zero")
    return 1.0 / math.sqrt(-2.0 * beta)


@dataclass
class ScalingFit:
    """Power-law fit ``|E / E_PFA - 1| = amplitude (d / scale)^exponent``."""

    exponent: float
    stderr: float
    amplitude: float
    sign: int
    d_values: np.ndarray
    corrections: np.ndarray
    errors: np.ndarray


@dataclass
class LinearFit:
    """Fit ``y = slope x + curvature x^2`` (plus an optional ``x^2 ln x`` term)."""

    slope: float
    slope_stderr: float
    curvature: float
    residual: float


def pfa_scaling_exponent(make_pair, bc, d_values, radii, domain=None, noise_factor=10.0):
    """Leading power of the PFA correction along a separation sweep.

    Parameters
    ----------
    make_pair : callable
        ``make_pair(d) -> (H1, H2)`` with closest separation ``d``
    bc : str or CoefficientSet
    d_values : array_like
        at least four separations spanning 1.5 decades
    radii : (float, float)
        principal curvature radii at closest approach; ``E_PFA`` is the
        energy of the osculating paraboloid
    domain : IntegrationDomain, optional
        defaults to an automatic disk cut where the integrand falls to 1e-21
        of its peak, so the cutoff stays far below corrections of order 1e-6
    noise_factor : float
        each correction must exceed this multiple of its quadrature error

    Returns
    -------
    ScalingFit

    Raises
    ------
    FitError
        corrections change sign, are not monotone in ``d``, or drown in
        quadrature error
    """
    d = np.sort(np.asarray(d_values, float))
    if len(d) < 4 or np.log10(d[-1] / d[0]) < 1.5 - 1e-9:
        raise DomainError("the sweep needs at least four points over 1.5 decades")
    cs = coefficient_set(bc) if isinstance(bc, str) else bc
    domain = IntegrationDomain(decay=1e-21, rtol=1e-10) if domain is None else domain
    y = np.empty_like(d)
    err = np.empty_like(d)
    for i, di in enumerate(d):
        H1, H2 = make_pair(di)
        res = gradient_energy(H1, H2, cs, domain=domain)
        e_pfa = pfa_energy_paraboloid(di, radii[0], radii[1], cs.alpha, cs.exponent)
        y[i] = res.energy / e_pfa - 1.0
        err[i] = res.error / abs(e_pfa)
    sign = np.sign(y)
    if np.any(sign == 0) or np.any(sign != sign[0]):
        raise FitError("the PFA correction changes sign along the sweep")
    if np.any(np.abs(y) < noise_factor * err):
        raise FitError("the PFA correction is not resolved above the quadrature error")
    a = np.abs(y)
    if np.any(np.diff(a) <= 0):
        raise FitError("the PFA correction is not monotone in the separation")
    A = np.column_stack((np.ones_like(d), np.log(d)))
    coef, res, _, _ = np.linalg.lstsq(A, np.log(a), rcond=None)
    dof = max(len(d) - 2, 1)
    s2 = float(np.sum((A @ coef - np.log(a)) ** 2)) / dof
    cov = s2 * np.linalg.inv(A.T @ A)
    return ScalingFit(exponent=float(coef[1]), stderr=float(math.sqrt(cov[1, 1])),
                      amplitude=float(math.exp(coef[0])), sign=int(sign[0]),
                      d_values=d, corrections=y, errors=err)


def fit_linear_correction(x, y, sigma=None, log_term=True):
    """Least-squares fit of ``y = slope x + curvature x^2 [+ c x^2 ln x]``.

    For a sphere the gradient term grows logarithmically toward the rim, so
    the next order after ``x`` carries ``x^2 ln x``; leaving it out biases
    the slope by a few percent at ``x = 1e-2``. With as many points as basis
    functions the fit interpolates and ``slope_stderr`` is NaN.

    Returns
    -------
    LinearFit
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    cols = [x, x * x] + ([x * x * np.log(x)] if log_term else [])
    if len(x) < len(cols):
        raise FitError(f"need at least {len(cols)} points")
    w = np.ones_like(x) if sigma is None else 1.0 / np.asarray(sigma, float)
    A = np.column_stack(cols) * w[:, None]
    coef, _, rank, _ = np.linalg.lstsq(A, y * w, rcond=None)
    if rank < len(cols):
        raise FitError("degenerate sweep")
    r = A @ coef - y * w
    dof = len(x) - len(cols)
    # an exactly determined fit interpolates and has no error estimate
    stderr = math.sqrt(float(r @ r) / dof * np.linalg.inv(A.T @ A)[0, 0]) if dof else math.nan
    return LinearFit(slope=float(coef[0]), slope_stderr=stderr,
                     curvature=float(coef[1]), residual=float(np.sqrt(np.mean(r * r))))
