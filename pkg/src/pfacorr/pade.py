"""Constrained Padé resummation of the sphere-plate force.

The rescaled force ``f = R^2 F`` (``hbar = c = 1``) is known as a power
series in ``r = R/d`` at large separation,

    f ~ sum_{j=1..n} f_j r^(j0 + j),

and, at short separation, through its two leading terms
``c3 r^3 + c2 r^2`` fixed by the gradient expansion. The rational function

    f_[M/M-3](r) = (p_0 + ... + p_M r^M) / (1 + q_1 r + ... + q_{M-3} r^(M-3))

with ``M = (j0 + n + 5) / 2`` is the unique one that matches both. Its
large-``r`` expansion continues as ``c1 r + ...``, which integrates to a
``(d/R)^2 log(d/R)`` term of the energy.

Conventions: ``F = -dE/dd`` (negative when attractive) and

    E R = int_0^r f(rho) / rho^2 drho,      E_PFA R = -alpha pi^3 r^2 / 1440.
"""
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np
from scipy import integrate

from .errors import (ConstructionError, DomainError, FitError, PoleError,
                     ValidityWarning)

__all__ = [
    "AsymptoticSeries",
    "PadeApproximant",
    "EnergyCurve",
    "ThetaFit",
    "large_r_targets",
    "build_pade",
    "build_energy_pade",
    "eval_force",
    "eval_energy_pade",
    "energy_curve",
    "extract_thetas",
    "pole_check",
    "classify_poles",
    "deflate_doublets",
    "fit_theta1",
    "load_series",
    "solve_full_pivot",
]

_FIXTURES = {"D": "ae_D.json", "N": "ae_N.json", "EM": "ae_EM.json"}


# -- data types ---------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticSeries:
    """Large-distance force series ``f ~ sum_j f_j r^(j0 + j)``.

    Attributes
    ----------
    bc : str
    j0 : int
        leading-power offset (2 for D, 4 for N and EM)
    coefficients : tuple of float
        ``f_1 .. f_n``
    source : str
    exact : tuple of str or None
        exact values of ``pi f_j`` as rational strings, when known
    """

    bc: str
    j0: int
    coefficients: tuple
    source: str = ""
    exact: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if self.exact is not None:
            object.__setattr__(self, "exact", tuple(str(c) for c in self.exact))
        if self.n < 1:
            raise DomainError("an asymptotic series needs at least one coefficient")
        if not all(math.isfinite(c) for c in self.coefficients):
            raise DomainError("asymptotic series coefficients must be finite")

    @property
    def n(self):
        return len(self.coefficients)

    def truncated(self, n):
        """The first ``n`` terms."""
        if not 1 <= n <= self.n:
            raise DomainError(f"cannot truncate a {self.n}-term series to {n} terms")
        exact = None if self.exact is None else self.exact[:n]
        return AsymptoticSeries(self.bc, self.j0, self.coefficients[:n], self.source, exact)

    def polynomial(self):
        """Ascending coefficients of ``T(r)`` through ``r^(j0 + n)``."""
        out = np.zeros(self.j0 + self.n + 1)
        out[self.j0 + 1:] = self.coefficients
        return out

    def to_dict(self):
        out = {"bc": self.bc, "j0": self.j0, "coefficients": list(self.coefficients),
               "source": self.source}
        if self.exact is not None:
            out["exact_pi_times"] = list(self.exact)
        return out

    @classmethod
    def from_dict(cls, data):
        try:
            bc, j0, coefficients = data["bc"], int(data["j0"]), data["coefficients"]
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(
                "series fixture must be a JSON object with keys 'bc', 'j0', "
                "'coefficients' (list of f_1..f_n) and 'source'") from exc
        exact = data.get("exact_pi_times")
        if exact is not None:
            # the exact strings are authoritative when present
            coefficients = [float(Fraction(c)) / math.pi for c in exact]
        return cls(str(bc), j0, coefficients, str(data.get("source", "")), exact)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def load_series(bc, n=None):
    """Load the packaged force series for ``bc`` (``"D"``, ``"N"`` or ``"EM"``).

    Parameters
    ----------
    bc : str
    n : int, optional
        keep only the first ``n`` terms

    Raises
    ------
    DomainError
        no fixture is shipped for ``bc``
    """
    key = str(bc).upper()
    name = _FIXTURES.get(key)
    if name is None or not resources.files("pfacorr").joinpath("data", name).is_file():
        raise DomainError(
            f"no asymptotic-series fixture for bc={bc!r}; supply a JSON file "
            "{\"bc\", \"j0\", \"coefficients\": [f_1, ...], \"source\"}")
    with resources.files("pfacorr").joinpath("data", name).open() as fh:
        series = AsymptoticSeries.from_dict(json.load(fh))
    return series if n is None else series.truncated(n)


@dataclass(frozen=True)
class PadeApproximant:
    """Rational function ``P(r) / Q(r)`` with ``deg Q = deg P - 3``.

    Attributes
    ----------
    p : np.ndarray
        ``p_0 .. p_M``
    q : np.ndarray
        ``q_1 .. q_{M-3}`` (``q_0 = 1`` implied)
    j0, n : int
        series data it was built from
    c3, c2 : float
        imposed large-``r`` coefficients
    condition : float
        2-norm condition number of the (column-equilibrated) linear system
    residual : float
        relative residual of the solved system
    cancelled : tuple of float
        positive roots removed as pole-zero doublets (empty for a fresh build)
    """

    p: np.ndarray
    q: np.ndarray
    j0: int = 0
    n: int = 0
    c3: float = float("nan")
    c2: float = float("nan")
    condition: float = float("nan")
    residual: float = float("nan")
    bc: str = ""
    cancelled: tuple = field(default_factory=tuple)

    @property
    def M(self):
        return len(self.p) - 1

    @property
    def denominator(self):
        """Ascending denominator coefficients including ``q_0 = 1``."""
        return np.concatenate(([1.0], self.q))

    def taylor(self, order):
        """Small-``r`` Taylor coefficients of ``P/Q`` through ``r^order``."""
        Q = self.denominator
        out = np.zeros(order + 1)
        for k in range(order + 1):
            acc = self.p[k] if k <= self.M else 0.0
            for i in range(1, min(k, len(Q) - 1) + 1):
                acc -= Q[i] * out[k - i]
            out[k] = acc
        return out

    def large_r(self, order=4):
        """Coefficients ``c3, c2, c1, c0, ...`` of the large-``r`` expansion."""
        # P/Q in u = 1/r: r^3 * Pt(u)/Qt(u), Pt, Qt the reversed polynomials
        Pt = self.p[::-1]
        Qt = self.denominator[::-1]
        out = np.zeros(order)
        for k in range(order):
            acc = Pt[k] if k < len(Pt) else 0.0
            for i in range(1, min(k, len(Qt) - 1) + 1):
                acc -= Qt[i] * out[k - i]
            out[k] = acc / Qt[0]
        return out


@dataclass(frozen=True)
class EnergyCurve:
    """Samples of ``E/E_PFA`` against ``d/R``.

    Attributes
    ----------
    d_over_R, ratio : np.ndarray
    provenance : str
        ``"oracle"``, ``"pade"``, ``"gradient"`` or ``"fixture"``
    error : np.ndarray or None
        per-point uncertainty of ``ratio``
    """

    d_over_R: np.ndarray
    ratio: np.ndarray
    provenance: str = "pade"
    error: np.ndarray = None

    def __post_init__(self):
        x = np.asarray(self.d_over_R, dtype=float)
        y = np.asarray(self.ratio, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise DomainError("d_over_R and ratio must be 1-d arrays of equal length")
        if np.any(np.diff(x) <= 0):
            raise DomainError("d_over_R must be strictly increasing")
        if not np.all(np.isfinite(y)):
            raise DomainError("E/E_PFA must be finite")
        object.__setattr__(self, "d_over_R", x)
        object.__setattr__(self, "ratio", y)
        if self.error is not None:
            object.__setattr__(self, "error", np.asarray(self.error, dtype=float))

    def __len__(self):
        return len(self.d_over_R)


@dataclass(frozen=True)
class ThetaFit:
    theta1: float
    theta2: float
    residual: float
    theta1_stderr: float
    theta2_stderr: float
    n_points: int


# -- linear algebra -------------------------------------------------------------

def solve_full_pivot(A, b, refine=3):
    """Gaussian elimination with complete pivoting plus iterative refinement.

    Residuals for the refinement steps are accumulated in extended precision.

    Returns
    -------
    x : np.ndarray
    relative_residual : float
        ``|A x - b| / (|A| |x| + |b|)`` in the infinity norm
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ConstructionError("linear system is not square")
    LU = A.copy()
    row_perm = np.arange(n)
    col_perm = np.arange(n)
    for k in range(n):
        sub = np.abs(LU[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] == 0.0:
            raise ConstructionError(f"singular Padé system (rank {k} of {n})")
        i += k
        j += k
        LU[[k, i]] = LU[[i, k]]
        row_perm[[k, i]] = row_perm[[i, k]]
        LU[:, [k, j]] = LU[:, [j, k]]
        col_perm[[k, j]] = col_perm[[j, k]]
        LU[k + 1:, k] /= LU[k, k]
        LU[k + 1:, k + 1:] -= np.outer(LU[k + 1:, k], LU[k, k + 1:])

    def lu_solve(rhs):
        y = rhs[row_perm].copy()
        for k in range(n):
            y[k + 1:] -= LU[k + 1:, k] * y[k]
        for k in range(n - 1, -1, -1):
            y[k] = (y[k] - LU[k, k + 1:] @ y[k + 1:]) / LU[k, k]
        x = np.empty(n)
        x[col_perm] = y
        return x

    x = lu_solve(b)
    A_ext = A.astype(np.longdouble)
    b_ext = b.astype(np.longdouble)
    for _ in range(refine):
        r = b_ext - A_ext @ x.astype(np.longdouble)
        x = x + lu_solve(np.asarray(r, dtype=float))
    r = np.asarray(b_ext - A_ext @ x.astype(np.longdouble), dtype=float)
    scale = np.max(np.abs(A)) * np.max(np.abs(x)) * n + np.max(np.abs(b))
    return x, float(np.max(np.abs(r)) / scale) if scale > 0 else 0.0


# -- construction ---------------------------------------------------------------

def large_r_targets(alpha, beta):
    """``(c3, c2)`` of ``f ~ c3 r^3 + c2 r^2`` from the sphere-plate gradient expansion.

    With ``E R = -alpha pi^3 r^2 / 1440 * (1 + (2 beta - 1) / r)`` and
    ``f = r^2 d(E R)/dr``.
    """
    alpha = float(alpha)
    beta = float(beta)
    c3 = -alpha * math.pi ** 3 / 720.0
    c2 = -alpha * math.pi ** 3 * (2.0 * beta - 1.0) / 1440.0
    return c3, c2


def _rational_system(T, n_small, M, N, large):
    """Rows of ``P - T Q`` (orders ``0..n_small-1``) and large-``r`` rows.

    ``large`` is a list of ``(power, targets)`` pairs requiring the
    coefficient of ``r^power`` in ``P - S Q`` to vanish, ``S`` the large-``r``
    polynomial with ascending coefficients ``targets``.
    """
    size = M + 1 + N
    rows, rhs = [], []
    for k in range(n_small):
        row = np.zeros(size)
        if k <= M:
            row[k] = 1.0
        for i in range(1, N + 1):
            if 0 <= k - i < len(T):
                row[M + i] -= T[k - i]
        rows.append(row)
        rhs.append(T[k] if k < len(T) else 0.0)
    for power, S in large:
        row = np.zeros(size)
        row[power] = 1.0
        rhs_val = 0.0
        for s, c in enumerate(S):
            i = power - s
            if c == 0.0 or i < 0 or i > N:
                continue
            if i == 0:
                rhs_val += c
            else:
                row[M + i] -= c
        rows.append(row)
        rhs.append(rhs_val)
    return np.array(rows), np.array(rhs)


def _solve_system(A, b):
    rows = np.max(np.abs(A), axis=1)
    rows[rows == 0] = 1.0
    A = A / rows[:, None]
    b = b / rows
    scale = np.max(np.abs(A), axis=0)
    scale[scale == 0] = 1.0
    As = A / scale
    try:
        cond = float(np.linalg.cond(As))
    except np.linalg.LinAlgError:
        cond = float("inf")
    if not np.isfinite(cond) or cond > 1e14:
        raise ConstructionError(f"Padé system is singular or ill-conditioned (cond = {cond:.3e})")
    y, res = solve_full_pivot(As, b)
    if res > 1e-10:
        raise ConstructionError(
            f"Padé system residual {res:.2e} exceeds 1e-10 (cond = {cond:.3e})")
    return y / scale, cond, res


def build_pade(ae, alpha, beta):
    """Build ``f_[M/M-3]`` matching the series at small ``r`` and ``c3 r^3 + c2 r^2`` at large ``r``.

    Parameters
    ----------
    ae : AsymptoticSeries
    alpha : float
        plate-law prefactor
    beta : float
        gradient coefficient of the curved surface

    Returns
    -------
    PadeApproximant

    Raises
    ------
    DomainError
        ``j0 + n + 5`` is odd
    ConstructionError
        singular or ill-conditioned system
    """
    if (ae.j0 + ae.n + 5) % 2:
        raise DomainError(
            f"j0 + n + 5 must be even for an integer numerator degree (j0={ae.j0}, n={ae.n})")
    M = (ae.j0 + ae.n + 5) // 2
    N = M - 3
    if N < 1:
        raise DomainError("series too short for a constrained approximant")
    c3, c2 = large_r_targets(alpha, beta)
    T = ae.polynomial()
    S = np.zeros(4)
    S[3], S[2] = c3, c2
    A, b = _rational_system(T, ae.j0 + ae.n + 1, M, N, [(M, S), (M - 1, S)])
    x, cond, res = _solve_system(A, b)
    return PadeApproximant(p=x[:M + 1], q=x[M + 1:], j0=ae.j0, n=ae.n, c3=c3, c2=c2,
                           condition=cond, residual=res, bc=ae.bc)


def build_energy_pade(ae, alpha, beta):
    """Padé approximant of the energy ``E R`` itself, for comparison only.

    ``[K/K-2]`` with ``K = (j0 + n + 3) / 2`` matches the series of ``E R``
    through ``r^(j0 + n - 1)`` and its large-``r`` terms ``-alpha pi^3 r^2 / 1440``
    and ``c2 r``. A rational function has no logarithm, so the
    ``(d/R)^2 log(d/R)`` term cannot be represented.

    Returns
    -------
    PadeApproximant
        numerator and denominator of ``E R`` (``deg Q = deg P - 2``)
    """
    if (ae.j0 + ae.n + 3) % 2:
        raise DomainError("j0 + n + 3 must be even for the energy approximant")
    K = (ae.j0 + ae.n + 3) // 2
    N = K - 2
    c3, c2 = large_r_targets(alpha, beta)
    T = np.zeros(ae.j0 + ae.n)
    for j, fj in enumerate(ae.coefficients, 1):
        T[ae.j0 + j - 1] = fj / (ae.j0 + j - 1)
    S = np.zeros(3)
    S[2], S[1] = c3 / 2.0, c2
    A, b = _rational_system(T, ae.j0 + ae.n, K, N, [(K, S), (K - 1, S)])
    x, cond, res = _solve_system(A, b)
    return PadeApproximant(p=x[:K + 1], q=x[K + 1:], j0=ae.j0, n=ae.n, c3=c3, c2=c2,
                           condition=cond, residual=res, bc=ae.bc)


# -- poles --------------------------------------------------------------------

def _denominator_coeffs(pade):
    if isinstance(pade, PadeApproximant):
        return pade.denominator
    return np.asarray(pade, dtype=float)


def _positive_real_roots(coeffs, r_max, imag_tol=1e-9):
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if len(c) < 2:
        return []
    roots = np.roots(c[::-1])
    out = [float(z.real) for z in roots
           if abs(z.imag) <= imag_tol * max(1.0, abs(z)) and 0.0 < z.real <= r_max]
    return sorted(out)


def pole_check(pade, r_max):
    """Positive real roots of the denominator in ``(0, r_max]``.

    Parameters
    ----------
    pade : PadeApproximant or array_like
        an approximant, or ascending denominator coefficients ``q_0, q_1, ...``
    r_max : float

    Returns
    -------
    list of float
        empty when the approximant is pole free on the range
    """
    return _positive_real_roots(_denominator_coeffs(pade), r_max)


def classify_poles(pade, r_max, tol=1e-6):
    """Describe each positive pole: its residue and nearest numerator zero.

    A pole is flagged ``doublet`` when a numerator root lies within
    ``tol * r0`` of it and its residue is below ``tol`` times the size of
    the approximant's leading small-``r`` term at ``r0``.

    Returns
    -------
    list of dict
        keys ``root``, ``residue``, ``relative_residue``, ``zero_distance``, ``doublet``
    """
    poles = pole_check(pade, r_max)
    if not poles:
        return []
    P = np.polynomial.Polynomial(pade.p)
    Q = np.polynomial.Polynomial(pade.denominator)
    zeros = np.roots(pade.p[::-1]) if np.any(pade.p) else np.array([])
    out = []
    for r0 in poles:
        residue = float(P(r0) / Q.deriv()(r0))
        lead_power = pade.j0 + 1
        lead = pade.taylor(lead_power)[lead_power]
        scale = abs(lead) * r0 ** lead_power if lead else abs(pade.c3) * r0 ** 3
        rel = abs(residue) / (scale * r0) if scale else float("inf")
        dist = float(np.min(np.abs(zeros - r0))) if zeros.size else float("inf")
        out.append({"root": r0, "residue": residue, "relative_residue": rel,
                    "zero_distance": dist, "doublet": dist <= tol * r0 and rel <= tol})
    return out


def deflate_doublets(pade, r_max, tol=1e-6):
    """Cancel pole-zero doublets on ``(0, r_max]``; genuine poles raise :class:`PoleError`.

    Each doublet at ``r0`` is removed by dividing numerator and denominator
    by ``(1 - r/r0)``; the degree difference of 3 is preserved.
    """
    info = classify_poles(pade, r_max, tol)
    genuine = [d["root"] for d in info if not d["doublet"]]
    if genuine:
        raise PoleError(f"approximant has poles at r = {genuine} inside (0, {r_max:g}]")
    if not info:
        return pade
    p = np.polynomial.Polynomial(pade.p)
    q = np.polynomial.Polynomial(pade.denominator)
    for d in info:
        factor = np.polynomial.Polynomial([1.0, -1.0 / d["root"]])
        p = p // factor
        q = q // factor
        warnings.warn(
            f"cancelled pole-zero doublet at r = {d['root']:.10g} "
            f"(relative residue {d['relative_residue']:.1e})", ValidityWarning, stacklevel=3)
    qc = q.coef / q.coef[0]
    pc = p.coef / q.coef[0]
    # the factor is nonzero at r = 0, so the zero of order j0 + 1 survives
    # exactly; division from the top leaves roundoff there that would swamp
    # the small-r behaviour
    n_zero = np.count_nonzero(np.cumsum(np.abs(pade.p)) == 0)
    pc[:n_zero] = 0.0
    return PadeApproximant(p=pc, q=qc[1:], j0=pade.j0, n=pade.n, c3=pade.c3, c2=pade.c2,
                           condition=pade.condition, residual=pade.residual, bc=pade.bc,
                           cancelled=pade.cancelled + tuple(d["root"] for d in info))


# -- evaluation -----------------------------------------------------------------

def _rational_eval(p, q, r, tail_power):
    """``P(r)/Q(r)`` by Horner in ``r`` for ``r <= 1`` and in ``1/r`` above."""
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    small = r <= 1.0
    if np.any(small):
        rs = r[small]
        out[small] = np.polynomial.polynomial.polyval(rs, p) / np.polynomial.polynomial.polyval(rs, q)
    if np.any(~small):
        u = 1.0 / r[~small]
        num = np.polynomial.polynomial.polyval(u, p[::-1])
        den = np.polynomial.polynomial.polyval(u, q[::-1])
        out[~small] = r[~small] ** tail_power * num / den
    return out


def eval_force(pade, r):
    """Rescaled force ``f = R^2 F`` of the approximant at ``r = R/d``.

    Raises
    ------
    DomainError
        ``r <= 0``
    PoleError
        ``r`` within ``1e-6`` (relative) of a positive denominator root
    """
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(~(r_arr > 0)):
        raise DomainError("r must be positive")
    for r0 in pole_check(pade, float(np.max(r_arr)) * (1 + 1e-6)):
        if np.any(np.abs(r_arr - r0) <= 1e-6 * max(1.0, r0)):
            raise PoleError(f"r is within 1e-6 of a pole of the approximant at {r0:.10g}")
    tail = len(pade.p) - len(pade.denominator)
    out = _rational_eval(pade.p, pade.denominator, r_arr, tail)
    return float(out[0]) if np.ndim(r) == 0 else out


def eval_energy_pade(epade, r):
    """``E R`` of an energy approximant from :func:`build_energy_pade`."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    tail = len(epade.p) - len(epade.denominator)
    out = _rational_eval(epade.p, epade.denominator, r_arr, tail)
    return float(out[0]) if np.ndim(r) == 0 else out


def energy_curve(pade, alpha, r_grid, cancel_doublets=True):
    """``E/E_PFA`` of the force approximant on a grid of ``r = R/d``.

    ``E R = int_0^r f(rho) / rho^2 drho`` is integrated piecewise between
    sorted grid points with adaptive Gauss-Kronrod and accumulated in a
    fixed order.

    Parameters
    ----------
    pade : PadeApproximant
    alpha : float
    r_grid : array_like
        positive values of ``R/d``
    cancel_doublets : bool
        remove numerically cancelled pole-zero pairs first (with a
        :class:`ValidityWarning`); genuine poles always raise

    Returns
    -------
    EnergyCurve
        sorted by increasing ``d/R``
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(~(r_grid > 0)):
        raise DomainError("r grid must be positive")
    r_max = float(np.max(r_grid))
    if cancel_doublets:
        pade = deflate_doublets(pade, r_max)
    else:
        poles = pole_check(pade, r_max)
        if poles:
            raise PoleError(f"approximant has poles at r = {poles} inside (0, {r_max:g}]")
    tail = len(pade.p) - len(pade.denominator)

    def integrand(rho):
        return _rational_eval(pade.p, pade.denominator, np.array([rho]), tail)[0] / rho ** 2

    order = np.argsort(r_grid)
    rs = r_grid[order]
    ER = np.empty_like(rs)
    acc = 0.0
    lo = 0.0
    for i, hi in enumerate(rs):
        # absolute floor near roundoff of the segment's size, so tiny segments converge
        floor = 1e-15 * abs(integrand(hi)) * (hi - lo)
        val, _ = integrate.quad(integrand, lo, hi, epsabs=floor, epsrel=1e-12, limit=400)
        acc += val
        ER[i] = acc
        lo = hi
    ratio = ER / (-float(alpha) * math.pi ** 3 * rs ** 2 / 1440.0)
    x = 1.0 / rs
    return EnergyCurve(x[::-1], ratio[::-1], provenance="pade")


def extract_thetas(pade, alpha):
    """``theta1, theta2`` of ``E/E_PFA = 1 + theta1 x + theta2 x^2 log x`` (``x = d/R``).

    From the large-``r`` expansion ``f = c3 r^3 + c2 r^2 + c1 r + ...`` of the
    approximant: ``theta1 = -1440 c2 / (alpha pi^3)``, ``theta2 = 1440 c1 / (alpha pi^3)``.

    Returns
    -------
    dict
        ``theta1``, ``theta2``, ``c3``, ``c2``, ``c1``
    """
    c3, c2, c1 = pade.large_r(3)
    norm = float(alpha) * math.pi ** 3
    return {"theta1": -1440.0 * c2 / norm, "theta2": 1440.0 * c1 / norm,
            "c3": c3, "c2": c2, "c1": c1}


def fit_theta1(curve, fit_range=(0.1, 0.5)):
    """Least-squares fit of ``E/E_PFA - 1 = theta1 x + theta2 x^2 log x``.

    Parameters
    ----------
    curve : EnergyCurve
    fit_range : (float, float)
        inclusive range of ``x = d/R``

    Returns
    -------
    ThetaFit

    Raises
    ------
    FitError
        fewer than 6 samples, or a rank-deficient design
    """
    lo, hi = fit_range
    sel = (curve.d_over_R >= lo) & (curve.d_over_R <= hi)
    x = curve.d_over_R[sel]
    y = curve.ratio[sel] - 1.0
    if x.size < 6:
        raise FitError(f"fit needs at least 6 samples in [{lo}, {hi}], got {x.size}")
    X = np.column_stack([x, x * x * np.log(x)])
    sv = np.linalg.svd(X, compute_uv=False)
    if sv[-1] <= 1e-10 * sv[0]:
        raise FitError("design matrix is rank deficient; widen the fit range")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    rms = float(np.sqrt(np.mean(resid ** 2)))
    dof = max(x.size - 2, 1)
    cov = np.linalg.inv(X.T @ X) * float(resid @ resid) / dof
    err = np.sqrt(np.diag(cov))
    return ThetaFit(float(coef[0]), float(coef[1]), rms, float(err[0]), float(err[1]), int(x.size))
