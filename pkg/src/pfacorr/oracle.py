"""Dirichlet sphere-plate Casimir energy from the multipole scattering determinant.

The round-trip operator is expressed in the spherical-multipole basis of the
sphere. It is block diagonal in the azimuthal index ``m``; within a block it
is, up to a diagonal similarity transform,

    M_{l l'} = |T_l(kappa R)|^(1/2) I_{l l'}(2 kappa L) |T_l'(kappa R)|^(1/2)

with the Dirichlet sphere amplitude ``|T_l| = i_l / k_l`` and the mirror
translation integral

    I_{l l'}(Z) = int_1^inf dt exp(-Z t) F_lm(t) F_l'm(t)

obtained by expanding the outgoing spherical wave into evanescent plane
waves, reflecting them off the Dirichlet plate (amplitude -1) and
re-expanding into regular spherical waves. ``L = R + d`` is the distance
from the sphere centre to the plate. The integrand of ``I`` is ``exp(-Z t)``
times a polynomial of degree ``l + l'`` in ``t``, so Gauss-Laguerre with
``lmax + 1`` nodes is exact. All factors are positive, which lets the
matrix be assembled from log magnitudes without cancellation.
"""
import logging
from dataclasses import dataclass, replace
from math import pi

import numpy as np
from scipy.linalg import LinAlgError, cholesky

from .errors import DomainError, NumericalError, TruncationError
from .specfun import log_dirichlet_amplitude, log_legendre_scaled

logger = logging.getLogger(__name__)

#: smallest d/R the oracle accepts
MIN_SEPARATION_RATIO = 0.02

__all__ = [
    "OracleConfig",
    "MIN_SEPARATION_RATIO",
    "round_trip_blocks",
    "logdet_round_trip",
    "oracle_energy_D",
    "oracle_curve",
    "ae_extract",
    "AEEstimate",
    "default_ell_max",
    "pfa_energy_sphere_plate",
]


def default_ell_max(d_over_R):
    """Multipole truncation with a relative truncation error near 1e-7.

    The error decays per multipole order roughly like ``exp(-1.3 (d/R)^0.86)``
    (measured between ``d/R = 0.05`` and ``1``).
    """
    rate = 1.3 * d_over_R ** 0.86
    return int(max(16, np.ceil(14.0 / rate) + 10))


@dataclass(frozen=True)
class OracleConfig:
    """Truncation and quadrature settings of one oracle evaluation.

    Attributes
    ----------
    R, d : float
        sphere radius and surface-to-plate separation
    ell_max : int or None
        multipole truncation order (``>= 10``); ``None`` selects
        :func:`default_ell_max`
    n_kappa : int
        Gauss-Legendre nodes of the mapped imaginary-frequency integral (``>= 40``)
    kappa_scale : float or None
        scale of the map ``kappa = scale t / (1 - t)``; ``None`` selects
        ``1 / (R + d)``
    """

    R: float
    d: float
    ell_max: int = None
    n_kappa: int = 120
    kappa_scale: float = None

    def __post_init__(self):
        if not (self.R > 0 and self.d > 0):
            raise DomainError(f"R and d must be positive, got R={self.R}, d={self.d}")
        if self.ell_max is not None and self.ell_max < 10:
            raise DomainError(f"ell_max must be >= 10, got {self.ell_max}")
        if self.n_kappa < 40:
            raise DomainError(f"n_kappa must be >= 40, got {self.n_kappa}")

    @property
    def ell(self):
        """Effective multipole truncation."""
        return self.ell_max if self.ell_max is not None else default_ell_max(self.d / self.R)

    @property
    def scale(self):
        return self.kappa_scale if self.kappa_scale is not None else 1.0 / (self.R + self.d)


def round_trip_blocks(kappa, R, L, ell_max, n_laguerre=None):
    """Symmetrized round-trip matrices for ``m = 0..ell_max`` at one frequency.

    Parameters
    ----------
    kappa : float
        imaginary frequency (inverse length)
    R : float
        sphere radius
    L : float
        centre-to-plate distance, ``L > R``
    ell_max : int
        multipole truncation
    n_laguerre : int, optional
        Gauss-Laguerre order, default ``ell_max + 2``

    Returns
    -------
    list of np.ndarray
        block ``m`` has shape ``(ell_max - m + 1, ell_max - m + 1)`` and rows
        indexed by ``l = m..ell_max``
    """
    if n_laguerre is None:
        n_laguerre = ell_max + 2
    u, w = np.polynomial.laguerre.laggauss(n_laguerre)
    x = kappa * R
    Z = 2.0 * kappa * L
    t = 1.0 + u / Z
    log_t = np.log(t)
    log_T = log_dirichlet_amplitude(ell_max, np.array([x]))[0]
    log_F = log_legendre_scaled(ell_max, t)
    ell = np.arange(ell_max + 1)
    node = 0.5 * (np.log(w) - Z - np.log(Z))
    log_A = log_F + np.outer(ell, log_t)[None, :, :] + (0.5 * log_T)[None, :, None] + node[None, None, :]
    blocks = []
    for m in range(ell_max + 1):
        A = np.exp(log_A[m, m:, :])
        blocks.append(A @ A.T)
    return blocks


def logdet_round_trip(kappa, R, L, ell_max, n_laguerre=None):
    """``sum_m log det(1 - M_m)`` over all azimuthal blocks (``m`` and ``-m``)."""
    total = 0.0
    for m, block in enumerate(round_trip_blocks(kappa, R, L, ell_max, n_laguerre)):
        try:
            chol = cholesky(np.eye(block.shape[0]) - block, lower=True)
        except LinAlgError as exc:
            raise TruncationError(
                f"round-trip determinant not positive at kappa={kappa:.6g}, m={m}; "
                f"increase ell_max (currently {ell_max})") from exc
        term = 2.0 * np.sum(np.log(np.diag(chol)))
        total += term if m == 0 else 2.0 * term
    return total


def oracle_energy_D(config):
    """Dirichlet sphere-plate Casimir energy in units of hbar c / length.

    Parameters
    ----------
    config : OracleConfig

    Returns
    -------
    float
        ``E = (1/2pi) int_0^inf dkappa log det(1 - M(kappa))``, negative
    """
    R, d = config.R, config.d
    if d / R < MIN_SEPARATION_RATIO:
        raise DomainError(
            f"d/R = {d / R:.4g} is below the oracle limit {MIN_SEPARATION_RATIO}")
    L = R + d
    s = config.scale
    nodes, weights = np.polynomial.legendre.leggauss(config.n_kappa)
    t = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    kappa = s * t / (1.0 - t)
    jac = s / (1.0 - t) ** 2
    terms = np.zeros_like(kappa)
    for i, k in enumerate(kappa):
        # integrand is O(exp(-2 kappa d)); beyond this it is below double precision
        if 2.0 * k * d > 80.0:
            continue
        terms[i] = weights[i] * jac[i] * logdet_round_trip(k, R, L, config.ell)
    energy = float(np.sum(terms)) / (2.0 * np.pi)
    if not np.isfinite(energy) or energy >= 0:
        raise NumericalError(f"oracle energy is not negative and finite: {energy}")
    return energy


def pfa_energy_sphere_plate(R, d, alpha=1.0):
    """``E_PFA = -alpha pi^3 R / (1440 d^2)``."""
    return -alpha * pi ** 3 * R / (1440.0 * d * d)


def oracle_curve(template, d_over_R, error_step=4):
    """``E/E_PFA`` of the Dirichlet sphere-plate on a grid of ``d/R``.

    Parameters
    ----------
    template : OracleConfig
        supplies ``R``, ``n_kappa``, ``kappa_scale`` and the truncation;
        ``d`` is replaced for every grid point. A template built with
        ``ell_max=None`` gets :func:`default_ell_max` per point.
    d_over_R : array_like
        values in ``[0.02, 50]``
    error_step : int
        truncation error is ``|E(ell_max) - E(ell_max - error_step)|``

    Returns
    -------
    EnergyCurve
        provenance ``"oracle"``, with per-point truncation errors
    """
    from .pade import EnergyCurve

    x = np.sort(np.asarray(d_over_R, dtype=float))
    if np.any(x < MIN_SEPARATION_RATIO) or np.any(x > 50.0):
        raise DomainError("oracle curve grid must lie within [0.02, 50]")
    ratio = np.empty_like(x)
    err = np.empty_like(x)
    for i, xi in enumerate(x):
        d = xi * template.R
        cfg = replace(template, d=d)
        ell = cfg.ell
        E = oracle_energy_D(cfg)
        E_low = oracle_energy_D(replace(cfg, ell_max=max(10, ell - error_step)))
        E_pfa = pfa_energy_sphere_plate(template.R, d)
        ratio[i] = E / E_pfa
        err[i] = abs(E - E_low) / abs(E_pfa)
        logger.info("oracle d/R=%.6g ell_max=%d E/E_PFA=%.12g err=%.2e", xi, ell, ratio[i], err[i])
    return EnergyCurve(x, ratio, provenance="oracle", error=err)


@dataclass(frozen=True)
class AEEstimate:
    """Force-series coefficients estimated from oracle energies.

    Attributes
    ----------
    j0 : int
    coefficients, uncertainties : np.ndarray
        ``f_1 .. f_k`` that passed the 10% uncertainty cut, with their
        one-sigma uncertainties
    withheld : int
        number of requested coefficients dropped by the cut
    fit_terms : int
        polynomial terms used in the main fit
    """

    j0: int
    coefficients: np.ndarray
    uncertainties: np.ndarray
    withheld: int
    fit_terms: int


def _energy_poly_fit(r, y, w, n_terms):
    X = r[:, None] ** np.arange(n_terms)[None, :]
    Xw = X * w[:, None]
    coef, *_ = np.linalg.lstsq(Xw, y * w, rcond=None)
    resid = (y - X @ coef) * w
    dof = max(len(r) - n_terms, 1)
    s2 = max(float(resid @ resid) / dof, 1.0)
    cov = np.linalg.pinv(Xw.T @ Xw) * s2
    return coef, np.sqrt(np.abs(np.diag(cov)))


def ae_extract(curve, j0=2, m=4, R=1.0, alpha=1.0):
    """Estimate the leading force coefficients ``f_1 .. f_m`` from a large-distance curve.

    The energy ``E R = sum_k a_k r^k`` (``r = R/d``) is fitted as a
    polynomial in ``r`` after dividing out ``r^j0``, and the force follows
    analytically, ``f_j = (j0 + j - 1) a_(j0 + j - 1)``. Two fits with
    ``m + 2`` and ``m + 3`` terms are made; the uncertainty of each
    coefficient combines the weighted statistical error with the change
    between the fits. Coefficients from the first one whose uncertainty
    exceeds 10% of its value onwards are withheld.

    Parameters
    ----------
    curve : EnergyCurve
        samples at ``d/R >= 5``; its ``error`` column weights the fit
    j0 : int
    m : int
        requested coefficients (``m <= 4``)
    R, alpha : float
        radius and plate-law prefactor used to undo the PFA normalization

    Returns
    -------
    AEEstimate
    """
    from .errors import FitError

    if not 1 <= m <= 4:
        raise DomainError("ae_extract estimates between 1 and 4 coefficients")
    x = curve.d_over_R
    if np.any(x < 5.0):
        raise DomainError("ae_extract needs samples at d/R >= 5")
    n_terms = m + 2
    if len(x) < n_terms + 2:
        raise FitError(f"ae_extract needs at least {n_terms + 2} samples, got {len(x)}")
    r = 1.0 / x
    ER = curve.ratio * (-alpha * pi ** 3 * r * r / 1440.0)
    y = ER / r ** j0
    if curve.error is not None:
        sig = np.maximum(curve.error * np.abs(curve.ratio), 1e-15) * alpha * pi ** 3 * r * r / 1440.0 / r ** j0
        sig = np.maximum(sig, 1e-14 * np.abs(y))
    else:
        sig = 1e-12 * np.abs(y)
    w = 1.0 / sig
    a1, e1 = _energy_poly_fit(r, y, w, n_terms)
    a2, e2 = _energy_poly_fit(r, y, w, n_terms + 1)
    powers = j0 + np.arange(m)
    f = powers * a1[:m]
    unc = powers * np.sqrt(e1[:m] ** 2 + (a1[:m] - a2[:m]) ** 2)
    keep = m
    for j in range(m):
        if not np.isfinite(unc[j]) or unc[j] > 0.1 * abs(f[j]):
            keep = j
            break
    return AEEstimate(j0=j0, coefficients=f[:keep], uncertainties=unc[:keep],
                      withheld=m - keep, fit_terms=n_terms)
