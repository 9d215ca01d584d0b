"""Log-scaled special functions for the multipole round-trip operator.

The sphere reflection amplitudes and the plane-wave translation integrals
span hundreds of decades across the imaginary-frequency axis, so every
routine here returns logarithms of magnitudes rather than raw values.

Normalization of the modified spherical Bessel functions follows

    i_l(x) = sqrt(pi / 2x) I_{l+1/2}(x),       i_0(x) = sinh(x) / x
    k_l(x) = sqrt(2 / pi x) K_{l+1/2}(x),      k_0(x) = exp(-x) / x

(``k_l`` is ``2/pi`` times ``scipy.special.spherical_kn``).
"""
import numpy as np
from scipy.special import gammaln

__all__ = [
    "log_sph_i",
    "log_sph_k",
    "log_dirichlet_amplitude",
    "log_legendre_scaled",
]


def log_sph_i(lmax, x):
    """Return ``log i_l(x)`` for ``l = 0..lmax``.

    Parameters
    ----------
    lmax : int
        highest order
    x : array_like
        positive arguments

    Returns
    -------
    np.ndarray
        shape ``x.shape + (lmax + 1,)``
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("log_sph_i requires positive arguments")
    out = np.empty(x.shape + (lmax + 1,))
    out[..., 0] = x - np.log(2 * x) + np.log(-np.expm1(-2 * x))
    if lmax == 0:
        return out
    # ratio i_l / i_{l-1} by backward recurrence (Miller); converges once the
    # start order exceeds the argument
    ltop = lmax + 20 + int(np.ceil(np.max(x)))
    ratio = np.zeros_like(x)
    ratios = np.empty(x.shape + (lmax,))
    for l in range(ltop, 0, -1):
        ratio = x / (2 * l + 1 + x * ratio)
        if l <= lmax:
            ratios[..., l - 1] = ratio
    out[..., 1:] = out[..., :1] + np.cumsum(np.log(ratios), axis=-1)
    return out


def log_sph_k(lmax, x):
    """Return ``log k_l(x)`` for ``l = 0..lmax`` (upward recurrence, stable).

    Parameters
    ----------
    lmax : int
        highest order
    x : array_like
        positive arguments

    Returns
    -------
    np.ndarray
        shape ``x.shape + (lmax + 1,)``
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("log_sph_k requires positive arguments")
    out = np.empty(x.shape + (lmax + 1,))
    out[..., 0] = -x - np.log(x)
    ratio = None
    for l in range(1, lmax + 1):
        if l == 1:
            ratio = (1 + x) / x
        else:
            ratio = (2 * l - 1) / x + 1 / ratio
        out[..., l] = out[..., l - 1] + np.log(ratio)
    return out


def log_dirichlet_amplitude(lmax, x):
    """Log magnitude of the Dirichlet sphere T-matrix, ``|T_l| = i_l / k_l``."""
    return log_sph_i(lmax, x) - log_sph_k(lmax, x)


def log_legendre_scaled(lmax, t):
    """Normalized associated Legendre functions off the cut, in log form.

    Computes, for ``t >= 1`` and ``0 <= m <= l <= lmax``,

        F_lm(t) = sqrt((2l+1) (l-m)! / (l+m)!) (t^2 - 1)^(m/2) d^m P_l / dt^m

    and returns ``log F_lm(t) - l log t``. All ``F_lm`` are positive for
    ``t > 1``. Entries with ``l < m`` are ``-inf``.

    Parameters
    ----------
    lmax : int
        highest degree
    t : array_like
        arguments, ``t > 1``

    Returns
    -------
    np.ndarray
        shape ``(lmax + 1, lmax + 1) + t.shape`` indexed ``[m, l]``
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 1):
        raise ValueError("log_legendre_scaled requires t > 1")
    inv_t2 = 1.0 / (t * t)
    log_sin = 0.5 * np.log1p(-inv_t2)
    out = np.full((lmax + 1, lmax + 1) + t.shape, -np.inf)
    m = np.arange(lmax + 1)
    # F_mm / t^m = sqrt((2m+1) (2m)!) / (2^m m!) (1 - 1/t^2)^(m/2)
    log_diag = 0.5 * (np.log(2 * m + 1) + gammaln(2 * m + 1)) - m * np.log(2) - gammaln(m + 1)
    base = log_diag.reshape((-1,) + (1,) * t.ndim) + np.multiply.outer(m, log_sin)
    # recurrence in l for all m at once, relative to the diagonal value so
    # that the running numbers stay O(2^l)
    g_prev = np.zeros((lmax + 1,) + t.shape)
    g_cur = np.ones((lmax + 1,) + t.shape)
    out[m, m] = base
    expand = (slice(None),) + (None,) * t.ndim
    for l in range(lmax):
        mm = m[: l + 1]
        a = np.sqrt((2 * l + 1) * (2 * l + 3) / ((l + 1 - mm) * (l + 1 + mm)))
        b = np.sqrt((2 * l + 3) * (l + mm) * np.maximum(l - mm, 0)
                    / ((2 * l - 1 if l > 0 else 1) * (l + 1 - mm) * (l + 1 + mm)))
        g_next = a[expand] * g_cur[: l + 1] - b[expand] * g_prev[: l + 1] * inv_t2
        # rows with m == l + 1 start fresh at the diagonal
        g_prev[: l + 1] = g_cur[: l + 1]
        g_cur[: l + 1] = g_next
        out[mm, l + 1] = base[: l + 1] + np.log(g_next)
    return out
