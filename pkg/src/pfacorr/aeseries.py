"""Exact large-distance expansion of the scalar sphere-plate force.

Expanding ``log det(1 - M) = -sum_n tr(M^n) / n`` of the multipole round-trip
operator (see :mod:`pfacorr.oracle`) in powers of ``rho = R / L`` at fixed
``x = kappa L`` turns every term into ``exp(-2 n x)`` times a Laurent
polynomial in ``x`` with rational coefficients, so the frequency integral is
elementary. The result is the energy series ``E L = sum_k e_k rho^k`` with
every ``e_k`` a rational multiple of ``1/pi``; re-expanding in ``r = R/d``
and differentiating gives the asymptotic force coefficients.

Only scalar fields are handled: Dirichlet on sphere and plate, or Neumann on
both. Arithmetic is exact (:class:`fractions.Fraction`).
"""
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, pi

__all__ = ["energy_series_L", "energy_series_r", "force_series", "series_j0", "series_fixture"]

_KINDS = ("D", "N")


# -- univariate truncated power series (lists of Fractions) ------------------

def _mul(a, b, order):
    out = [Fraction(0)] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: order + 1 - i]):
            out[i + j] += ai * bj
    return out


def _inv(a, order):
    if a[0] == 0:
        raise ZeroDivisionError("series with vanishing constant term")
    out = [Fraction(0)] * (order + 1)
    out[0] = 1 / a[0]
    for n in range(1, order + 1):
        acc = sum((a[k] * out[n - k] for k in range(1, min(n, len(a) - 1) + 1)), Fraction(0))
        out[n] = -acc / a[0]
    return out


def _pad(a, order):
    a = list(a[: order + 1])
    return a + [Fraction(0)] * (order + 1 - len(a))


def _double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _sph_i_series(l, order):
    """Coefficients of ``i_l(y)`` in powers of ``y``."""
    out = [Fraction(0)] * (order + 1)
    s = 0
    while l + 2 * s <= order:
        out[l + 2 * s] = Fraction(1, 2 ** s * factorial(s) * _double_factorial(2 * l + 2 * s + 1))
        s += 1
    return out


def _k_poly(l):
    """``Q_l(y) = y^(l+1) exp(y) k_l(y)`` as ascending coefficients."""
    out = [Fraction(0)] * (l + 1)
    for s in range(l + 1):
        out[l - s] = Fraction(factorial(l + s), factorial(s) * factorial(l - s) * 2 ** s)
    return out


@lru_cache(maxsize=None)
def _amplitude_series(kind, l, order):
    """Series of the magnitude of the sphere T-matrix element ``|T_l(y)|``."""
    exp_y = [Fraction(1, factorial(k)) for k in range(order + 1)]
    i_l = _sph_i_series(l, order + l + 3)
    Q = _k_poly(l)
    if kind == "D":
        # i_l / k_l = exp(y) y^(l+1) i_l(y) / Q_l(y)
        num = [Fraction(0)] * (l + 1) + i_l
        den = Q
    else:
        # i_l' / (-k_l') = exp(y) y^(l+2) i_l'(y) / S_l(y),
        # S_l = y Q_l - y Q_l' + (l+1) Q_l
        di = [(k + 1) * c for k, c in enumerate(i_l[1:])]
        num = [Fraction(0)] * (l + 2) + di
        dQ = [(k + 1) * c for k, c in enumerate(Q[1:])]
        S = [Fraction(0)] * (l + 2)
        for k, c in enumerate(Q):
            S[k + 1] += c
            S[k] += (l + 1) * c
        for k, c in enumerate(dQ):
            S[k + 1] -= c
        den = S
    ratio = _mul(_pad(num, order), _inv(_pad(den, order), order), order)
    return tuple(_mul(exp_y, ratio, order))


@lru_cache(maxsize=None)
def _legendre_poly(l):
    """Ascending coefficients of the Legendre polynomial ``P_l``."""
    p0, p1 = [Fraction(1)], [Fraction(0), Fraction(1)]
    if l == 0:
        return tuple(p0)
    for n in range(1, l):
        nxt = [Fraction(0)] * (n + 2)
        for k, c in enumerate(p1):
            nxt[k + 1] += Fraction(2 * n + 1, n + 1) * c
        for k, c in enumerate(p0):
            nxt[k] -= Fraction(n, n + 1) * c
        p0, p1 = p1, nxt
    return tuple(p1)


def _deriv(p, m):
    p = list(p)
    for _ in range(m):
        p = [(k + 1) * c for k, c in enumerate(p[1:])]
    return p


def _polymul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


@lru_cache(maxsize=None)
def _translation_laurent(m, l, lp):
    """``exp(2x) J_{l l'}(2x)`` as ``{x_power: coefficient}``.

    ``J = int_1^inf exp(-Z t) (t^2-1)^m P_l^(m)(t) P_l'^(m)(t) dt`` at ``Z = 2x``.
    """
    w = _polymul(_deriv(_legendre_poly(l), m), _deriv(_legendre_poly(lp), m))
    t2m1 = [Fraction(1)]
    for _ in range(m):
        t2m1 = _polymul(t2m1, [Fraction(-1), Fraction(0), Fraction(1)])
    w = _polymul(w, t2m1)
    out = defaultdict(Fraction)
    for a, c in enumerate(w):
        if c == 0:
            continue
        # int_1^inf exp(-Z t) t^a dt = exp(-Z) sum_j a!/(a-j)! Z^(-j-1)
        for j in range(a + 1):
            out[-j - 1] += c * Fraction(factorial(a), factorial(a - j) * 2 ** (j + 1))
    return dict(out)


def _norm_sq(l, m):
    return Fraction((2 * l + 1) * factorial(l - m), factorial(l + m))


# -- bivariate polynomials {(rho_power, x_power): Fraction} ------------------

def _bmul(a, b, kmax):
    out = defaultdict(Fraction)
    for (ka, pa), ca in a.items():
        for (kb, pb), cb in b.items():
            if ka + kb <= kmax:
                out[(ka + kb, pa + pb)] += ca * cb
    return {key: c for key, c in out.items() if c != 0}


def _badd(a, b):
    out = defaultdict(Fraction, a)
    for key, c in b.items():
        out[key] += c
    return {key: c for key, c in out.items() if c != 0}


def _min_power(kind, l):
    return 3 if (kind == "N" and l == 0) else 2 * l + 1


def series_j0(kind):
    """Leading-power offset of the force series: 2 for D, 4 for N."""
    if kind not in _KINDS:
        raise ValueError(f"unsupported scalar kind {kind!r}")
    return 2 if kind == "D" else 4


@lru_cache(maxsize=None)
def energy_series_L(kind, kmax):
    """Coefficients ``c_k`` with ``E L = (1/pi) sum_{k<=kmax} c_k rho^k``.

    Parameters
    ----------
    kind : {"D", "N"}
    kmax : int
        highest power of ``rho = R/L`` retained

    Returns
    -------
    list of Fraction
        ``c_0 .. c_kmax``
    """
    if kind not in _KINDS:
        raise ValueError(f"unsupported scalar kind {kind!r}")
    lmax = 0
    while _min_power(kind, lmax + 1) <= kmax:
        lmax += 1
    total = defaultdict(Fraction)
    for m in range(lmax + 1):
        ells = [l for l in range(m, lmax + 1) if _min_power(kind, l) <= kmax]
        if not ells:
            continue
        amp = {l: _amplitude_series(kind, l, kmax) for l in ells}
        # entry (l', l): |T_l'|(x rho) * N_l'^2 * J_{l' l}(2x), factor exp(-2x) implicit
        block = {}
        for lp in ells:
            for l in ells:
                lau = _translation_laurent(m, lp, l)
                scale = _norm_sq(lp, m)
                entry = defaultdict(Fraction)
                for k, tau in enumerate(amp[lp]):
                    if tau == 0:
                        continue
                    for p, c in lau.items():
                        entry[(k, k + p)] += tau * scale * c
                block[(lp, l)] = {key: c for key, c in entry.items() if c != 0}
        min_pow = min(_min_power(kind, l) for l in ells)
        n_max = kmax // min_pow
        power = {key: dict(val) for key, val in block.items()}
        weight = 1 if m == 0 else 2
        for n in range(1, n_max + 1):
            if n > 1:
                nxt = {}
                for a in ells:
                    for b in ells:
                        acc = {}
                        for c in ells:
                            acc = _badd(acc, _bmul(power[(a, c)], block[(c, b)], kmax))
                        nxt[(a, b)] = acc
                power = nxt
            trace = {}
            for a in ells:
                trace = _badd(trace, power[(a, a)])
            for (k, p), c in trace.items():
                if p < 0:
                    raise ArithmeticError(
                        f"negative frequency power survived at rho^{k}, x^{p} (m={m}, n={n})")
                # int_0^inf x^p exp(-2 n x) dx = p! / (2n)^(p+1); E L = -(1/2pi) sum tr(M^n)/n
                total[k] -= weight * c * Fraction(factorial(p), (2 * n) ** (p + 1)) / (2 * n)
    return [total.get(k, Fraction(0)) for k in range(kmax + 1)]


def energy_series_r(kind, order):
    """Coefficients ``a_k`` with ``E R = (1/pi) sum_{k<=order} a_k r^k``, ``r = R/d``."""
    eL = energy_series_L(kind, order - 1)
    out = [Fraction(0)] * (order + 1)
    # E R = rho * E L and rho = r / (1 + r)
    for k, c in enumerate(eL):
        if c == 0:
            continue
        kk = k + 1
        for i in range(order - kk + 1):
            out[kk + i] += c * _binom_neg(kk, i)
    return out


def _binom_neg(k, i):
    # coefficient of r^i in (1 + r)^(-k)
    return (-1) ** i * comb(k + i - 1, i)


def force_series(kind, n_terms):
    """Exact force coefficients ``f_j`` (times ``pi``) of ``f = sum_j f_j r^(j0+j)``.

    Parameters
    ----------
    kind : {"D", "N"}
    n_terms : int

    Returns
    -------
    list of Fraction
        ``pi f_1 .. pi f_n``
    """
    j0 = series_j0(kind)
    order = j0 + n_terms - 1
    a = energy_series_r(kind, order)
    # f = R^2 F = r^2 d(E R)/dr
    return [(j0 + j - 1) * a[j0 + j - 1] for j in range(1, n_terms + 1)]


def series_fixture(kind, n_terms):
    """Fixture dictionary ``{"bc", "j0", "coefficients", "source", "exact_pi_times"}``."""
    exact = force_series(kind, n_terms)
    return {
        "bc": kind,
        "j0": series_j0(kind),
        "coefficients": [float(c) / pi for c in exact],
        "source": (f"exact large-distance multipole expansion of the {kind} scalar "
                   f"sphere-plate force, {n_terms} terms, generated by pfacorr.aeseries"),
        "exact_pi_times": [str(c) for c in exact],
    }


def main(argv=None):
    import argparse
    import json

    parser = argparse.ArgumentParser(description="Write an exact force-series fixture.")
    parser.add_argument("--bc", choices=_KINDS, required=True)
    parser.add_argument("--terms", type=int, required=True)
    parser.add_argument("--output", required=True)
    args = parser.parse_args(argv)
    with open(args.output, "w") as fh:
        json.dump(series_fixture(args.bc, args.terms), fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
