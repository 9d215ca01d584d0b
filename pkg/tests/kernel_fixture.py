"""Generator of the Dirichlet second-order kernel table used by the matching tests.

A Dirichlet plate at ``z = d + h(x)`` opposite a flat Dirichlet plate. The
round trip of an evanescent wave (Euclidean 3-momentum ``P = (omega, p)``,
``n(P) = 1 / (exp(2 P d) - 1)``) through ``log det(1 - N)``, with the
deformed plate's reflection operator expanded to second order in ``h``,
gives::

    mu(d)   = (1/pi) int_0^inf d omega int d^2p/(2 pi)^2 K_p n_p
    G(k; d) = -(1/(4 pi^2)) int_0^inf P^3 n(P) dP int_{-1}^{1} dc Q (1 + n(Q))

with ``Q = |P + k|``. The table stores ``G`` on the fit nodes of
:func:`pfacorr.matching.kernel_nodes` for ``+k`` and ``-k``.

Run ``python3 tests/kernel_fixture.py`` to regenerate ``tests/data/kernel_D.csv``.
"""
import math
import pathlib

import numpy as np
from scipy.integrate import quad

from pfacorr.matching import PerturbativeKernel, write_kernel_csv


def _occupation(x):
    # 1 / (exp(x) - 1) without overflow
    return math.exp(-x) / -math.expm1(-x) if x > 0 else math.inf


def dirichlet_G(k, d):
    k = abs(float(k))

    def inner(P):
        def f(c):
            Q = math.sqrt(max(P * P + k * k + 2.0 * P * k * c, 0.0))
            # Q (1 + n(Q)) -> 1 / (2 d) as Q -> 0
            return Q * (1.0 + _occupation(2.0 * Q * d)) if Q > 0 else 0.5 / d

        v, _ = quad(f, -1.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
        return P ** 3 * _occupation(2.0 * P * d) * v

    v, _ = quad(inner, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=400)
    return -v / (4.0 * math.pi ** 2)


def dirichlet_mu(d):
    # (1/pi) int d omega d^2p/(2 pi)^2 K n = (1/(2 pi^2)) int P^3 n(P) dP
    v, _ = quad(lambda P: P ** 3 * _occupation(2.0 * P * d), 0.0, np.inf, epsabs=0.0, epsrel=1e-13)
    return v / (2.0 * math.pi ** 2)


def dirichlet_kernel():
    return PerturbativeKernel(
        evaluator=lambda k, d: np.array([dirichlet_G(ki, d) for ki in np.atleast_1d(k)]).reshape(np.shape(k)),
        mu=dirichlet_mu, name="dirichlet")


if __name__ == "__main__":
    out = pathlib.Path(__file__).parent / "data" / "kernel_D.csv"
    write_kernel_csv(out, dirichlet_kernel(), [0.5, 1.0, 2.0])
    print(f"wrote {out}")
