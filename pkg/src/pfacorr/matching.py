"""Matching the gradient expansion to second-order perturbation theory.

A plate at ``d + h(x)`` opposite a flat plate has, to second order in ``h``,

    E = A U(d) + mu(d) h~(0) + int d^2k/(2 pi)^2 G(k; d) |h~(k)|^2

and the small-``k`` expansion ``G = gamma + delta k^2 + ...`` fixes the
gradient coefficient through ``U' = mu``, ``U'' = 2 gamma`` and
``beta = delta / U``. Kernels are inputs here (tables or callables); this
module only extracts ``gamma`` and ``delta`` and checks the relations.
"""
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FitError, MatchingViolation

__all__ = [
    "PerturbativeKernel",
    "SmallKFit",
    "MatchingReport",
    "kernel_nodes",
    "kernel_small_k",
    "matching_check",
    "load_kernel_csv",
    "write_kernel_csv",
]

#: default fit window ``k_max d`` and node count
K_WINDOW = 0.3
N_NODES = 12


@dataclass
class PerturbativeKernel:
    """Second-order kernel ``G(k; d)`` and first-order coefficient ``mu(d)``.

    Give either ``evaluator`` (``G(k, d)``, vectorized in ``k``) or ``table``
    (``{d: (k, G)}``). ``mu`` is a callable or a ``{d: mu}`` mapping.
    """

    evaluator: object = None
    table: dict = None
    mu: object = None
    name: str = "kernel"

    def __post_init__(self):
        if (self.evaluator is None) == (self.table is None):
            raise DomainError("give exactly one of evaluator or table")
        if self.table is not None:
            clean = {}
            for d, (k, G) in self.table.items():
                k = np.asarray(k, float)
                G = np.asarray(G, float)
                if k.shape != G.shape or k.ndim != 1:
                    raise DomainError(f"table at d={d}: k and G must be equal-length vectors")
                clean[float(d)] = (k, G)
            self.table = clean

    def __call__(self, k, d):
        k = np.asarray(k, float)
        if self.evaluator is not None:
            return np.asarray(self.evaluator(k, d), float) * np.ones_like(k)
        kt, Gt = self._row(d)
        out = np.empty_like(k)
        for i, ki in enumerate(k.ravel()):
            hit = np.flatnonzero(np.abs(kt - ki) <= 1e-12 * max(1.0, abs(ki)))
            if hit.size == 0:
                raise DomainError(f"kernel table at d={d} has no node k={ki:.12g}; "
                                  "tables must contain the nodes of kernel_nodes(d)")
            out.flat[i] = Gt[hit[0]]
        return out

    def _row(self, d):
        for dt, row in self.table.items():
            if abs(dt - d) <= 1e-12 * max(1.0, abs(d)):
                return row
        raise DomainError(f"kernel table has no separation d={d}; available: {sorted(self.table)}")

    def mu_at(self, d):
        if self.mu is None:
            raise DomainError(f"kernel {self.name!r} carries no first-order coefficient mu")
        if callable(self.mu):
            return float(self.mu(d))
        for dt, value in self.mu.items():
            if abs(float(dt) - d) <= 1e-12 * max(1.0, abs(d)):
                return float(value)
        raise DomainError(f"no mu tabulated at d={d}")

    def has_negative_nodes(self, d):
        if self.evaluator is not None:
            return True
        return bool(np.any(self._row(d)[0] < 0))


def kernel_nodes(d, window=K_WINDOW, n_nodes=N_NODES):
    """Fit nodes: ``n_nodes`` points on ``[0, window/d]`` and on ``[0, window/(2d)]``."""
    if not d > 0:
        raise DomainError("separation must be positive")
    if not 0 < window <= 0.5:
        raise DomainError("the fit window k_max d must lie in (0, 0.5]")
    full = np.linspace(0.0, window / d, n_nodes)
    half = np.linspace(0.0, 0.5 * window / d, n_nodes)
    return full, half


@dataclass
class SmallKFit:
    """``G(k) = gamma + delta k^2 + c4 k^4`` with uncertainties.

    ``delta`` is Richardson-refined from fits over two windows; ``c4`` is
    from the full window.
    """

    gamma: float
    delta: float
    gamma_err: float
    delta_err: float
    c4: float
    residual: float
    d: float


def _fit(k, G):
    A = np.column_stack((np.ones_like(k), k * k, k ** 4))
    coef, _, rank, sv = np.linalg.lstsq(A, G, rcond=None)
    if rank < 3:
        raise FitError("small-k fit is rank deficient")
    r = A @ coef - G
    dof = max(len(k) - 3, 1)
    cov = float(r @ r) / dof * np.linalg.inv(A.T @ A)
    return coef, np.sqrt(np.diag(cov)), float(np.sqrt(np.mean(r * r)))


def kernel_small_k(kernel, d, window=K_WINDOW, n_nodes=N_NODES, order=3, smooth_tol=1e-6):
    """Extract ``gamma(d)`` and ``delta(d)`` from the small-``k`` behaviour of a kernel.

    Parameters
    ----------
    kernel : PerturbativeKernel
    d : float
    window : float
        fit range ``k_max d`` (at most 0.5)
    n_nodes : int
    order : int
        power of ``k_max`` in the truncation error of ``delta``, used by the
        Richardson step between the full and the half window; the
        Dirichlet kernel carries a ``|k|^5`` term, hence 3
    smooth_tol : float
        largest fit residual relative to ``max |G|`` accepted as smooth

    Returns
    -------
    SmallKFit

    Raises
    ------
    FitError
        the kernel is not even in ``k`` or not smooth on the window

    Examples
    --------
    >>> K = PerturbativeKernel(evaluator=lambda k, d: 2.0 - 3.0 * k**2)
    >>> f = kernel_small_k(K, 1.0)
    >>> round(f.gamma, 12), round(f.delta, 12)
    (2.0, -3.0)
    """
    full, half = kernel_nodes(d, window, n_nodes)
    G_full = kernel(full, d)
    G_half = kernel(half, d)
    if not (np.all(np.isfinite(G_full)) and np.all(np.isfinite(G_half))):
        raise FitError("kernel is not finite on the fit window")
    scale = max(float(np.max(np.abs(G_full))), 1e-300)
    if kernel.has_negative_nodes(d):
        G_neg = kernel(-full[1:], d)
        asym = float(np.max(np.abs(G_neg - G_full[1:]))) / scale
        if asym > smooth_tol:
            raise FitError(f"kernel is not even in k (relative asymmetry {asym:.3g})")
    c_full, s_full, r_full = _fit(full, G_full)
    c_half, s_half, r_half = _fit(half, G_half)
    residual = max(r_full, r_half) / scale
    if residual > smooth_tol:
        raise FitError(f"kernel is not smooth on the fit window (relative residual {residual:.3g})")
    step = (c_half[1] - c_full[1]) / (2.0 ** order - 1.0)
    delta = c_half[1] + step
    delta_err = math.hypot(abs(step), s_half[1])
    gamma = float(G_full[0]) if full[0] == 0.0 else float(c_half[0])
    gamma_err = math.hypot(abs(c_half[0] - gamma), s_half[0])
    return SmallKFit(gamma=gamma, delta=float(delta), gamma_err=float(gamma_err),
                     delta_err=float(delta_err), c4=float(c_full[2]), residual=residual, d=d)


@dataclass
class MatchingReport:
    """Residuals of the three matching relations at one separation."""

    d: float
    beta: float
    beta_err: float
    residuals: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    fit: SmallKFit = None

    def as_dict(self):
        return {"d": self.d, "beta": self.beta, "beta_err": self.beta_err,
                "residuals": dict(self.residuals), "tolerances": dict(self.tolerances)}


def matching_check(kernel, law, d, rtol=1e-6, beta_expected=None, **fit_options):
    """Check ``U' = mu``, ``U'' = 2 gamma`` and return ``beta = delta / U``.

    Parameters
    ----------
    kernel : PerturbativeKernel
    law : PlateLaw
    d : float
    rtol : float
        relative tolerance of each relation, widened by three standard
        uncertainties of the extracted coefficient
    beta_expected : float, optional
        also check ``beta = delta / U`` against this value

    Returns
    -------
    MatchingReport

    Raises
    ------
    MatchingViolation
        naming the first relation whose residual exceeds its tolerance
    """
    fit = kernel_small_k(kernel, d, **fit_options)
    U = law.energy_per_area(d)
    U1 = law.derivative(d, 1)
    U2 = law.derivative(d, 2)
    beta = fit.delta / U
    beta_err = fit.delta_err / abs(U)
    residuals = {}
    tolerances = {}
    if kernel.mu is not None:
        residuals["U' = mu"] = abs(U1 - kernel.mu_at(d)) / abs(U1)
        tolerances["U' = mu"] = rtol
    residuals["U'' = 2 gamma"] = abs(U2 - 2.0 * fit.gamma) / abs(U2)
    tolerances["U'' = 2 gamma"] = rtol + 3.0 * fit.gamma_err / abs(fit.gamma)
    if beta_expected is not None:
        residuals["beta = delta / U"] = abs(beta - beta_expected) / max(abs(beta_expected), 1e-300)
        tolerances["beta = delta / U"] = rtol + 3.0 * beta_err / max(abs(beta_expected), 1e-300)
    report = MatchingReport(d=d, beta=float(beta), beta_err=float(beta_err),
                            residuals=residuals, tolerances=tolerances, fit=fit)
    for name, value in residuals.items():
        if not value <= tolerances[name]:
            raise MatchingViolation(name, value, tolerances[name])
    return report


def load_kernel_csv(path, name=None):
    """Read a kernel table with columns ``k, d, G`` and an optional ``mu``.

    Rows with negative ``k`` must repeat the value at ``+k`` (checked when
    the kernel is fitted).
    """
    table = {}
    mu = {}
    with open(path, newline="") as fh:
        reader = csv.reader(row for row in fh if not row.lstrip().startswith("#"))
        header = [h.strip().lower() for h in next(reader)]
        try:
            ik, idd, ig = header.index("k"), header.index("d"), header.index("g")
        except ValueError:
            raise DomainError(f"kernel CSV needs columns k, d, G; found {header}") from None
        imu = header.index("mu") if "mu" in header else None
        for row in reader:
            if not row:
                continue
            d = float(row[idd])
            table.setdefault(d, ([], []))
            table[d][0].append(float(row[ik]))
            table[d][1].append(float(row[ig]))
            if imu is not None and row[imu].strip():
                mu[d] = float(row[imu])
    if not table:
        raise DomainError(f"kernel CSV {path} has no rows")
    return PerturbativeKernel(table={d: (np.array(k), np.array(G)) for d, (k, G) in table.items()},
                              mu=mu or None, name=name or str(path))


def write_kernel_csv(path, kernel, separations, window=K_WINDOW, n_nodes=N_NODES, signed=True):
    """Tabulate a kernel on the fit nodes of each separation (``+k`` and ``-k``)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "d", "G", "mu"])
        for d in separations:
            full, half = kernel_nodes(d, window, n_nodes)
            k = np.unique(np.concatenate((full, half)))
            if signed:
                k = np.concatenate((-k[:0:-1], k))
            G = kernel(k, d)
            mu = kernel.mu_at(d) if kernel.mu is not None else ""
            for ki, gi in zip(k, G):
                w.writerow([repr(float(ki)), repr(float(d)), repr(float(gi)),
                            repr(mu) if mu != "" else ""])
