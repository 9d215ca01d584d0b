"""Adaptive tensor-product Gauss-Kronrod cubature on rectangles and disks.

Each cell is integrated with the 15-point Kronrod rule along both axes; the
embedded 7-point Gauss rule gives the error estimate ``|K - G|``. The cells
with the largest errors are split into four until the summed error falls
below the tolerance. Integrands are vector valued (several moments share
one set of evaluations) and are called once per refinement sweep with all
new nodes, so the cost is dominated by numpy array work. Final sums run
over cells in a fixed order with :func:`math.fsum`, which makes results
independent of the refinement history.
"""
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["CubatureResult", "cubature_rectangles", "cubature_polar", "gk15_1d"]

# QUADPACK G7/K15 abscissae on [-1, 1] (non-negative half) and weights
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate((-_XK[:-1], _XK[::-1]))
_W_KRONROD = np.concatenate((_WK[:-1], _WK[::-1]))
# Gauss nodes are the odd-indexed Kronrod nodes 1, 3, 5, 7 of the half table
_W_GAUSS = np.zeros(15)
for _k, _w in zip((1, 3, 5), _WG[:3]):
    _W_GAUSS[_k] = _w
    _W_GAUSS[14 - _k] = _w
_W_GAUSS[7] = _WG[3]


def gk15_1d():
    """Nodes on ``[-1, 1]`` with Kronrod and embedded Gauss weights."""
    return _NODES.copy(), _W_KRONROD.copy(), _W_GAUSS.copy()


_WK2 = np.outer(_W_KRONROD, _W_KRONROD).ravel()
_WG2 = np.outer(_W_GAUSS, _W_GAUSS).ravel()
_U, _V = (a.ravel() for a in np.meshgrid(_NODES, _NODES, indexing="ij"))


@dataclass
class CubatureResult:
    """Integral estimate of every integrand component.

    Attributes
    ----------
    value : np.ndarray
        one entry per component
    error : np.ndarray
        summed ``|K - G|`` per component
    n_cells : int
    n_evaluations : int
    converged : bool
    """

    value: np.ndarray
    error: np.ndarray
    n_cells: int
    n_evaluations: int
    converged: bool


def _integrate_cells(func, cells, jacobian):
    """Kronrod and Gauss estimates for an array of cells ``(n, 4)``: a0, a1, b0, b1."""
    a0, a1, b0, b1 = cells.T
    ha = 0.5 * (a1 - a0)
    hb = 0.5 * (b1 - b0)
    A = (0.5 * (a0 + a1))[:, None] + ha[:, None] * _U[None, :]
    B = (0.5 * (b0 + b1))[:, None] + hb[:, None] * _V[None, :]
    vals = np.asarray(func(A, B))  # (n_comp, n_cells, 225)
    if vals.ndim == 2:
        vals = vals[None]
    if jacobian is not None:
        vals = vals * jacobian(A, B)[None]
    area = (ha * hb)[None, :]
    K = np.einsum("cnk,k->cn", vals, _WK2) * area
    G = np.einsum("cnk,k->cn", vals, _WG2) * area
    return K, np.abs(K - G)


def _adaptive(func, cells, jacobian, rtol, atol, max_cells, weights):
    cells = np.asarray(cells, dtype=float)
    K, E = _integrate_cells(func, cells, jacobian)
    n_eval = 225 * len(cells)
    weights = None if weights is None else np.asarray(weights, dtype=float)
    converged = False
    while True:
        if weights is None:
            # every component to rtol relative to its own L1 size
            size = np.sum(np.abs(K), axis=1)
            inv = np.divide(1.0, size, out=np.zeros_like(size), where=size > 0)
            cell_err = inv @ E
            done = np.all(np.sum(E, axis=1) <= np.maximum(atol, rtol * size))
        else:
            cell_err = weights @ E
            done = np.sum(cell_err) <= max(atol, rtol * abs(weights @ np.sum(K, axis=1)))
        if done:
            converged = True
            break
        if len(cells) >= max_cells:
            break
        # split cells carrying the largest errors, at least the single worst
        order = np.argsort(cell_err)[::-1]
        cum = np.cumsum(cell_err[order])
        n_split = int(np.searchsorted(cum, 0.5 * cum[-1])) + 1
        n_split = min(n_split, max(1, (max_cells - len(cells)) // 3))
        split = np.sort(order[:n_split])
        keep = np.ones(len(cells), bool)
        keep[split] = False
        a0, a1, b0, b1 = cells[split].T
        am = 0.5 * (a0 + a1)
        bm = 0.5 * (b0 + b1)
        children = np.concatenate([
            np.column_stack((a0, am, b0, bm)),
            np.column_stack((am, a1, b0, bm)),
            np.column_stack((a0, am, bm, b1)),
            np.column_stack((am, a1, bm, b1)),
        ])
        Kc, Ec = _integrate_cells(func, children, jacobian)
        n_eval += 225 * len(children)
        cells = np.concatenate((cells[keep], children))
        K = np.concatenate((K[:, keep], Kc), axis=1)
        E = np.concatenate((E[:, keep], Ec), axis=1)
    # order-independent summation
    key = np.lexsort((cells[:, 3], cells[:, 2], cells[:, 1], cells[:, 0]))
    value = np.array([math.fsum(row[key]) for row in K])
    error = np.array([math.fsum(row[key]) for row in E])
    return CubatureResult(value, error, len(cells), n_eval, converged)


def cubature_rectangles(func, cells, rtol=1e-8, atol=0.0, max_cells=20000, weights=None):
    """Integrate ``func(x, y)`` over a union of rectangles.

    Parameters
    ----------
    func : callable
        ``func(X, Y)`` with equally shaped arrays, returning an array of shape
        ``(n_components,) + X.shape`` (or ``X.shape`` for one component)
    cells : array_like, shape (n, 4)
        initial rectangles ``(x0, x1, y0, y1)``
    rtol, atol : float
        stop once every component's summed error is below
        ``max(atol, rtol int |f_c|)``
    max_cells : int
    weights : array_like, optional
        instead converge the single combination ``weights @ f`` to
        ``rtol |weights @ I|``

    Returns
    -------
    CubatureResult
    """
    return _adaptive(func, cells, None, rtol, atol, max_cells, weights)


def cubature_polar(func, radial_breaks, n_angular=4, center=(0.0, 0.0), rtol=1e-8,
                   atol=0.0, max_cells=20000, weights=None):
    """Integrate ``func(x, y)`` over a disk in polar cells ``(rho, phi)``.

    Parameters
    ----------
    func : callable
        as in :func:`cubature_rectangles`, called with Cartesian coordinates
    radial_breaks : array_like
        increasing radii from 0 to the disk radius; they seed the initial cells
    n_angular : int
        initial angular cells
    center : (float, float)

    Returns
    -------
    CubatureResult
    """
    rb = np.asarray(radial_breaks, dtype=float)
    pb = np.linspace(0.0, 2.0 * np.pi, n_angular + 1)
    cells = np.array([(rb[i], rb[i + 1], pb[j], pb[j + 1])
                      for i in range(len(rb) - 1) for j in range(n_angular)])
    cx, cy = center

    def polar(Rho, Phi):
        return func(cx + Rho * np.cos(Phi), cy + Rho * np.sin(Phi))

    return _adaptive(polar, cells, lambda Rho, Phi: Rho, rtol, atol, max_cells, weights)
