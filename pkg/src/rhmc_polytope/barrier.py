"""Log-barrier Hessian metric g(x) = A_x^T A_x with A_x = S_x^{-1} A.

All quantities at a point are bundled into an immutable :class:`MetricState`
built once per trajectory node. Solves go through LAPACK ``potrf``/``potrs``
directly because the SciPy wrappers dominate the cost at small n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from rhmc_polytope.errors import FactorizationFailure, NotInterior
from rhmc_polytope.polytope import Polytope

# slack floor relative to (1 + |x|_inf) below which a point counts as on the boundary
BOUNDARY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class MetricState:
    """Cached barrier geometry at a strictly interior point ``x``.

    Attributes:
        x: evaluation point.
        s: slacks ``A x - b`` (all positive).
        Ax_scaled: ``S_x^{-1} A``.
        chol: lower Cholesky factor of ``g(x)``.
        logdet: ``log det g(x)``.
    """

    x: np.ndarray
    s: np.ndarray
    Ax_scaled: np.ndarray
    chol: np.ndarray
    logdet: float

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def g(self) -> np.ndarray:
        return self.Ax_scaled.T @ self.Ax_scaled


def metric_state(P: Polytope, x) -> MetricState:
    x = np.asarray(x, dtype=float)
    s = P.A @ x - P.b
    smin = s.min()
    if not smin > BOUNDARY_RTOL * (1.0 + np.abs(x).max()):
        raise NotInterior(f"min slack {smin:.3e} at x is not strictly positive")
    Ax = P.A / s[:, None]
    L, info = lapack.dpotrf(Ax.T @ Ax, lower=1, clean=1)
    if info != 0:
        raise FactorizationFailure(f"Cholesky of g(x) failed (info={info})")
    d = np.diagonal(L)
    if not np.all(d > 0):
        raise FactorizationFailure("Cholesky factor has a non-positive pivot")
    return MetricState(x, s, Ax, L, 2.0 * float(np.log(d).sum()))


def apply_metric(M: MetricState, u) -> np.ndarray:
    """g(x) u, evaluated as A_x^T (A_x u)."""
    return M.Ax_scaled.T @ (M.Ax_scaled @ u)


def solve_metric(M: MetricState, w) -> np.ndarray:
    """g(x)^{-1} w by two triangular solves with the cached factor."""
    out, info = lapack.dpotrs(M.chol, w, lower=1)
    if info != 0:
        raise FactorizationFailure(f"potrs failed (info={info})")
    return out


def leverage_scores(M: MetricState) -> np.ndarray:
    """Diagonal of the hat matrix A_x g^{-1} A_x^T; sums to n."""
    Z = solve_metric(M, np.ascontiguousarray(M.Ax_scaled.T))
    return np.einsum("ij,ji->i", M.Ax_scaled, Z)


def grad_log_det(M: MetricState) -> np.ndarray:
    """Gradient of log det g, i.e. the vector tr(g^{-1} dg/dx_k)."""
    return -2.0 * (M.Ax_scaled.T @ leverage_scores(M))


def dg_bilinear(M: MetricState, u) -> np.ndarray:
    """The vector Dg(x)[u, u], whose k-th entry is D^3 phi(x)[u, u, e_k]."""
    su = M.Ax_scaled @ u
    return -2.0 * (M.Ax_scaled.T @ (su * su))


def local_norm_v(M: MetricState, v) -> float:
    """Dual norm sqrt(v^T g^{-1} v) for velocity/gradient-like vectors."""
    y = lapack.dtrtrs(M.chol, v, lower=1)[0]
    return float(np.sqrt(y @ y))


def local_norm_u(M: MetricState, u) -> float:
    """Primal norm sqrt(u^T g u) = |A_x u|_2 for displacement-like vectors."""
    su = M.Ax_scaled @ u
    return float(np.sqrt(su @ su))
