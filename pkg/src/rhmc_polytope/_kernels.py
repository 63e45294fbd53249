"""Compiled single-step kernels for the implicit integrators.

These mirror the numpy code paths in :mod:`rhmc_polytope.integrators`
operation for operation; the numpy path stays the readable definition and
the test-suite checks the two agree. Status codes are returned instead of
raising because exceptions inside compiled loops are costly.
"""

import numba as nb
import numpy as np

from rhmc_polytope.barrier import BOUNDARY_RTOL

OK = 0
NOT_INTERIOR = 1  # start point rejected
LEFT_INTERIOR = 2  # an iterate left the polytope or the metric factorization failed
NO_CONVERGENCE = 3
NONFINITE = 4

_jit = nb.njit(cache=True, nogil=True)


@_jit
def metric(A, b, x):
    m, n = A.shape
    s = A @ x - b
    xmax = 0.0
    for j in range(n):
        xmax = max(xmax, abs(x[j]))
    smin = s.min()
    Axs = np.empty((m, n))
    L = np.zeros((n, n))
    if not smin > BOUNDARY_RTOL * (1.0 + xmax):
        return False, Axs, L
    for i in range(m):
        inv = 1.0 / s[i]
        for j in range(n):
            Axs[i, j] = A[i, j] * inv
    g = Axs.T @ Axs
    for j in range(n):
        d = g[j, j]
        for k in range(j):
            d -= L[j, k] * L[j, k]
        if not d > 0.0:
            return False, Axs, L
        d = np.sqrt(d)
        L[j, j] = d
        for i in range(j + 1, n):
            acc = g[i, j]
            for k in range(j):
                acc -= L[i, k] * L[j, k]
            L[i, j] = acc / d
    return True, Axs, L


@_jit
def forward(L, w):
    n = w.shape[0]
    y = np.empty(n)
    for i in range(n):
        acc = w[i]
        for k in range(i):
            acc -= L[i, k] * y[k]
        y[i] = acc / L[i, i]
    return y


@_jit
def solve(L, w):
    y = forward(L, w)
    n = y.shape[0]
    z = np.empty(n)
    for i in range(n - 1, -1, -1):
        acc = y[i]
        for k in range(i + 1, n):
            acc -= L[k, i] * z[k]
        z[i] = acc / L[i, i]
    return z


@_jit
def norm_u(Axs, d):
    su = Axs @ d
    return np.sqrt(su @ su)


@_jit
def norm_v(L, w):
    y = forward(L, w)
    return np.sqrt(y @ y)


@_jit
def dg_bilinear(Axs, u):
    su = Axs @ u
    return -2.0 * (Axs.T @ (su * su))


@_jit
def dH1(Axs, L, alpha):
    m, n = Axs.shape
    # rows of L^{-1} A_x^T give the leverage scores as squared column norms
    lev = np.zeros(m)
    for i in range(m):
        y = forward(L, Axs[i].copy())
        lev[i] = y @ y
    return alpha - (Axs.T @ lev)


@_jit
def dH2(Axs, L, v):
    return -0.5 * dg_bilinear(Axs, solve(L, v))


@_jit
def _finite(a):
    for i in range(a.shape[0]):
        if not np.isfinite(a[i]):
            return False
    return True


@_jit
def imm(A, b, alpha, x, v, h, tol, maxit):
    """Returns (status, iters, v13, x23, v23, v1)."""
    n = x.shape[0]
    empty = np.zeros(n)
    ok, Ax0, L0 = metric(A, b, x)
    if not ok:
        return NOT_INTERIOR, 0, empty, empty, empty, empty
    v13 = v - 0.5 * h * dH1(Ax0, L0, alpha)
    x23 = x.copy()
    v23 = v13.copy()
    for it in range(1, maxit + 1):
        ok, Axm, Lm = metric(A, b, 0.5 * (x + x23))
        if not ok:
            return LEFT_INTERIOR, it, v13, x23, v23, empty
        u = solve(Lm, 0.5 * (v13 + v23))
        x_new = x + h * u
        v_new = v13 + 0.5 * h * dg_bilinear(Axm, u)
        dx = norm_u(Ax0, x_new - x23)
        dv = norm_v(L0, v_new - v23)
        x23 = x_new
        v23 = v_new
        if not (np.isfinite(dx) and np.isfinite(dv)):
            return NONFINITE, it, v13, x23, v23, empty
        if dx <= tol and dv <= tol:
            ok, Ax1, L1 = metric(A, b, x23)
            if not ok:
                return LEFT_INTERIOR, it, v13, x23, v23, empty
            v1 = v23 - 0.5 * h * dH1(Ax1, L1, alpha)
            return OK, it, v13, x23, v23, v1
    return NO_CONVERGENCE, maxit, v13, x23, v23, empty


@_jit
def leapfrog(A, b, alpha, x, v, h, tol, maxit):
    """Returns (status, iters, v_half, x1, v1)."""
    n = x.shape[0]
    empty = np.zeros(n)
    ok, Ax0, L0 = metric(A, b, x)
    if not ok:
        return NOT_INTERIOR, 0, empty, empty, empty
    kick0 = v - 0.5 * h * dH1(Ax0, L0, alpha)
    v_half = v.copy()
    iters = 0
    done = False
    for it in range(1, maxit + 1):
        v_new = kick0 - 0.5 * h * dH2(Ax0, L0, v_half)
        dv = norm_v(L0, v_new - v_half)
        v_half = v_new
        if not np.isfinite(dv):
            return NONFINITE, it, v_half, empty, empty
        if dv <= tol:
            iters = it
            done = True
            break
    if not done:
        return NO_CONVERGENCE, maxit, v_half, empty, empty

    u0 = solve(L0, v_half)
    x1 = x + h * u0
    done = False
    for it in range(1, maxit + 1):
        ok, Ax1, L1 = metric(A, b, x1)
        if not ok:
            return LEFT_INTERIOR, iters + it, v_half, x1, empty
        x_new = x + 0.5 * h * (u0 + solve(L1, v_half))
        dx = norm_u(Ax0, x_new - x1)
        x1 = x_new
        if not np.isfinite(dx):
            return NONFINITE, iters + it, v_half, x1, empty
        if dx <= tol:
            iters += it
            done = True
            break
    if not done:
        return NO_CONVERGENCE, iters + maxit, v_half, x1, empty

    ok, Ax1, L1 = metric(A, b, x1)
    if not ok:
        return LEFT_INTERIOR, iters, v_half, x1, empty
    v1 = v_half - 0.5 * h * (dH1(Ax1, L1, alpha) + dH2(Ax1, L1, v_half))
    if not (_finite(x1) and _finite(v1)):
        return NONFINITE, iters, v_half, x1, v1
    return OK, iters, v_half, x1, v1
