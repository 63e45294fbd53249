"""Polytopes {x : Ax >= b}: construction, text I/O, fixtures and interior points."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import qr

from rhmc_polytope.errors import (
    InfeasibleInterior,
    InvalidDimension,
    NoInteriorPoint,
    ParseError,
    RankDeficient,
)

RANK_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class Polytope:
    """The set {x in R^n : A x >= b} with a strictly interior witness.

    Construction validates the data: no zero rows, ``m >= n``, full column
    rank, and a nonempty interior. If ``interior_point`` is not supplied a
    phase-I barrier Newton method looks for one.
    """

    A: np.ndarray
    b: np.ndarray
    interior_point: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        A = np.array(self.A, dtype=float, copy=True)
        b = np.array(self.b, dtype=float, copy=True).reshape(-1)
        if A.ndim != 2 or A.shape[0] != b.shape[0] or A.shape[1] < 1:
            raise InvalidDimension(f"incompatible shapes A{A.shape}, b{b.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ParseError("constraint data must be finite")
        m, n = A.shape
        if np.any(np.all(A == 0.0, axis=1)):
            raise ParseError("constraint matrix has a zero row")
        if m < n:
            raise RankDeficient(f"m={m} < n={n}")
        R = qr(A, mode="r", pivoting=True)[0]
        tol = RANK_RTOL * np.linalg.norm(A, 2)
        rank = int(np.sum(np.abs(np.diag(R)) > tol))
        if rank < n:
            raise RankDeficient(f"rank(A)={rank} < n={n}")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

        if self.interior_point is not None:
            x0 = np.array(self.interior_point, dtype=float).reshape(-1)
            if x0.shape != (n,) or not np.all(A @ x0 - b > 0):
                raise InfeasibleInterior("supplied interior point is not strictly interior")
        else:
            x0 = _phase_one(A, b)
        x0.setflags(write=False)
        object.__setattr__(self, "interior_point", x0)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def __repr__(self):
        return f"Polytope(m={self.m}, n={self.n})"


def slacks(P: Polytope, x) -> np.ndarray:
    """Return ``A x - b``. Negative entries are returned as-is."""
    return P.A @ np.asarray(x, dtype=float) - P.b


def contains_strictly(P: Polytope, x, margin: float = 0.0) -> bool:
    return bool(np.min(slacks(P, x)) > margin)


# ---------------------------------------------------------------------------
# Interior points


def _newton_barrier(A, b, x, max_iters=200, tol=1e-8):
    """Damped Newton on -sum log(Ax - b) from a strictly interior ``x``.

    Returns ``(x, converged)`` where convergence means the Newton decrement
    (the gradient's dual local norm) fell below ``tol``.
    """
    for _ in range(max_iters):
        s = A @ x - b
        Ax = A / s[:, None]
        grad = -Ax.sum(axis=0)
        H = Ax.T @ Ax
        try:
            L = np.linalg.cholesky(H)
        except np.linalg.LinAlgError:
            return x, False
        y = np.linalg.solve(L, grad)
        lam = float(np.linalg.norm(y))
        if lam <= tol:
            return x, True
        step = np.linalg.solve(L.T, y)
        # 1/(1+lam) keeps the iterate inside the Dikin ellipsoid
        x = x - step / (1.0 + lam) if lam > 0.25 else x - step
        if not np.all(A @ x - b > 0):
            return x, False
    s = A @ x - b
    Ax = A / s[:, None]
    grad = -Ax.sum(axis=0)
    lam = float(np.sqrt(grad @ np.linalg.solve(Ax.T @ Ax, grad)))
    return x, lam <= tol


def _phase_one(A, b, max_outer=30, max_inner=100):
    """Find x with A x > b by a barrier method on min t s.t. A x - b + t >= 0.

    Iterates stop as soon as the x-part is strictly interior.
    """
    m, n = A.shape
    # aim for unit slack in every row; exact when A is square
    x = np.linalg.lstsq(A, b + 1.0, rcond=None)[0]
    s = A @ x - b
    if np.all(s > 0):
        return x
    t = max(0.0, -float(s.min())) + 1.0
    z = np.concatenate([x, [t]])
    Ae = np.hstack([A, np.ones((m, 1))])
    mu = float(m)
    for _ in range(max_outer):
        c = np.zeros(n + 1)
        c[-1] = mu
        for _ in range(max_inner):
            r = Ae @ z - b
            w = 1.0 / r
            grad = c - Ae.T @ w
            H = (Ae * (w * w)[:, None]).T @ Ae
            try:
                step = np.linalg.solve(H, grad)
            except np.linalg.LinAlgError:
                raise InfeasibleInterior("phase-I Hessian is singular")
            lam = float(np.sqrt(max(grad @ step, 0.0)))
            z = z - step / (1.0 + lam)
            if np.all(A @ z[:n] - b > 0):
                return z[:n].copy()
            if lam < 1e-6:
                break
        mu *= 10.0
        if mu > 1e14:
            break
    raise InfeasibleInterior("no strictly interior point found")


def analytic_center(P: Polytope, max_iters: int = 200) -> np.ndarray:
    """Minimizer of the log barrier, to a Newton decrement of 1e-8."""
    x, ok = _newton_barrier(P.A, P.b, np.array(P.interior_point), max_iters=max_iters)
    if not ok or not np.all(P.A @ x - P.b > 0):
        raise NoInteriorPoint("damped Newton did not converge to the analytic center")
    return x


# ---------------------------------------------------------------------------
# Fixtures


def make_hypercube(n: int, lo: float = 0.0, hi: float = 1.0) -> Polytope:
    """Box [lo, hi]^n with rows ordered (e_1, -e_1, e_2, -e_2, ...)."""
    if n < 1 or not lo < hi:
        raise InvalidDimension(f"bad hypercube n={n}, lo={lo}, hi={hi}")
    A = np.zeros((2 * n, n))
    b = np.zeros(2 * n)
    for i in range(n):
        A[2 * i, i] = 1.0
        A[2 * i + 1, i] = -1.0
        b[2 * i] = lo
        b[2 * i + 1] = -hi
    return Polytope(A, b, interior_point=np.full(n, 0.5 * (lo + hi)))


def make_simplex(n: int) -> Polytope:
    """Standard simplex {x >= 0, sum x <= 1}."""
    if n < 1:
        raise InvalidDimension(f"bad simplex dimension n={n}")
    A = np.vstack([np.eye(n), -np.ones((1, n))])
    b = np.concatenate([np.zeros(n), [-1.0]])
    return Polytope(A, b, interior_point=np.full(n, 1.0 / (n + 1)))


def make_random(n: int, m: int, seed: int = 0) -> Polytope:
    """``m`` unit normals drawn uniformly from the sphere, all with b_i = -1.

    The unit ball is inscribed, so the origin has slack 1 in every row.
    """
    if n < 1 or m < n + 1:
        raise InvalidDimension(f"random polytope needs n >= 1 and m >= n+1, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    A /= np.linalg.norm(A, axis=1, keepdims=True)
    return Polytope(A, -np.ones(m), interior_point=np.zeros(n))


# ---------------------------------------------------------------------------
# Text format


def parse_polytope(text: str) -> Polytope:
    """Parse the ``m n`` header followed by ``m`` rows of ``a_i1 .. a_in b_i``.

    Blank lines and lines starting with ``#`` are ignored.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty polytope description")
    header = lines[0].split()
    if len(header) != 2:
        raise ParseError(f"header must be 'm n', got {lines[0]!r}")
    try:
        m, n = int(header[0]), int(header[1])
    except ValueError as exc:
        raise ParseError(f"bad header {lines[0]!r}") from exc
    if m < 1 or n < 1:
        raise ParseError(f"header dimensions must be positive, got m={m}, n={n}")
    rows = lines[1:]
    if len(rows) != m:
        raise ParseError(f"expected {m} constraint rows, found {len(rows)}")
    data = np.empty((m, n + 1))
    for i, row in enumerate(rows):
        tokens = row.split()
        if len(tokens) != n + 1:
            raise ParseError(f"row {i + 1}: expected {n + 1} numbers, found {len(tokens)}")
        try:
            data[i] = [float(t) for t in tokens]
        except ValueError as exc:
            raise ParseError(f"row {i + 1}: {exc}") from exc
    return Polytope(data[:, :n], data[:, n])


def format_polytope(P: Polytope) -> str:
    out = [f"{P.m} {P.n}"]
    for a_i, b_i in zip(P.A, P.b):
        out.append(" ".join(f"{v:.17g}" for v in (*a_i, b_i)))
    return "\n".join(out) + "\n"


def load_polytope(path) -> Polytope:
    with open(path, encoding="utf-8") as fh:
        return parse_polytope(fh.read())


def parse_builtin(spec: str) -> Polytope:
    """Build a fixture from ``hypercube:n:lo:hi``, ``simplex:n`` or ``random:n:m:seed``."""
    parts = spec.strip().split(":")
    kind, args = parts[0].lower(), parts[1:]
    try:
        if kind == "hypercube" and len(args) in (1, 3):
            n = int(args[0])
            lo, hi = (float(args[1]), float(args[2])) if len(args) == 3 else (0.0, 1.0)
            return make_hypercube(n, lo, hi)
        if kind == "simplex" and len(args) == 1:
            return make_simplex(int(args[0]))
        if kind == "random" and len(args) in (2, 3):
            seed = int(args[2]) if len(args) == 3 else 0
            return make_random(int(args[0]), int(args[1]), seed)
    except ValueError as exc:
        raise ParseError(f"bad builtin spec {spec!r}: {exc}") from exc
    raise ParseError(f"unknown builtin spec {spec!r}")
