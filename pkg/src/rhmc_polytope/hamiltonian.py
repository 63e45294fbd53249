"""Riemannian Hamiltonian H(x, v) = f(x) + 1/2 v^T g(x)^{-1} v + 1/2 log det g(x).

The target density is exp(-alpha^T x) restricted to the polytope, so
f(x) = alpha^T x. The Hamiltonian is split as H = H1 + H2 with
H1 = f + 1/2 log det g (position only) and H2 = 1/2 v^T g^{-1} v.
Velocities are kept in Euclidean coordinates, v ~ N(0, g(x)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rhmc_polytope.barrier import (
    MetricState,
    dg_bilinear,
    grad_log_det,
    solve_metric,
)


@dataclass(frozen=True, eq=False)
class TargetDensity:
    """Density proportional to exp(-alpha^T x); alpha = 0 is uniform."""

    alpha: np.ndarray

    def __post_init__(self):
        a = np.array(self.alpha, dtype=float).reshape(-1)
        if not np.all(np.isfinite(a)):
            raise ValueError("alpha must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)

    @classmethod
    def uniform(cls, n: int) -> "TargetDensity":
        return cls(np.zeros(n))

    @property
    def n(self) -> int:
        return self.alpha.shape[0]

    @property
    def is_uniform(self) -> bool:
        return not np.any(self.alpha)


@dataclass(frozen=True, eq=False)
class PhaseState:
    x: np.ndarray
    v: np.ndarray


def hamiltonian(M: MetricState, target: TargetDensity, v) -> float:
    u = solve_metric(M, v)
    return float(target.alpha @ M.x + 0.5 * (v @ u) + 0.5 * M.logdet)


def potential(M: MetricState, target: TargetDensity) -> float:
    """H1(x) = alpha^T x + 1/2 log det g(x)."""
    return float(target.alpha @ M.x + 0.5 * M.logdet)


def dH1_dx(M: MetricState, target: TargetDensity) -> np.ndarray:
    return target.alpha + 0.5 * grad_log_det(M)


def dH2_dx(M: MetricState, v) -> np.ndarray:
    u = solve_metric(M, v)
    return -0.5 * dg_bilinear(M, u)


def dH_dv(M: MetricState, v) -> np.ndarray:
    return solve_metric(M, v)


def dH_dx(M: MetricState, target: TargetDensity, v) -> np.ndarray:
    return dH1_dx(M, target) + dH2_dx(M, v)


def sample_velocity(M: MetricState, rng: np.random.Generator) -> np.ndarray:
    """Draw v = L z with z standard normal (numpy's ziggurat sampler), so Cov(v) = g."""
    return M.chol @ rng.standard_normal(M.n)
