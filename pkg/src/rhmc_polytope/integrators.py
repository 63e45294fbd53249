"""One-step maps for the Riemannian Hamiltonian flow on a polytope.

Two symmetric, symplectic integrators with implicit stages solved by plain
fixed-point iteration:

* implicit midpoint with an explicit H1 half-kick on either side (``imm_step``),
* generalized leapfrog / Stormer-Verlet (``leapfrog_step``),

plus a classical RK4 ``reference_flow`` with a Richardson self-check that is
used as the exact-flow oracle.

Fixed-point convergence is measured at the step's start point ``x``: position
increments in ``|.|_{g(x)}``, velocity increments in ``|.|_{g(x)^{-1}}``. Any
iterate that leaves the interior aborts the step with
:class:`FixedPointDivergence`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import List, Tuple

import numpy as np

from rhmc_polytope import _kernels as _k
from rhmc_polytope.barrier import (
    MetricState,
    dg_bilinear,
    local_norm_u,
    local_norm_v,
    metric_state,
    solve_metric,
)
from rhmc_polytope.errors import (
    FactorizationFailure,
    FixedPointDivergence,
    NotInterior,
    OracleNotConverged,
)
from rhmc_polytope.hamiltonian import PhaseState, TargetDensity, dH1_dx, dH2_dx
from rhmc_polytope.polytope import Polytope


class IntegratorKind(str, enum.Enum):
    IMM = "imm"
    LEAPFROG = "leapfrog"
    REFERENCE = "reference"


@dataclass(frozen=True)
class IntegratorConfig:
    kind: IntegratorKind = IntegratorKind.IMM
    step_size: float = 0.01
    fp_tolerance: float = 1e-10
    fp_max_iters: int = 50
    reference_substeps: int = 256
    richardson_tol: float = 1e-9
    backend: str = "numba"

    def __post_init__(self):
        object.__setattr__(self, "kind", IntegratorKind(self.kind))
        if self.backend not in ("numba", "numpy"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if not self.step_size >= 0:
            raise ValueError(f"step_size must be non-negative, got {self.step_size}")
        if not self.fp_tolerance > 0:
            raise ValueError("fp_tolerance must be positive")
        if self.fp_max_iters < 1:
            raise ValueError("fp_max_iters must be >= 1")
        if self.reference_substeps < 16:
            raise ValueError("reference_substeps must be >= 16")

    def with_step(self, h: float) -> "IntegratorConfig":
        return replace(self, step_size=h)


@dataclass
class StepInfo:
    """Bookkeeping for a single integrator step.

    ``intermediate_points`` are the (x, v) pairs visited, with matching
    integration times in ``times``.
    """

    fp_iters_used: int = 0
    converged: bool = True
    intermediate_points: List[Tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    times: List[float] = field(default_factory=list)

    def add(self, t, x, v):
        self.intermediate_points.append((x, v))
        self.times.append(t)


def _interior_state(P, x) -> MetricState:
    try:
        return metric_state(P, x)
    except (NotInterior, FactorizationFailure) as exc:
        raise FixedPointDivergence(f"iterate left the interior: {exc}") from exc


def imm_step(P: Polytope, target: TargetDensity, state: PhaseState, cfg: IntegratorConfig):
    """Implicit midpoint on H2 sandwiched between two explicit H1 half-kicks.

    Step 1 kicks v by -h/2 dH1/dx(x). Step 2 solves
    x' = x + h dH2/dv(mid), v' = v - h dH2/dx(mid) at the phase-space midpoint
    by fixed-point iteration from (x, v). Step 3 kicks by -h/2 dH1/dx(x').
    Returns ``(PhaseState, StepInfo)``.
    """
    if cfg.backend == "numba":
        return _imm_compiled(P, target, state, cfg)
    return _imm_numpy(P, target, state, cfg)


def _imm_numpy(P, target, state, cfg):
    h = cfg.step_size
    x, v = np.asarray(state.x, dtype=float), np.asarray(state.v, dtype=float)
    M0 = metric_state(P, x)
    info = StepInfo()
    info.add(0.0, x, v)
    if h == 0:
        return PhaseState(x.copy(), v.copy()), info

    v13 = v - 0.5 * h * dH1_dx(M0, target)
    info.add(0.0, x, v13)
    x23, v23 = x, v13
    tol = cfg.fp_tolerance
    for it in range(1, cfg.fp_max_iters + 1):
        Mm = _interior_state(P, 0.5 * (x + x23))
        u = solve_metric(Mm, 0.5 * (v13 + v23))
        x_new = x + h * u
        v_new = v13 + 0.5 * h * dg_bilinear(Mm, u)
        dx = local_norm_u(M0, x_new - x23)
        dv = local_norm_v(M0, v_new - v23)
        x23, v23 = x_new, v_new
        if not (np.isfinite(dx) and np.isfinite(dv)):
            raise FixedPointDivergence("non-finite fixed-point iterate")
        if dx <= tol and dv <= tol:
            info.fp_iters_used = it
            break
    else:
        info.fp_iters_used = cfg.fp_max_iters
        info.converged = False
        raise FixedPointDivergence(
            f"implicit midpoint did not converge in {cfg.fp_max_iters} iterations"
        )
    info.add(0.5 * h, 0.5 * (x + x23), 0.5 * (v13 + v23))
    info.add(h, x23, v23)

    M1 = _interior_state(P, x23)
    v1 = v23 - 0.5 * h * dH1_dx(M1, target)
    info.add(h, x23, v1)
    return PhaseState(x23, v1), info


def leapfrog_step(P: Polytope, target: TargetDensity, state: PhaseState, cfg: IntegratorConfig):
    """Generalized leapfrog: implicit half-kick, implicit drift, explicit half-kick.

    Returns ``(PhaseState, StepInfo)``; ``fp_iters_used`` counts the
    iterations of both implicit stages together.
    """
    if cfg.backend == "numba":
        return _leapfrog_compiled(P, target, state, cfg)
    return _leapfrog_numpy(P, target, state, cfg)


def _leapfrog_numpy(P, target, state, cfg):
    h = cfg.step_size
    x, v = np.asarray(state.x, dtype=float), np.asarray(state.v, dtype=float)
    M0 = metric_state(P, x)
    info = StepInfo()
    info.add(0.0, x, v)
    if h == 0:
        return PhaseState(x.copy(), v.copy()), info

    tol = cfg.fp_tolerance
    kick0 = v - 0.5 * h * dH1_dx(M0, target)
    v_half = v
    for it in range(1, cfg.fp_max_iters + 1):
        v_new = kick0 - 0.5 * h * dH2_dx(M0, v_half)
        dv = local_norm_v(M0, v_new - v_half)
        v_half = v_new
        if not np.isfinite(dv):
            raise FixedPointDivergence("non-finite velocity iterate")
        if dv <= tol:
            iters = it
            break
    else:
        raise FixedPointDivergence(f"leapfrog kick did not converge in {cfg.fp_max_iters} iterations")
    info.add(0.0, x, v_half)

    u0 = solve_metric(M0, v_half)
    x1 = x + h * u0
    for it in range(1, cfg.fp_max_iters + 1):
        M1 = _interior_state(P, x1)
        x_new = x + 0.5 * h * (u0 + solve_metric(M1, v_half))
        dx = local_norm_u(M0, x_new - x1)
        x1 = x_new
        if not np.isfinite(dx):
            raise FixedPointDivergence("non-finite position iterate")
        if dx <= tol:
            iters += it
            break
    else:
        raise FixedPointDivergence(f"leapfrog drift did not converge in {cfg.fp_max_iters} iterations")
    info.fp_iters_used = iters
    info.add(h, x1, v_half)

    M1 = _interior_state(P, x1)
    v1 = v_half - 0.5 * h * (dH1_dx(M1, target) + dH2_dx(M1, v_half))
    info.add(h, x1, v1)
    return PhaseState(x1, v1), info


def _raise_for(status, iters, name):
    if status == _k.NOT_INTERIOR:
        raise NotInterior("start point is not strictly interior")
    if status == _k.NO_CONVERGENCE:
        raise FixedPointDivergence(f"{name} did not converge in {iters} iterations")
    if status == _k.NONFINITE:
        raise FixedPointDivergence("non-finite fixed-point iterate")
    raise FixedPointDivergence("iterate left the interior")


def _prepare(P, target, state):
    x = np.ascontiguousarray(state.x, dtype=float)
    v = np.ascontiguousarray(state.v, dtype=float)
    return x, v, np.ascontiguousarray(target.alpha, dtype=float)


def _imm_compiled(P, target, state, cfg):
    x, v, alpha = _prepare(P, target, state)
    h = cfg.step_size
    info = StepInfo()
    info.add(0.0, x, v)
    if h == 0:
        metric_state(P, x)
        return PhaseState(x.copy(), v.copy()), info
    status, iters, v13, x23, v23, v1 = _k.imm(P.A, P.b, alpha, x, v, h, cfg.fp_tolerance, cfg.fp_max_iters)
    info.fp_iters_used = iters
    if status != _k.OK:
        info.converged = False
        _raise_for(status, iters, "implicit midpoint")
    info.add(0.0, x, v13)
    info.add(0.5 * h, 0.5 * (x + x23), 0.5 * (v13 + v23))
    info.add(h, x23, v23)
    info.add(h, x23, v1)
    return PhaseState(x23, v1), info


def _leapfrog_compiled(P, target, state, cfg):
    x, v, alpha = _prepare(P, target, state)
    h = cfg.step_size
    info = StepInfo()
    info.add(0.0, x, v)
    if h == 0:
        metric_state(P, x)
        return PhaseState(x.copy(), v.copy()), info
    status, iters, v_half, x1, v1 = _k.leapfrog(P.A, P.b, alpha, x, v, h, cfg.fp_tolerance, cfg.fp_max_iters)
    info.fp_iters_used = iters
    if status != _k.OK:
        info.converged = False
        _raise_for(status, iters, "generalized leapfrog")
    info.add(0.0, x, v_half)
    info.add(h, x1, v_half)
    info.add(h, x1, v1)
    return PhaseState(x1, v1), info


def _vector_field(P, target, x, v):
    M = metric_state(P, x)
    u = solve_metric(M, v)
    return u, -(dH1_dx(M, target) - 0.5 * dg_bilinear(M, u))


def _rk4(P, target, x, v, h, substeps):
    dt = h / substeps
    for _ in range(substeps):
        k1x, k1v = _vector_field(P, target, x, v)
        k2x, k2v = _vector_field(P, target, x + 0.5 * dt * k1x, v + 0.5 * dt * k1v)
        k3x, k3v = _vector_field(P, target, x + 0.5 * dt * k2x, v + 0.5 * dt * k2v)
        k4x, k4v = _vector_field(P, target, x + dt * k3x, v + dt * k3v)
        x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return x, v


def _richardson(P, target, state, cfg):
    x, v = np.asarray(state.x, dtype=float), np.asarray(state.v, dtype=float)
    M0 = metric_state(P, x)
    h = cfg.step_size
    if h == 0:
        return x.copy(), v.copy(), 0.0, 0.0
    N = cfg.reference_substeps
    xc, vc = _rk4(P, target, x, v, h, N)
    xf, vf = _rk4(P, target, x, v, h, 2 * N)
    return xf, vf, local_norm_u(M0, xf - xc), local_norm_v(M0, vf - vc)


def richardson_gap(P: Polytope, target: TargetDensity, state: PhaseState, cfg: IntegratorConfig):
    """Endpoint change ``(dx, dv)`` when the RK4 substep count doubles, in local norms at the start."""
    return _richardson(P, target, state, cfg)[2:]


def reference_flow(P: Polytope, target: TargetDensity, state: PhaseState, cfg: IntegratorConfig) -> PhaseState:
    """High-accuracy approximation of the exact flow over time ``cfg.step_size``.

    Integrates with ``reference_substeps`` and twice as many RK4 substeps and
    returns the finer endpoint. Raises :class:`OracleNotConverged` if the two
    endpoints differ by more than ``richardson_tol`` in the local norms at the
    start point.
    """
    xf, vf, ex, ev = _richardson(P, target, state, cfg)
    if not (ex <= cfg.richardson_tol and ev <= cfg.richardson_tol):
        raise OracleNotConverged(
            f"RK4 substep doubling changed the endpoint by {ex:.2e} (x), {ev:.2e} (v)"
        )
    return PhaseState(xf, vf)


def reference_step(P: Polytope, target: TargetDensity, state: PhaseState, cfg: IntegratorConfig):
    out = reference_flow(P, target, state, cfg)
    info = StepInfo()
    info.add(0.0, np.asarray(state.x), np.asarray(state.v))
    info.add(cfg.step_size, out.x, out.v)
    return out, info


_STEPPERS = {
    IntegratorKind.IMM: imm_step,
    IntegratorKind.LEAPFROG: leapfrog_step,
    IntegratorKind.REFERENCE: reference_step,
}


def step(P: Polytope, target: TargetDensity, state: PhaseState, cfg: IntegratorConfig):
    """Dispatch to the integrator selected by ``cfg.kind``."""
    return _STEPPERS[cfg.kind](P, target, state, cfg)
