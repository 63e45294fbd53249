"""Executable structural checks for the integrators and statistical checks for chains."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammainc

from rhmc_polytope.barrier import (
    MetricState,
    apply_metric,
    dg_bilinear,
    local_norm_u,
    local_norm_v,
    metric_state,
    solve_metric,
)
from rhmc_polytope.errors import DomainError, InsufficientSamples
from rhmc_polytope.hamiltonian import (
    PhaseState,
    TargetDensity,
    dH1_dx,
    dH2_dx,
    dH_dv,
    hamiltonian,
)
from rhmc_polytope.integrators import (
    IntegratorConfig,
    IntegratorKind,
    reference_flow,
    step,
)
from rhmc_polytope.polytope import Polytope, make_random, make_simplex, make_hypercube

MIN_SAMPLES = 100


# ---------------------------------------------------------------------------
# Reports


def inputs_digest(inputs) -> str:
    blob = json.dumps(inputs, sort_keys=True, default=_jsonable)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    return str(obj)


@dataclass
class DiagnosticResult:
    check_name: str
    inputs: dict
    values: dict
    threshold: object
    passed: bool

    def to_dict(self) -> dict:
        return json.loads(json.dumps({
            "check_name": self.check_name,
            "inputs_digest": inputs_digest(self.inputs),
            "inputs": self.inputs,
            "values": self.values,
            "threshold": self.threshold,
            "pass": bool(self.passed),
        }, default=_jsonable))


# ---------------------------------------------------------------------------
# Integrator structure


def reversibility_residual(P: Polytope, target: TargetDensity, state: PhaseState, cfg: IntegratorConfig):
    """Step forward, flip velocity, step again, flip back.

    Returns ``(res_x, res_v)`` in ``|.|_{g(x)}`` and ``|.|_{g(x)^{-1}}``.
    """
    x, v = np.asarray(state.x, dtype=float), np.asarray(state.v, dtype=float)
    fwd, _ = step(P, target, PhaseState(x, v), cfg)
    back, _ = step(P, target, PhaseState(fwd.x, -fwd.v), cfg)
    M = metric_state(P, x)
    return local_norm_u(M, back.x - x), local_norm_v(M, -back.v - v)


def energy_error(P: Polytope, target: TargetDensity, state: PhaseState, cfg: IntegratorConfig) -> float:
    x, v = np.asarray(state.x, dtype=float), np.asarray(state.v, dtype=float)
    out, _ = step(P, target, PhaseState(x, v), cfg)
    H0 = hamiltonian(metric_state(P, x), target, v)
    H1 = hamiltonian(metric_state(P, out.x), target, out.v)
    return abs(H1 - H0)


@dataclass
class OrderFit:
    h: np.ndarray
    position_errors: np.ndarray
    velocity_errors: np.ndarray
    energy_errors: np.ndarray
    slope_x: float
    slope_E: float
    c_x: float
    c_v: float

    def __iter__(self):
        # unpacks as (slope_x, slope_E)
        return iter((self.slope_x, self.slope_E))


def loglog_slope(h, err) -> float:
    h, err = np.asarray(h, dtype=float), np.asarray(err, dtype=float)
    return float(np.polyfit(np.log(h), np.log(err), 1)[0])


def order_fit(P: Polytope, target: TargetDensity, state: PhaseState, h_list: Sequence[float], cfg: IntegratorConfig) -> OrderFit:
    """Errors of one integrator step against the reference flow over a step grid.

    Slopes are least-squares fits in log-log coordinates; they are NaN when
    ``cfg`` is itself the reference integrator (the comparison is then a
    self-consistency check only).
    """
    hs = np.asarray(sorted(h_list, reverse=True), dtype=float)
    if hs.size < 3:
        raise ValueError("order_fit needs at least three step sizes")
    x, v = np.asarray(state.x, dtype=float), np.asarray(state.v, dtype=float)
    M = metric_state(P, x)
    H0 = hamiltonian(M, target, v)
    ex, ev, eE = [], [], []
    for h in hs:
        c = cfg.with_step(float(h))
        out, _ = step(P, target, PhaseState(x, v), c)
        ref = reference_flow(P, target, PhaseState(x, v), c)
        ex.append(local_norm_u(M, out.x - ref.x))
        ev.append(local_norm_v(M, out.v - ref.v))
        eE.append(abs(hamiltonian(metric_state(P, out.x), target, out.v) - H0))
    ex, ev, eE = np.array(ex), np.array(ev), np.array(eE)
    if cfg.kind is IntegratorKind.REFERENCE:
        sx = sE = float("nan")
    else:
        sx = loglog_slope(hs, ex)
        sE = loglog_slope(hs, eE)
    return OrderFit(hs, ex, ev, eE, sx, sE, float(np.max(ex / hs**2)), float(np.max(ev / hs**2)))


def phase_jacobian(P: Polytope, target: TargetDensity, state: PhaseState, cfg: IntegratorConfig, eps_fd: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of (x, v) -> one integrator step, shape (2n, 2n)."""
    z = np.concatenate([state.x, state.v]).astype(float)
    n = z.size // 2
    J = np.empty((2 * n, 2 * n))
    for j in range(2 * n):
        zp, zm = z.copy(), z.copy()
        zp[j] += eps_fd
        zm[j] -= eps_fd
        op, _ = step(P, target, PhaseState(zp[:n], zp[n:]), cfg)
        om, _ = step(P, target, PhaseState(zm[:n], zm[n:]), cfg)
        J[:, j] = (np.concatenate([op.x, op.v]) - np.concatenate([om.x, om.v])) / (2 * eps_fd)
    return J


def measure_preservation(P, target, state, cfg, eps_fd: float = 1e-6) -> float:
    """det of the finite-difference phase-space Jacobian (1 for a volume-preserving map)."""
    return float(np.linalg.det(phase_jacobian(P, target, state, cfg, eps_fd)))


def jacobian_sensitivity(P: Polytope, target: TargetDensity, state: PhaseState, cfg: IntegratorConfig, eps_fd: Optional[float] = None):
    """Compare det(d xbar / d v) with h^n / sqrt(|g(x)| |g(xbar)|).

    Returns ``(det_fd, bound, ratio)``. The bound is assembled from Cholesky
    log-determinants, so it stays finite where raw determinants under- or
    overflow.
    """
    x, v = np.asarray(state.x, dtype=float), np.asarray(state.v, dtype=float)
    n = x.size
    M = metric_state(P, x)
    if eps_fd is None:
        eps_fd = 1e-6 * (1.0 + local_norm_v(M, v))
    J = np.empty((n, n))
    for j in range(n):
        vp, vm = v.copy(), v.copy()
        vp[j] += eps_fd
        vm[j] -= eps_fd
        op, _ = step(P, target, PhaseState(x, vp), cfg)
        om, _ = step(P, target, PhaseState(x, vm), cfg)
        J[:, j] = (op.x - om.x) / (2 * eps_fd)
    out, _ = step(P, target, PhaseState(x, v), cfg)
    M1 = metric_state(P, out.x)
    sign, logabs = np.linalg.slogdet(J)
    log_bound = n * math.log(cfg.step_size) - 0.5 * (M.logdet + M1.logdet)
    det_fd = float(sign * math.exp(logabs)) if sign != 0 else 0.0
    ratio = float(sign * math.exp(logabs - log_bound)) if sign != 0 else 0.0
    return det_fd, math.exp(log_bound), ratio


# ---------------------------------------------------------------------------
# Trajectory regularity and the good region


@dataclass
class TrajectoryRecord:
    nodes: List[Tuple[float, np.ndarray, np.ndarray]]
    h: float

    def __post_init__(self):
        ts = [t for t, _, _ in self.nodes]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise ValueError("trajectory times must be nondecreasing")
        if any(t < 0 or t > self.h + 1e-15 for t in ts):
            raise ValueError("trajectory times must lie in [0, h]")


def trajectory_record(P: Polytope, target: TargetDensity, state: PhaseState, cfg: IntegratorConfig) -> TrajectoryRecord:
    """Run one step and collect its intermediate points as a trajectory."""
    _, info = step(P, target, state, cfg)
    nodes = [(t, x, v) for t, (x, v) in zip(info.times, info.intermediate_points)]
    return TrajectoryRecord(nodes, cfg.step_size)


def default_m1(P: Polytope, target: TargetDensity, x0) -> float:
    """max(n, |alpha|^2_{g(x0)^{-1}}) at the trajectory start."""
    M = metric_state(P, x0)
    return max(float(P.n), local_norm_v(M, target.alpha) ** 2)


def regularity(P: Polytope, traj: TrajectoryRecord, M1: float) -> float:
    """Symmetric auxiliary function: weighted 2/4/inf norms of s_v along the path.

    s_v = S_x^{-1} A dx/dt with dx/dt = g(x)^{-1} v at each node.
    """
    n = P.n
    if n < 2:
        raise DomainError("regularity needs n >= 2 (log n appears in a denominator)")
    if M1 < n:
        raise DomainError(f"M1 must be >= n, got {M1}")
    q = M1 ** 0.25
    d2 = math.sqrt(n) + 2.0 * q
    d4 = 2.0 * q
    dinf = math.sqrt(math.log(n)) + 2.0 * traj.h * math.sqrt(M1)
    best = 0.0
    for _, x, v in traj.nodes:
        M = metric_state(P, x)
        sv = M.Ax_scaled @ solve_metric(M, v)
        val = (
            np.linalg.norm(sv, 2) / d2
            + np.linalg.norm(sv, 4) / d4
            + np.linalg.norm(sv, np.inf) / dinf
        )
        best = max(best, float(val))
    return best


def good_region_check(M: MetricState, alpha, n: int, rho: float):
    """Returns ``(|alpha|^2_{g^{-1}}, value <= 10 n^2 log^2(1/rho))``."""
    if not 0 < rho < 1:
        raise DomainError("rho must lie in (0, 1)")
    value = local_norm_v(M, np.asarray(alpha, dtype=float)) ** 2
    return value, bool(value <= 10.0 * n * n * math.log(1.0 / rho) ** 2)


# ---------------------------------------------------------------------------
# Self-concordance and Hamiltonian partial-derivative inequalities


def _random_interior(P, rng, hops=3):
    """Random point reached by a few Dikin-ellipsoid hops from the witness."""
    x = np.array(P.interior_point)
    for _ in range(hops):
        M = metric_state(P, x)
        d = rng.standard_normal(P.n)
        d *= rng.uniform(0.0, 0.9) / local_norm_u(M, d)
        x = x + d
    return x


def self_concordance_margins(P: Polytope, x, y, v, w) -> dict:
    """Slack (rhs - lhs) of each inequality; non-negative means satisfied.

    Items: metric sandwich between x and y (both sides, direction ``w``),
    ``|Dg[v,v]|* <= 2|v|^2``, and
    ``|Dg[v,v] - Dg[w,w]|* <= 2|v-w||v+w|``, all in local norms at ``x``.
    """
    Mx, My = metric_state(P, x), metric_state(P, y)
    r = local_norm_u(Mx, y - x)
    if not r < 1:
        raise DomainError(f"y must be within the unit Dikin ellipsoid of x (r={r})")
    wx = w @ apply_metric(Mx, w)
    wy = w @ apply_metric(My, w)
    dvv = dg_bilinear(Mx, v)
    dww = dg_bilinear(Mx, w)
    nv, nw = local_norm_u(Mx, v), local_norm_u(Mx, w)
    return {
        "sandwich_lower": wy - (1 - r) ** 2 * wx,
        "sandwich_upper": wx / (1 - r) ** 2 - wy,
        "dg_bound": 2 * nv**2 - local_norm_v(Mx, dvv),
        "dg_difference": 2 * local_norm_u(Mx, v - w) * local_norm_u(Mx, v + w)
        - local_norm_v(Mx, dvv - dww),
        "r": r,
        "scale": max(wx, nv**2, nw**2, 1.0),
    }


def hamiltonian_bound_margins(M: MetricState, target: TargetDensity, v) -> dict:
    nv = local_norm_v(M, v)
    return {
        "dH1_dx": local_norm_v(M, target.alpha) + M.n - local_norm_v(M, dH1_dx(M, target)),
        "dH_dv": nv - local_norm_u(M, dH_dv(M, v)),
        "dH2_dx": nv**2 - local_norm_v(M, dH2_dx(M, v)),
    }


def random_fixture(rng: np.random.Generator) -> Polytope:
    kind = rng.integers(3)
    n = int(rng.integers(2, 7))
    if kind == 0:
        return make_hypercube(n, -float(rng.uniform(0.5, 2)), float(rng.uniform(0.5, 2)))
    if kind == 1:
        return make_simplex(n)
    return make_random(n, int(rng.integers(n + 1, 4 * n + 2)), int(rng.integers(1 << 30)))


def self_concordance_battery(draws: int = 1000, seed: int = 0, slack: float = 1e-9) -> DiagnosticResult:
    """Random (polytope, x, y, v, w) draws against the self-concordance inequalities.

    Vectors are normalized to unit local norm at ``x`` (``v`` then rescaled by
    a random factor) so the additive slack is meaningful.
    """
    rng = np.random.default_rng(seed)
    worst = {"sandwich_lower": np.inf, "sandwich_upper": np.inf, "dg_bound": np.inf, "dg_difference": np.inf}
    failures = 0
    for _ in range(draws):
        P = random_fixture(rng)
        x = _random_interior(P, rng)
        Mx = metric_state(P, x)
        d = rng.standard_normal(P.n)
        y = x + d * rng.uniform(0.0, 0.95) / local_norm_u(Mx, d)
        v = rng.standard_normal(P.n)
        v *= rng.uniform(0.0, 2.0) / local_norm_u(Mx, v)
        w = rng.standard_normal(P.n)
        w /= local_norm_u(Mx, w)
        m = self_concordance_margins(P, x, y, v, w)
        bad = False
        for key in worst:
            worst[key] = min(worst[key], m[key])
            bad |= m[key] < -slack
        failures += int(bad)
    return DiagnosticResult(
        "self_concordance",
        {"draws": draws, "seed": seed},
        {"worst_margin": worst, "failures": failures},
        slack,
        failures == 0,
    )


def hamiltonian_bounds_battery(draws: int = 1000, seed: int = 0, slack: float = 1e-9) -> DiagnosticResult:
    rng = np.random.default_rng(seed)
    worst = {"dH1_dx": np.inf, "dH_dv": np.inf, "dH2_dx": np.inf}
    failures = 0
    for _ in range(draws):
        P = random_fixture(rng)
        x = _random_interior(P, rng)
        M = metric_state(P, x)
        target = TargetDensity(rng.standard_normal(P.n) * rng.uniform(0, 5))
        v = rng.standard_normal(P.n)
        v *= rng.uniform(0.0, 2.0) / local_norm_v(M, v)
        m = hamiltonian_bound_margins(M, target, v)
        bad = False
        for key in worst:
            worst[key] = min(worst[key], m[key])
            bad |= m[key] < -slack
        failures += int(bad)
    return DiagnosticResult(
        "hamiltonian_bounds",
        {"draws": draws, "seed": seed},
        {"worst_margin": worst, "failures": failures},
        slack,
        failures == 0,
    )


# ---------------------------------------------------------------------------
# Chain statistics


@dataclass
class EssReport:
    ess: np.ndarray
    degenerate: np.ndarray


def _autocorr(x: np.ndarray) -> np.ndarray:
    k = x.size
    size = 1 << (2 * k - 1).bit_length()
    f = np.fft.rfft(x, size)
    ac = np.fft.irfft(f * np.conj(f), size)[:k] / k
    return ac / ac[0]


def _ess_1d(x: np.ndarray) -> Tuple[float, bool]:
    k = x.size
    xc = x - x.mean()
    if not np.any(xc) or xc @ xc <= 1e-300:
        return 1.0, True
    rho = _autocorr(xc)
    # Geyer initial positive sequence on consecutive pairs
    tau = -1.0
    for t in range(0, k - 1, 2):
        pair = rho[t] + rho[t + 1]
        if pair <= 0:
            break
        tau += 2.0 * pair
    return k / tau, False


def effective_sample_size(samples) -> EssReport:
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.shape[0] < MIN_SAMPLES:
        raise InsufficientSamples(f"need at least {MIN_SAMPLES} samples, got {samples.shape[0]}")
    out = [_ess_1d(samples[:, j]) for j in range(samples.shape[1])]
    return EssReport(np.array([e for e, _ in out]), np.array([d for _, d in out]))


def ess(samples) -> np.ndarray:
    """Per-coordinate effective sample size (Geyer initial positive sequence)."""
    return effective_sample_size(samples).ess


def truncated_exponential_moments(a: float, lo: float, hi: float):
    """Mean, variance and fourth central moment of density ~ exp(-a t) on [lo, hi]."""
    L = hi - lo
    if abs(a) * L < 1e-8:
        return 0.5 * (lo + hi), L * L / 12.0, L**4 / 80.0
    b = abs(a)
    bl = b * L
    # offset from the end where the density is largest
    m1 = 1.0 / b - L / math.expm1(bl)
    var = 1.0 / b**2 - L * L * math.exp(-bl) / (-math.expm1(-bl)) ** 2
    p1 = gammainc(1, bl)
    raw = [1.0] + [math.factorial(k) / b**k * gammainc(k + 1, bl) / p1 for k in range(1, 5)]
    mu4 = raw[4] - 4 * m1 * raw[3] + 6 * m1**2 * raw[2] - 3 * m1**4
    mean = lo + m1 if a > 0 else hi - m1
    return mean, var, mu4


@dataclass
class MomentReport:
    target_mean: np.ndarray
    target_var: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    ess: np.ndarray
    z_mean: np.ndarray
    z_var: np.ndarray
    rel_var_error: np.ndarray

    def to_dict(self) -> dict:
        return {k: getattr(self, k).tolist() for k in self.__dataclass_fields__}


def moment_test_box(samples, alpha, lo: float, hi: float) -> MomentReport:
    """z-scores of empirical means and variances against exact box moments.

    Standard errors use the per-coordinate ESS.
    """
    samples = np.asarray(samples, dtype=float)
    rep = effective_sample_size(samples)
    alpha = np.broadcast_to(np.asarray(alpha, dtype=float), (samples.shape[1],))
    mom = np.array([truncated_exponential_moments(a, lo, hi) for a in alpha])
    tm, tv, t4 = mom[:, 0], mom[:, 1], mom[:, 2]
    mean = samples.mean(axis=0)
    var = samples.var(axis=0, ddof=1)
    e = rep.ess
    z_mean = (mean - tm) / np.sqrt(tv / e)
    z_var = (var - tv) / np.sqrt((t4 - tv**2) / e)
    return MomentReport(tm, tv, mean, var, e, z_mean, z_var, (var - tv) / tv)
