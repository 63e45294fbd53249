"""Discretized RHMC chain: velocity refresh, one integrator step, Metropolis filter."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from rhmc_polytope.barrier import local_norm_u, local_norm_v, metric_state
from rhmc_polytope.errors import (
    FactorizationFailure,
    FixedPointDivergence,
    NotInterior,
    OracleNotConverged,
)
from rhmc_polytope.hamiltonian import PhaseState, TargetDensity, hamiltonian, sample_velocity
from rhmc_polytope.integrators import IntegratorConfig, IntegratorKind, step
from rhmc_polytope.polytope import Polytope

# integrator failures that count as a rejected proposal
SOLVER_FAILURES = (FixedPointDivergence, NotInterior, FactorizationFailure, OracleNotConverged)

# runs whose solver-asymmetry rate exceeds this fraction of proposals are flagged
ASYMMETRY_FLAG_RATE = 1e-4


class StepPreset(str, enum.Enum):
    PAPER_IMM = "paper-imm"
    PAPER_LEAPFROG = "paper-leapfrog"
    PAPER_IDEAL = "paper-ideal"


def preset_step_size(preset, n: int, c: float, log_ratio: float) -> float:
    """Asymptotic step rules with an explicit constant ``c``.

    ``log_ratio`` is log(Lambda/eps). IMM and leapfrog use
    c / (n^{3/2} log_ratio); the ideal (exact-flow) chain uses
    c / (n^{7/12} sqrt(log_ratio)).
    """
    preset = StepPreset(preset)
    if n < 1 or c <= 0 or log_ratio <= 0:
        raise ValueError("preset step size needs n >= 1, c > 0 and log(Lambda/eps) > 0")
    if preset is StepPreset.PAPER_IDEAL:
        return c / (n ** (7.0 / 12.0) * math.sqrt(log_ratio))
    return c / (n ** 1.5 * log_ratio)


@dataclass(frozen=True)
class ChainConfig:
    integrator: IntegratorConfig
    steps: int
    burn_in: int = 0
    thin: int = 1
    seed: int = 0
    lazy: bool = False
    use_filter: bool = True
    step_preset: Optional[StepPreset] = None
    preset_c: float = 1.0
    preset_log_ratio: float = 1.0
    record_log: bool = False
    # run the reverse step every k-th successful proposal to detect solver asymmetry (0 = off)
    reversibility_check_every: int = 0

    def __post_init__(self):
        if self.steps < 0 or self.burn_in < 0:
            raise ValueError("steps and burn_in must be non-negative")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if not self.use_filter and self.integrator.kind is not IntegratorKind.REFERENCE:
            raise ValueError("the Metropolis filter may only be disabled with the reference integrator")
        if self.step_preset is not None:
            object.__setattr__(self, "step_preset", StepPreset(self.step_preset))

    def resolved_integrator(self, n: int) -> IntegratorConfig:
        if self.step_preset is None:
            return self.integrator
        h = preset_step_size(self.step_preset, n, self.preset_c, self.preset_log_ratio)
        return self.integrator.with_step(h)


class Outcome(str, enum.Enum):
    ACCEPT = "accept"
    REJECT_FILTER = "reject_filter"
    REJECT_SOLVER = "reject_solver"
    LAZY = "lazy"


@dataclass
class StepRecord:
    outcome: Outcome
    delta_h: float = float("nan")
    fp_iters: int = 0
    asymmetric: bool = False

    @property
    def accepted(self) -> bool:
        return self.outcome is Outcome.ACCEPT


@dataclass
class ChainStats:
    accepted: int = 0
    rejected_filter: int = 0
    rejected_solver: int = 0
    lazy_holds: int = 0
    mean_abs_energy_error: float = 0.0
    max_fp_iters: int = 0
    reversibility_checks: int = 0
    asymmetric: int = 0
    per_step_log: Optional[List[Tuple[float, bool, int]]] = None
    _energy_sum: float = field(default=0.0, repr=False)
    _energy_count: int = field(default=0, repr=False)

    @property
    def proposals(self) -> int:
        return self.accepted + self.rejected_filter + self.rejected_solver + self.lazy_holds

    @property
    def acceptance_rate(self) -> float:
        active = self.proposals - self.lazy_holds
        return self.accepted / active if active else float("nan")

    @property
    def asymmetry_flagged(self) -> bool:
        return self.asymmetric > ASYMMETRY_FLAG_RATE * max(self.proposals, 1)

    def update(self, rec: StepRecord):
        if rec.outcome is Outcome.ACCEPT:
            self.accepted += 1
        elif rec.outcome is Outcome.REJECT_FILTER:
            self.rejected_filter += 1
        elif rec.outcome is Outcome.REJECT_SOLVER:
            self.rejected_solver += 1
        else:
            self.lazy_holds += 1
        if np.isfinite(rec.delta_h):
            self._energy_sum += abs(rec.delta_h)
            self._energy_count += 1
            self.mean_abs_energy_error = self._energy_sum / self._energy_count
        self.max_fp_iters = max(self.max_fp_iters, rec.fp_iters)
        self.asymmetric += int(rec.asymmetric)
        if self.per_step_log is not None:
            self.per_step_log.append((rec.delta_h, rec.accepted, rec.fp_iters))

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected_filter": self.rejected_filter,
            "rejected_solver": self.rejected_solver,
            "lazy_holds": self.lazy_holds,
            "mean_abs_energy_error": self.mean_abs_energy_error,
            "max_fp_iters": self.max_fp_iters,
            "reversibility_checks": self.reversibility_checks,
            "asymmetric": self.asymmetric,
            "asymmetry_flagged": self.asymmetry_flagged,
        }


def metropolis_accept(delta_h: float, u: float) -> bool:
    """Log-domain filter: accept iff log u < -(H_new - H_old)."""
    if delta_h <= 0:
        return True
    return u > 0 and math.log(u) < -delta_h


def _reverse_is_consistent(P, target, x, v, prop, icfg) -> bool:
    try:
        back, _ = step(P, target, PhaseState(prop.x, -prop.v), icfg)
    except SOLVER_FAILURES:
        return False
    M = metric_state(P, x)
    tol = 10.0 * max(icfg.fp_tolerance, icfg.richardson_tol if icfg.kind is IntegratorKind.REFERENCE else 0.0)
    return local_norm_u(M, back.x - x) <= tol and local_norm_v(M, back.v + v) <= tol


def rhmc_step(
    P: Polytope,
    target: TargetDensity,
    x,
    cfg: ChainConfig,
    rng: np.random.Generator,
    *,
    check_reverse: bool = False,
):
    """One RHMC transition from ``x``. Returns ``(x_next, StepRecord)``.

    Integrator failures are rejections; only a non-interior ``x`` raises.
    """
    x = np.asarray(x, dtype=float)
    M = metric_state(P, x)
    if cfg.lazy and rng.random() < 0.5:
        return x, StepRecord(Outcome.LAZY)
    icfg = cfg.resolved_integrator(P.n)
    v = sample_velocity(M, rng)
    try:
        prop, info = step(P, target, PhaseState(x, v), icfg)
        M_new = metric_state(P, prop.x)
    except SOLVER_FAILURES:
        return x, StepRecord(Outcome.REJECT_SOLVER, fp_iters=icfg.fp_max_iters)
    delta_h = hamiltonian(M_new, target, prop.v) - hamiltonian(M, target, v)
    asym = check_reverse and not _reverse_is_consistent(P, target, x, v, prop, icfg)
    if not cfg.use_filter:
        return prop.x, StepRecord(Outcome.ACCEPT, delta_h, info.fp_iters_used, asym)
    u = rng.random()
    if metropolis_accept(delta_h, u):
        return prop.x, StepRecord(Outcome.ACCEPT, delta_h, info.fp_iters_used, asym)
    return x, StepRecord(Outcome.REJECT_FILTER, delta_h, info.fp_iters_used, asym)


def run_chain(P: Polytope, target: TargetDensity, x0, cfg: ChainConfig):
    """Run ``burn_in + steps`` transitions and keep every ``thin``-th post-burn-in state.

    Returns ``(samples, ChainStats)`` with ``samples`` of shape
    ``(steps // thin, n)``.
    """
    x = np.asarray(x0, dtype=float)
    metric_state(P, x)  # raises NotInterior for a bad start
    rng = np.random.default_rng(cfg.seed)
    stats = ChainStats(per_step_log=[] if cfg.record_log else None)
    samples = np.empty((cfg.steps // cfg.thin, P.n))
    k = 0
    every = cfg.reversibility_check_every
    successes = 0
    for i in range(cfg.burn_in + cfg.steps):
        check = False
        if every:
            check = successes % every == 0
        x, rec = rhmc_step(P, target, x, cfg, rng, check_reverse=check)
        if rec.outcome in (Outcome.ACCEPT, Outcome.REJECT_FILTER):
            if check:
                stats.reversibility_checks += 1
            successes += 1
        stats.update(rec)
        j = i - cfg.burn_in
        if j >= 0 and (j + 1) % cfg.thin == 0:
            samples[k] = x
            k += 1
    return samples, stats


def with_seed(cfg: ChainConfig, seed: int) -> ChainConfig:
    return replace(cfg, seed=seed)
