import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from conftest import random_state
from rhmc_polytope.barrier import metric_state
from rhmc_polytope.diagnostics import (
    DiagnosticResult,
    TrajectoryRecord,
    default_m1,
    effective_sample_size,
    energy_error,
    ess,
    good_region_check,
    hamiltonian_bounds_battery,
    inputs_digest,
    jacobian_sensitivity,
    moment_test_box,
    order_fit,
    regularity,
    reversibility_residual,
    self_concordance_battery,
    trajectory_record,
    truncated_exponential_moments,
)
from rhmc_polytope.errors import DomainError, InsufficientSamples
from rhmc_polytope.hamiltonian import PhaseState, TargetDensity, sample_velocity
from rhmc_polytope.integrators import IntegratorConfig
from rhmc_polytope.polytope import make_hypercube

KINDS = ["imm", "leapfrog"]


# -- reversibility, energy, order -------------------------------------------


@pytest.mark.parametrize("kind", KINDS + ["reference"])
def test_residual_zero_step(kind, box5, rng):
    assert reversibility_residual(box5, TargetDensity.uniform(5), random_state(box5, rng), IntegratorConfig(kind, 0.0)) == (0.0, 0.0)


@pytest.mark.parametrize("kind", KINDS)
def test_residual_tight_tolerance(kind, box5, rng):
    cfg = IntegratorConfig(kind, 0.02, fp_tolerance=1e-12)
    for _ in range(10):
        rx, rv = reversibility_residual(box5, TargetDensity(np.ones(5)), random_state(box5, rng), cfg)
        assert rx <= 1e-10 and rv <= 1e-10


def test_residual_reference(box2, rng):
    cfg = IntegratorConfig("reference", 0.02, reference_substeps=32)
    rx, rv = reversibility_residual(box2, TargetDensity([1.0, 0.5]), random_state(box2, rng), cfg)
    assert rx <= 1e-8 and rv <= 1e-8


def test_energy_error_small_for_reference(box2, rng):
    s = random_state(box2, rng)
    assert energy_error(box2, TargetDensity.uniform(2), s, IntegratorConfig("reference", 0.05, reference_substeps=32)) <= 1e-8


@pytest.mark.parametrize("kind", KINDS)
def test_order_fit_box(kind, box5):
    rng = np.random.default_rng(7)
    s = PhaseState(np.zeros(5), sample_velocity(metric_state(box5, np.zeros(5)), rng))
    fit = order_fit(box5, TargetDensity.uniform(5), s, [0.0125, 0.05, 0.025], IntegratorConfig(kind))
    slope_x, slope_E = fit
    assert slope_x >= 1.9
    assert slope_E >= 2.0
    np.testing.assert_array_equal(fit.h, [0.05, 0.025, 0.0125])
    assert fit.position_errors[0] / fit.position_errors[1] >= 3.5
    assert fit.c_x == pytest.approx(np.max(fit.position_errors / fit.h**2))


def test_order_fit_reference_is_self_consistent(box2, rng):
    s = random_state(box2, rng)
    fit = order_fit(box2, TargetDensity.uniform(2), s, [0.04, 0.02, 0.01], IntegratorConfig("reference", reference_substeps=32))
    assert math.isnan(fit.slope_x) and math.isnan(fit.slope_E)
    assert np.all(fit.position_errors <= 1e-9) and np.all(fit.velocity_errors <= 1e-9)


def test_order_fit_needs_three_steps(box2, rng):
    with pytest.raises(ValueError):
        order_fit(box2, TargetDensity.uniform(2), random_state(box2, rng), [0.1, 0.05], IntegratorConfig())


# -- sensitivity -------------------------------------------------------------


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("h", [0.01, 1e-3])
def test_sensitivity_box2_center(kind, h, box2):
    s = PhaseState(np.zeros(2), np.array([0.7, -0.4]))
    det_fd, bound, ratio = jacobian_sensitivity(box2, TargetDensity.uniform(2), s, IntegratorConfig(kind, h))
    assert ratio >= 0.9
    assert bound == pytest.approx(h**2 / 4.0, rel=0.05)  # |g| = 4 near the center
    if h == 1e-3:
        assert ratio == pytest.approx(1.0, abs=1e-2)
        assert det_fd == pytest.approx(h**2 / 4, rel=1e-2)


def test_sensitivity_finite_in_dimension_ten():
    P = make_hypercube(10, -1, 1)
    s = PhaseState(np.full(10, 0.9), np.zeros(10))
    det_fd, bound, ratio = jacobian_sensitivity(P, TargetDensity.uniform(10), s, IntegratorConfig("imm", 1e-3))
    assert np.isfinite(bound) and np.isfinite(ratio) and ratio > 0.9


# -- regularity and good region ---------------------------------------------


def test_regularity_zero_velocity(box5):
    traj = trajectory_record(box5, TargetDensity.uniform(5), PhaseState(np.zeros(5), np.zeros(5)), IntegratorConfig("imm", 0.01))
    assert regularity(box5, traj, 5.0) == 0.0


def test_regularity_domain(unit_interval, box2):
    traj = TrajectoryRecord([(0.0, np.array([0.5]), np.array([1.0]))], 0.1)
    with pytest.raises(DomainError):
        regularity(unit_interval, traj, 1.0)
    traj2 = TrajectoryRecord([(0.0, np.zeros(2), np.ones(2))], 0.1)
    with pytest.raises(DomainError):
        regularity(box2, traj2, 1.0)


def test_trajectory_times_validated():
    with pytest.raises(ValueError):
        TrajectoryRecord([(0.05, np.zeros(1), np.zeros(1)), (0.0, np.zeros(1), np.zeros(1))], 0.1)
    with pytest.raises(ValueError):
        TrajectoryRecord([(0.2, np.zeros(1), np.zeros(1))], 0.1)


def test_regularity_single_node_by_hand(box2):
    # at x=0: g = 2I, dx/dt = v/2, s_v = (v1/2, -v1/2, v2/2, -v2/2)
    v = np.array([2.0, 0.0])
    sv = np.array([1.0, -1.0, 0.0, 0.0])
    M1, h, n = 4.0, 0.1, 2
    expected = (
        np.linalg.norm(sv) / (math.sqrt(n) + 2 * M1**0.25)
        + np.linalg.norm(sv, 4) / (2 * M1**0.25)
        + 1.0 / (math.sqrt(math.log(n)) + 2 * h * math.sqrt(M1))
    )
    traj = TrajectoryRecord([(0.0, np.zeros(2), v)], h)
    assert regularity(box2, traj, M1) == pytest.approx(expected, rel=1e-14)


@given(seed=st.integers(0, 2**32 - 1), c=st.floats(0.01, 100.0))
def test_regularity_homogeneous(seed, c):
    rng = np.random.default_rng(seed)
    P = make_hypercube(3, -1, 1)
    s = random_state(P, rng)
    traj = trajectory_record(P, TargetDensity.uniform(3), s, IntegratorConfig("imm", 0.02))
    scaled = TrajectoryRecord([(t, x, c * v) for t, x, v in traj.nodes], traj.h)
    assert regularity(P, scaled, 3.0) == pytest.approx(c * regularity(P, traj, 3.0), rel=1e-12)


def test_regularity_tail_probability(box5):
    rng = np.random.default_rng(99)
    target = TargetDensity.uniform(5)
    cfg = IntegratorConfig("imm", 0.1 * 5**-1.5)
    exceed = 0
    for _ in range(1000):
        x = random_state(box5, rng).x
        s = PhaseState(x, sample_velocity(metric_state(box5, x), rng))
        traj = trajectory_record(box5, target, s, cfg)
        exceed += regularity(box5, traj, default_m1(box5, target, x)) > 64
    assert exceed / 1000 <= 0.01


def test_default_m1(box2):
    assert default_m1(box2, TargetDensity.uniform(2), np.zeros(2)) == 2.0
    assert default_m1(box2, TargetDensity([4.0, 0.0]), np.zeros(2)) == pytest.approx(8.0)


def test_good_region():
    P = make_hypercube(1, -1, 1)
    M = metric_state(P, [0.0])
    assert good_region_check(M, [0.0], 1, 0.01) == (0.0, True)
    val, inside = good_region_check(M, [1.0], 1, 0.01)
    assert val == pytest.approx(0.5) and inside
    val, inside = good_region_check(M, [100.0], 1, 0.01)
    assert not inside  # 5000 > 10 log(100)^2
    with pytest.raises(DomainError):
        good_region_check(M, [1.0], 1, 1.0)


# -- batteries ---------------------------------------------------------------


def test_self_concordance_battery_small():
    res = self_concordance_battery(draws=200, seed=4)
    assert res.passed and res.values["failures"] == 0
    assert all(v >= -1e-9 for v in res.values["worst_margin"].values())


def test_hamiltonian_bounds_battery_small():
    res = hamiltonian_bounds_battery(draws=200, seed=4)
    assert res.passed


def test_report_shape():
    res = DiagnosticResult("demo", {"a": np.arange(3)}, {"x": np.float64(1.5)}, 2.0, np.bool_(True))
    d = res.to_dict()
    assert set(d) == {"check_name", "inputs_digest", "inputs", "values", "threshold", "pass"}
    assert d["pass"] is True and d["values"]["x"] == 1.5
    json.dumps(d)
    assert d["inputs_digest"] == inputs_digest({"a": [0, 1, 2]})


# -- ESS and moments ---------------------------------------------------------


def test_ess_iid():
    k = 10_000
    X = np.random.default_rng(0).standard_normal((k, 3))
    e = ess(X)
    assert np.all(e >= 0.8 * k) and np.all(e <= 1.2 * k)


def test_ess_constant_column():
    X = np.column_stack([np.ones(500), np.random.default_rng(1).standard_normal(500)])
    rep = effective_sample_size(X)
    assert rep.ess[0] == 1.0 and rep.degenerate[0]
    assert not rep.degenerate[1]


def test_ess_ar1():
    # AR(1) with phi = 0.5 has integrated autocorrelation time (1+phi)/(1-phi) = 3
    rng = np.random.default_rng(2)
    k, phi = 50_000, 0.5
    x = np.empty(k)
    x[0] = rng.standard_normal()
    for t in range(1, k):
        x[t] = phi * x[t - 1] + math.sqrt(1 - phi**2) * rng.standard_normal()
    assert ess(x)[0] == pytest.approx(k / 3, rel=0.1)


def test_ess_needs_samples():
    with pytest.raises(InsufficientSamples):
        ess(np.zeros((99, 2)))


@pytest.mark.parametrize("a, lo, hi", [(1.0, 0, 1), (2.0, 0, 1), (3.0, 0, 1), (-2.0, -1, 1), (0.0, 0, 1), (1e-10, 0, 1), (40.0, 0, 1), (0.7, -2, 3)])
def test_truncated_moments_vs_quadrature(a, lo, hi):
    Z = quad(lambda t: math.exp(-a * t), lo, hi)[0]
    m = quad(lambda t: t * math.exp(-a * t), lo, hi)[0] / Z
    v = quad(lambda t: (t - m) ** 2 * math.exp(-a * t), lo, hi)[0] / Z
    mu4 = quad(lambda t: (t - m) ** 4 * math.exp(-a * t), lo, hi)[0] / Z
    mean, var, m4 = truncated_exponential_moments(a, lo, hi)
    assert mean == pytest.approx(m, rel=1e-9, abs=1e-12)
    assert var == pytest.approx(v, rel=1e-7)
    assert m4 == pytest.approx(mu4, rel=1e-6)


def test_truncated_mean_closed_form():
    for a in (1.0, 2.0, 3.0):
        assert truncated_exponential_moments(a, 0, 1)[0] == pytest.approx(1 / a - 1 / math.expm1(a), rel=1e-14)
    assert truncated_exponential_moments(0.0, 0, 1)[:2] == (0.5, 1 / 12)


def test_moment_test_iid():
    rng = np.random.default_rng(3)
    alpha = np.array([1.0, 2.0, 0.0])
    # inverse-cdf draws from the truncated exponentials on [0,1]
    u = rng.random((20_000, 3))
    cols = []
    for j, a in enumerate(alpha):
        cols.append(u[:, j] if a == 0 else -np.log1p(-u[:, j] * -np.expm1(-a)) / a)
    rep = moment_test_box(np.column_stack(cols), alpha, 0.0, 1.0)
    assert np.all(np.abs(rep.z_mean) < 4) and np.all(np.abs(rep.z_var) < 4)
    assert np.all(np.abs(rep.rel_var_error) < 0.05)
    assert rep.target_var[2] == pytest.approx(1 / 12)
    assert set(rep.to_dict()) >= {"z_mean", "z_var", "ess"}
