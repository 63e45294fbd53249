"""Riemannian Hamiltonian Monte Carlo on polytopes with the log-barrier metric."""

from rhmc_polytope.barrier import MetricState, metric_state
from rhmc_polytope.hamiltonian import PhaseState, TargetDensity, hamiltonian
from rhmc_polytope.integrators import (
    IntegratorConfig,
    IntegratorKind,
    imm_step,
    leapfrog_step,
    reference_flow,
    step,
)
from rhmc_polytope.polytope import (
    Polytope,
    analytic_center,
    make_hypercube,
    make_random,
    make_simplex,
    parse_polytope,
)
from rhmc_polytope.sampler import ChainConfig, ChainStats, rhmc_step, run_chain

__version__ = "0.1.0"
