import numpy as np
import pytest
from hypothesis import settings

from rhmc_polytope.barrier import local_norm_u, metric_state
from rhmc_polytope.hamiltonian import PhaseState, TargetDensity, sample_velocity
from rhmc_polytope.integrators import IntegratorConfig, step
from rhmc_polytope.polytope import make_hypercube, make_random, make_simplex

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

FD_STEP = 1e-5

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def central_diff(f, x, eps=FD_STEP):
    """Central finite-difference gradient (scalar f) or Jacobian (vector f)."""
    x = np.asarray(x, dtype=float)
    cols = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = eps
        cols.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * eps))
    return np.stack(cols, axis=-1)


def random_interior(P, rng, radius=0.6, hops=3):
    x = np.array(P.interior_point)
    for _ in range(hops):
        M = metric_state(P, x)
        d = rng.standard_normal(P.n)
        x = x + d * rng.uniform(0.0, radius) / local_norm_u(M, d)
    return x


def random_state(P, rng, radius=0.6):
    x = random_interior(P, rng, radius)
    return PhaseState(x, sample_velocity(metric_state(P, x), rng))


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger numba compilation once so timed tests measure steady state."""
    P = make_hypercube(2, -1, 1)
    st = PhaseState(np.zeros(2), np.ones(2))
    for kind in ("imm", "leapfrog"):
        step(P, TargetDensity(np.ones(2)), st, IntegratorConfig(kind, 0.01))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def box2():
    return make_hypercube(2, -1, 1)


@pytest.fixture
def box5():
    return make_hypercube(5, -1, 1)


@pytest.fixture
def unit_interval():
    return make_hypercube(1, 0, 1)


@pytest.fixture
def simplex5():
    return make_simplex(5)


@pytest.fixture
def random36():
    return make_random(3, 6, 1)


FIXTURE_FACTORIES = {
    "box2": lambda: make_hypercube(2, -1, 1),
    "box5": lambda: make_hypercube(5, -1, 1),
    "unitbox3": lambda: make_hypercube(3, 0, 1),
    "simplex3": lambda: make_simplex(3),
    "simplex5": lambda: make_simplex(5),
    "random36": lambda: make_random(3, 6, 1),
    "random4_12": lambda: make_random(4, 12, 7),
}


@pytest.fixture(params=sorted(FIXTURE_FACTORIES))
def any_polytope(request):
    return FIXTURE_FACTORIES[request.param]()
