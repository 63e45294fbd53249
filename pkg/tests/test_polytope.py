import numpy as np
import pytest
from hypothesis import given, strategies as st

from rhmc_polytope.errors import (
    InfeasibleInterior,
    InvalidDimension,
    NoInteriorPoint,
    ParseError,
    RankDeficient,
)
from rhmc_polytope.polytope import (
    Polytope,
    analytic_center,
    contains_strictly,
    format_polytope,
    make_hypercube,
    make_random,
    make_simplex,
    parse_builtin,
    parse_polytope,
    slacks,
)

BOX_TEXT = """\
# unit square [0,1]^2
4 2
1 0 0
-1 0 -1
0 1 0
0 -1 -1
"""

SIMPLEX3_TEXT = """\
4 3
1 0 0 0
0 1 0 0
0 0 1 0
-1 -1 -1 -1
"""


def test_parse_box():
    P = parse_polytope(BOX_TEXT)
    assert (P.m, P.n) == (4, 2)
    np.testing.assert_array_equal(P.A, [[1, 0], [-1, 0], [0, 1], [0, -1]])
    np.testing.assert_array_equal(P.b, [0, -1, 0, -1])


def test_parse_scientific_notation():
    P = parse_polytope("2 1\n1e0 0.0E0\n-1.0 -2.5e-1\n")
    np.testing.assert_array_equal(P.b, [0.0, -0.25])


def test_parse_zero_row():
    with pytest.raises(ParseError):
        parse_polytope("3 2\n1 0 0\n0 0 -1\n0 1 0\n")


@pytest.mark.parametrize(
    "text",
    [
        "",
        "# only a comment\n",
        "4\n1 0 0\n",
        "2 2\n1 0 0\n",
        "2 1\n1 0\n-1 x\n",
        "2 1\n1 0 3\n-1 -1\n",
        "a b\n",
        "0 2\n",
    ],
)
def test_parse_malformed(text):
    with pytest.raises(ParseError):
        parse_polytope(text)


def test_parse_simplex_finds_interior():
    P = parse_polytope(SIMPLEX3_TEXT)
    assert (P.m, P.n) == (4, 3)
    assert np.all(P.A @ P.interior_point - P.b > 0)
    np.testing.assert_allclose(analytic_center(P), np.full(3, 0.25), atol=1e-6)


def test_parse_shifted_box():
    P = parse_polytope("4 2\n1 0 10\n-1 0 -11\n0 1 -5\n0 -1 4\n")
    assert contains_strictly(P, P.interior_point)
    np.testing.assert_allclose(analytic_center(P), [10.5, -4.5], atol=1e-8)


def test_phase_one_thin_slab():
    # many loose rows drag the least-squares guess outside the slab 0.99 < x < 1
    A = np.array([[1.0], [-1.0]] + [[1.0]] * 5)
    b = np.array([0.99, -1.0] + [-5.0] * 5)
    P = Polytope(A, b)
    assert 0.99 < P.interior_point[0] < 1.0


def test_rank_deficient():
    with pytest.raises(RankDeficient):
        Polytope(np.array([[1.0, 0], [-1, 0], [2, 0]]), np.array([0.0, -1, -3]))


def test_too_few_rows():
    with pytest.raises(RankDeficient):
        Polytope(np.array([[1.0, 0]]), np.array([0.0]))


@pytest.mark.parametrize(
    "A, b",
    [
        ([[1.0], [-1.0]], [1.0, 0.0]),  # x >= 1 and x <= 0
        ([[1.0], [-1.0]], [0.0, 0.0]),  # feasible set {0}, empty interior
    ],
)
def test_empty_interior(A, b):
    with pytest.raises(InfeasibleInterior):
        Polytope(np.array(A), np.array(b))


def test_bad_witness_rejected():
    with pytest.raises(InfeasibleInterior):
        Polytope(np.array([[1.0], [-1.0]]), np.array([0.0, -1.0]), interior_point=[2.0])


def test_polytope_is_immutable():
    P = make_hypercube(2)
    with pytest.raises(ValueError):
        P.A[0, 0] = 5.0
    with pytest.raises(AttributeError):
        P.b = np.zeros(4)


def test_slacks_box():
    P = parse_polytope(BOX_TEXT)
    np.testing.assert_array_equal(slacks(P, [0.5, 0.5]), [0.5, 0.5, 0.5, 0.5])
    np.testing.assert_array_equal(slacks(P, [0.0, 0.5]), [0.0, 1.0, 0.5, 0.5])


def test_slacks_match_scalar_loop():
    rng = np.random.default_rng(3)
    P = make_random(6, 20, seed=11)
    x = rng.uniform(-0.3, 0.3, 6)
    loop = np.array([sum(P.A[i, j] * x[j] for j in range(P.n)) - P.b[i] for i in range(P.m)])
    np.testing.assert_array_max_ulp(slacks(P, x), loop, maxulp=4)


def test_contains_strictly():
    P = parse_polytope(BOX_TEXT)
    assert contains_strictly(P, [0.5, 0.5], 0.0)
    assert not contains_strictly(P, [1.1, 0.5], 0.0)
    assert not contains_strictly(P, [0.01, 0.5], 0.05)


@pytest.mark.parametrize("n", [1, 2, 5, 10])
def test_analytic_center_symmetric_box(n):
    np.testing.assert_allclose(analytic_center(make_hypercube(n, -1, 1)), 0.0, atol=1e-8)


def test_analytic_center_interval():
    np.testing.assert_allclose(analytic_center(make_hypercube(1, 0, 1)), [0.5], atol=1e-8)


def test_analytic_center_simplex2():
    # grad = 0 gives 1/x_i = 1/(1 - sum x), so x_i = 1/3
    np.testing.assert_allclose(analytic_center(make_simplex(2)), [1 / 3, 1 / 3], atol=1e-6)


def test_analytic_center_gradient_norm():
    P = make_random(4, 12, seed=7)
    x = analytic_center(P)
    s = P.A @ x - P.b
    Ax = P.A / s[:, None]
    grad = -Ax.sum(axis=0)
    assert np.sqrt(grad @ np.linalg.solve(Ax.T @ Ax, grad)) <= 1e-8


def test_analytic_center_unbounded():
    # positive orthant: full rank, nonempty interior, no analytic center
    P = Polytope(np.eye(2), np.zeros(2))
    with pytest.raises(NoInteriorPoint):
        analytic_center(P)


def test_generators():
    P = make_hypercube(2, 0, 1)
    assert P.m == 4 and contains_strictly(P, [0.5, 0.5])
    S = make_simplex(3)
    assert S.m == 4
    np.testing.assert_allclose(analytic_center(S), np.full(3, 0.25), atol=1e-6)
    R = make_random(3, 10, seed=7)
    assert contains_strictly(R, np.zeros(3), 0.5)
    np.testing.assert_allclose(np.linalg.norm(R.A, axis=1), 1.0)
    np.testing.assert_array_equal(R.b, -1.0)


@pytest.mark.parametrize("call", [
    lambda: make_hypercube(0),
    lambda: make_hypercube(2, 1.0, 1.0),
    lambda: make_simplex(0),
    lambda: make_random(3, 3),
])
def test_generator_errors(call):
    with pytest.raises(InvalidDimension):
        call()


def test_make_random_is_seeded():
    np.testing.assert_array_equal(make_random(3, 8, 5).A, make_random(3, 8, 5).A)
    assert not np.array_equal(make_random(3, 8, 5).A, make_random(3, 8, 6).A)


def test_format_roundtrip(any_polytope):
    Q = parse_polytope(format_polytope(any_polytope))
    np.testing.assert_array_equal(Q.A, any_polytope.A)
    np.testing.assert_array_equal(Q.b, any_polytope.b)


def test_parse_builtin():
    assert parse_builtin("hypercube:3:-1:1").m == 6
    assert parse_builtin("simplex:4").n == 4
    assert parse_builtin("random:3:7:2").m == 7
    for bad in ["cube:3", "hypercube:x", "simplex", "random:3"]:
        with pytest.raises(ParseError):
            parse_builtin(bad)


def test_witness_is_interior(any_polytope):
    assert np.all(slacks(any_polytope, any_polytope.interior_point) > 0)


@given(
    seed=st.integers(0, 2**31),
    t=st.floats(-10, 10, allow_nan=False),
)
def test_slacks_affine(seed, t):
    rng = np.random.default_rng(seed)
    P = make_random(4, 9, seed % 100)
    x, d = rng.standard_normal(4), rng.standard_normal(4)
    lhs = slacks(P, x + t * d)
    rhs = slacks(P, x) + t * (P.A @ d)
    scale = 1.0 + np.abs(P.A) @ (np.abs(x) + abs(t) * np.abs(d)) + np.abs(P.b)
    assert np.all(np.abs(lhs - rhs) <= 1e-12 * scale)


@given(seed=st.integers(0, 2**31))
def test_analytic_center_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    P = make_random(3, 10, seed=int(rng.integers(50)))
    try:
        x = analytic_center(P)
    except NoInteriorPoint:
        return  # unbounded draw
    perm = rng.permutation(P.m)
    Q = Polytope(P.A[perm], P.b[perm])
    assert np.linalg.norm(analytic_center(Q) - x) <= 1e-6
