import numpy as np
import pytest
from scipy.optimize import linprog as highs

from graspattack.quality.simplex import LPStatus, linprog

HIGHS_STATUS = {0: LPStatus.OPTIMAL, 2: LPStatus.INFEASIBLE, 3: LPStatus.UNBOUNDED}


def _random_lp(rng, t):
    n = int(rng.integers(3, 25))
    mu, me = int(rng.integers(0, 8)), int(rng.integers(0, 6))
    c = rng.normal(size=n)
    if t % 2 == 0:
        c = np.abs(c)
    A_ub, b_ub = rng.normal(size=(mu, n)), rng.normal(size=mu)
    A_eq = rng.normal(size=(me, n))
    x0 = np.abs(rng.normal(size=n)) * (rng.random(n) < 0.5)
    b_eq = A_eq @ x0
    if t % 3 == 0 and me > 1:
        A_eq[-1], b_eq[-1] = A_eq[0], b_eq[0]  # redundant row
    return c, A_ub, b_ub, A_eq, b_eq


def test_against_highs_on_random_lps():
    rng = np.random.default_rng(1)
    for t in range(300):
        c, A_ub, b_ub, A_eq, b_eq = _random_lp(rng, t)
        ref = highs(c, A_ub if len(A_ub) else None, b_ub if len(b_ub) else None,
                    A_eq if len(A_eq) else None, b_eq if len(b_eq) else None,
                    bounds=(0, None), method="highs")
        got = linprog(c, A_ub, b_ub, A_eq, b_eq)
        assert got.status is HIGHS_STATUS[ref.status], t
        if got.optimal:
            assert got.fun == pytest.approx(ref.fun, rel=1e-7, abs=1e-7)
            assert got.duality_gap < 1e-7 * max(1, abs(got.fun))
            assert got.dual_infeasibility < 1e-8
            if len(A_ub):
                assert (A_ub @ got.x - b_ub).max() < 1e-8
            if len(A_eq):
                assert np.abs(A_eq @ got.x - b_eq).max() < 1e-8


def test_simple_optimum():
    # max x + y  s.t. x + 2y <= 4, 3x + y <= 6
    r = linprog([-1, -1], [[1, 2], [3, 1]], [4, 6])
    assert r.optimal
    assert np.allclose(r.x, [1.6, 1.2])
    assert r.fun == pytest.approx(-2.8)


def test_infeasible_and_unbounded():
    assert linprog([1], A_eq=[[1]], b_eq=[-1]).status is LPStatus.INFEASIBLE
    assert linprog([-1, 0], [[0, 1]], [1]).status is LPStatus.UNBOUNDED


def test_degenerate_cycling_example():
    # Beale's example cycles under the textbook largest-coefficient rule
    c = [-0.75, 150, -0.02, 6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    r = linprog(c, A, [0, 0, 1])
    assert r.optimal
    assert r.fun == pytest.approx(-0.05)


def test_negative_rhs_inequality():
    # x >= 2 written as -x <= -2
    r = linprog([1], [[-1]], [-2])
    assert r.optimal and r.x[0] == pytest.approx(2.0)


def test_equality_duals_are_sensitivities():
    c = np.array([1.0, 2.0, 0.5])
    A_eq = np.array([[1.0, 1.0, 1.0]])
    r = linprog(c, A_eq=A_eq, b_eq=[3.0])
    r2 = linprog(c, A_eq=A_eq, b_eq=[3.001])
    assert (r2.fun - r.fun) / 0.001 == pytest.approx(r.eq_duals[0], rel=1e-6)
