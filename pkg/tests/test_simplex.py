"""Dense simplex solver against scipy's LP solver as the oracle."""

import numpy as np
import pytest
from scipy.optimize import linprog

from dsclab import LpInfeasible, LpUnbounded, solve_lp
from dsclab.rng import make_generator


def _oracle(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None):
    return linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                   bounds=(0, None), method="highs")


def test_tiny_known_lp():
    # min -x - y  s.t. x + y <= 1  ->  objective -1 on the segment
    x, val = solve_lp(np.array([-1.0, -1.0]),
                      a_ub=np.array([[1.0, 1.0]]), b_ub=np.array([1.0]))
    assert abs(val + 1.0) <= 1e-12
    assert abs(x.sum() - 1.0) <= 1e-12


def test_equality_lp():
    # min x + 2y  s.t. x + y = 3  ->  x = 3, y = 0
    x, val = solve_lp(np.array([1.0, 2.0]),
                      a_eq=np.array([[1.0, 1.0]]), b_eq=np.array([3.0]))
    assert np.allclose(x, [3.0, 0.0], atol=1e-12)
    assert abs(val - 3.0) <= 1e-12


def test_negative_rhs_row_flip():
    # -x <= -2  means  x >= 2
    x, val = solve_lp(np.array([1.0]),
                      a_ub=np.array([[-1.0]]), b_ub=np.array([-2.0]))
    assert abs(x[0] - 2.0) <= 1e-12


def test_infeasible():
    with pytest.raises(LpInfeasible):
        solve_lp(np.array([1.0]),
                 a_ub=np.array([[1.0], [-1.0]]),
                 b_ub=np.array([1.0, -2.0]))


def test_unbounded():
    with pytest.raises(LpUnbounded):
        solve_lp(np.array([-1.0]),
                 a_ub=np.array([[-1.0]]), b_ub=np.array([0.0]))


def test_no_constraints():
    x, val = solve_lp(np.array([1.0, 2.0]))
    assert np.array_equal(x, [0.0, 0.0]) and val == 0.0
    with pytest.raises(LpUnbounded):
        solve_lp(np.array([-1.0]))


def test_random_inequality_lps_match_scipy():
    rng = make_generator(21)
    for trial in range(40):
        n = int(rng.integers(2, 7))
        m = int(rng.integers(1, 6))
        A = rng.standard_normal((m, n))
        x0 = rng.uniform(0.0, 1.0, size=n)
        b = A @ x0 + rng.uniform(0.1, 1.0, size=m)  # strictly feasible
        c = rng.standard_normal(n)
        ref = _oracle(c, a_ub=A, b_ub=b)
        if ref.status == 3:
            with pytest.raises(LpUnbounded):
                solve_lp(c, a_ub=A, b_ub=b)
            continue
        assert ref.status == 0
        x, val = solve_lp(c, a_ub=A, b_ub=b)
        assert abs(val - ref.fun) <= 1e-7 * max(1.0, abs(ref.fun))
        assert np.all(A @ x <= b + 1e-8)
        assert np.all(x >= -1e-12)


def test_random_mixed_lps_match_scipy():
    rng = make_generator(22)
    done = 0
    for trial in range(60):
        n = int(rng.integers(3, 8))
        m_eq = int(rng.integers(1, 3))
        m_ub = int(rng.integers(1, 4))
        A_eq = rng.standard_normal((m_eq, n))
        A_ub = rng.standard_normal((m_ub, n))
        x0 = rng.uniform(0.0, 1.0, size=n)
        b_eq = A_eq @ x0
        b_ub = A_ub @ x0 + rng.uniform(0.1, 1.0, size=m_ub)
        c = rng.uniform(0.0, 2.0, size=n)  # bounded below on the box
        ref = _oracle(c, a_ub=A_ub, b_ub=b_ub, a_eq=A_eq, b_eq=b_eq)
        if ref.status != 0:
            continue
        x, val = solve_lp(c, a_ub=A_ub, b_ub=b_ub, a_eq=A_eq, b_eq=b_eq)
        assert abs(val - ref.fun) <= 1e-7 * max(1.0, abs(ref.fun))
        assert np.abs(A_eq @ x - b_eq).max() <= 1e-8
        assert np.all(A_ub @ x <= b_ub + 1e-8)
        done += 1
    assert done >= 30


def test_degenerate_lp_terminates():
    # many redundant constraints through the optimum; Bland's rule must
    # still terminate
    A = np.array([[1.0, 1.0], [1.0, 1.0], [2.0, 2.0], [1.0, 0.0],
                  [0.0, 1.0]])
    b = np.array([1.0, 1.0, 2.0, 1.0, 1.0])
    c = np.array([-1.0, -1.0])
    x, val = solve_lp(c, a_ub=A, b_ub=b)
    assert abs(val + 1.0) <= 1e-10


def test_deterministic_resolve():
    rng = make_generator(5)
    A = rng.standard_normal((4, 6))
    b = np.abs(A @ np.ones(6)) + 1.0
    c = rng.standard_normal(6)
    first = solve_lp(c, a_ub=A, b_ub=b)
    second = solve_lp(c, a_ub=A, b_ub=b)
    assert np.array_equal(first[0], second[0]) and first[1] == second[1]
