"""Self-contained dense simplex solver.

Solves   min c'x   s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0

with a two-phase tableau method. Pivoting follows Bland's rule (smallest
eligible entering index; leaving row breaks ratio ties by smallest basic
index), which rules out cycling. Problem sizes in this package are tiny
(at most a few hundred variables), so a dense tableau is the simplest
deterministic choice and there is no external solver dependency.

Free variables, absolute values and max objectives are reformulated by the
callers (split x = u - v, epigraph variable for the max).
"""

import numpy as np

from .errors import LpInfeasible, LpNumericalFailure, LpUnbounded

_PIVOT_TOL = 1e-9
_FEAS_TOL = 1e-8


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    colv = T[:, col].copy()
    colv[row] = 0.0
    # rank-1 update of every other row, including the objective row
    T -= np.outer(colv, T[row])
    # clean the pivot column so later ratio tests see exact unit vectors
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _run_simplex(T, basis, allowed, max_pivots):
    """Iterate until the objective row has no negative reduced cost.

    `allowed` is a boolean mask of columns permitted to enter the basis.
    Returns the number of pivots performed.
    """
    m = T.shape[0] - 1
    for it in range(max_pivots):
        red = T[-1, :-1]
        eligible = np.nonzero((red < -_PIVOT_TOL) & allowed)[0]
        if eligible.size == 0:
            return it
        col = int(eligible[0])  # Bland: smallest index
        colvals = T[:m, col]
        pos = colvals > _PIVOT_TOL
        if not np.any(pos):
            raise LpUnbounded("objective unbounded below along column %d" % col)
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / colvals[pos]
        rmin = ratios.min()
        cand = np.nonzero(ratios <= rmin + 1e-12)[0]
        row = int(cand[np.argmin(basis[cand])])  # Bland tie-break
        _pivot(T, basis, row, col)
    raise LpNumericalFailure("pivot limit %d exceeded" % max_pivots)


def _price_out(T, basis, costs):
    """Install the reduced-cost row for the given costs over the current basis."""
    T[-1, :-1] = costs
    T[-1, -1] = 0.0
    for i, b in enumerate(basis):
        cb = costs[b]
        if cb != 0.0:
            T[-1, :-1] -= cb * T[i, :-1]
            T[-1, -1] -= cb * T[i, -1]


def solve_lp(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None, max_pivots=200000):
    """Minimize c'x subject to a_ub x <= b_ub, a_eq x = b_eq, x >= 0.

    Returns (x, value). Raises LpInfeasible, LpUnbounded or
    LpNumericalFailure.
    """
    c = np.atleast_1d(np.asarray(c, dtype=float))
    n = c.size
    blocks = []
    rhs = []
    n_ub = 0
    if a_ub is not None:
        a_ub = np.atleast_2d(np.asarray(a_ub, dtype=float))
        b_ub = np.atleast_1d(np.asarray(b_ub, dtype=float))
        if a_ub.shape != (b_ub.size, n):
            raise ValueError("a_ub/b_ub shapes inconsistent with c")
        n_ub = b_ub.size
        blocks.append(np.hstack([a_ub, np.eye(n_ub)]))
        rhs.append(b_ub)
    if a_eq is not None:
        a_eq = np.atleast_2d(np.asarray(a_eq, dtype=float))
        b_eq = np.atleast_1d(np.asarray(b_eq, dtype=float))
        if a_eq.shape != (b_eq.size, n):
            raise ValueError("a_eq/b_eq shapes inconsistent with c")
        pad = np.zeros((b_eq.size, n_ub))
        blocks.append(np.hstack([a_eq, pad]))
        rhs.append(b_eq)
    if not blocks:
        # no constraints at all: x = 0 unless some cost is negative
        if np.any(c < -_PIVOT_TOL):
            raise LpUnbounded("no constraints and a negative cost entry")
        return np.zeros(n), 0.0
    A = np.vstack(blocks)
    b = np.concatenate(rhs)
    m = b.size

    # flip rows so every right-hand side is nonnegative
    flip = b < 0
    A[flip] *= -1.0
    b = np.where(flip, -b, b)

    # rows whose (unflipped) slack can start in the basis need no artificial
    slack_ok = np.zeros(m, dtype=bool)
    slack_ok[:n_ub] = ~flip[:n_ub]
    art_rows = np.nonzero(~slack_ok)[0]
    n_art = art_rows.size

    ncols = n + n_ub + n_art
    T = np.zeros((m + 1, ncols + 1))
    T[:m, :n + n_ub] = A
    T[:m, -1] = b
    basis = np.empty(m, dtype=int)
    basis[slack_ok] = n + np.nonzero(slack_ok)[0]
    for k, r in enumerate(art_rows):
        T[r, n + n_ub + k] = 1.0
        basis[r] = n + n_ub + k

    artificial = np.zeros(ncols, dtype=bool)
    artificial[n + n_ub:] = True
    allowed = ~artificial

    pivots = 0
    if n_art:
        costs1 = np.zeros(ncols)
        costs1[artificial] = 1.0
        _price_out(T, basis, costs1)
        pivots += _run_simplex(T, basis, np.ones(ncols, dtype=bool),
                               max_pivots)
        if -T[-1, -1] > _FEAS_TOL:
            raise LpInfeasible("phase 1 optimum %.3e > 0" % (-T[-1, -1]))
        # kick still-basic artificials out where a real pivot exists
        for r in np.nonzero(artificial[basis])[0]:
            cols = np.nonzero((np.abs(T[r, :-1]) > _PIVOT_TOL) & allowed)[0]
            if cols.size:
                _pivot(T, basis, int(r), int(cols[0]))

    costs2 = np.zeros(ncols)
    costs2[:n] = c
    _price_out(T, basis, costs2)
    pivots += _run_simplex(T, basis, allowed, max_pivots - pivots)

    x = np.zeros(ncols)
    x[basis] = T[:m, -1]
    return x[:n].copy(), float(c @ x[:n])
