"""Reference pursuit solvers and oracles.

soft_threshold   the l1 proximal map, shared by ISTA and LISTA
ista             proximal gradient on ||y - D x||^2 + gamma ||x||_1
basis_pursuit    min ||x||_1 s.t. y = D x, via the embedded simplex
brute_force_l0   exhaustive support search; the ground-truth l0 oracle
cosparsity_solve known-support null-space method for exact chains

The l0 oracle enumerates supports by (size, lexicographic) order and
returns the first one whose least-squares fit meets the residual target,
so its output is deterministic even if several minimizers exist.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (BudgetExceeded, DivergingStep, Infeasible,
                     InconsistentSupports, NoSolution, ShapeMismatch)
from .model import Dictionary, LayeredDictionary, SparseCode, layer_product
from .simplex import solve_lp

_RANGE_TOL = 1e-8
_EXACT_TOL = 1e-9
_NULL_REL_TOL = 1e-10
_SUPPORT_DRIFT_TOL = 1e-8
_L0_GUARD = 1e7


def soft_threshold(x, alpha):
    """Componentwise sign(x) * (|x| - alpha)_+ for alpha >= 0."""
    if alpha < 0:
        raise ValueError("threshold must be nonnegative")
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - alpha, 0.0)


@dataclass(frozen=True)
class PursuitResult:
    code: SparseCode
    residual: float
    iterations: int
    objective_trace: tuple
    iterates: tuple = None


def _spectral_norm_sq(A, iters=500, tol=1e-12):
    """||A||_2^2 by power iteration on A'A with a fixed start vector."""
    G = A.T @ A
    v = np.ones(G.shape[0]) / np.sqrt(G.shape[0])
    lam = 0.0
    for _ in range(iters):
        w = G @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        new = float(v @ (G @ v))
        if abs(new - lam) <= tol * max(1.0, new):
            return new
        lam = new
    return lam


def ista(D, y, gamma, K, step="auto", keep_iterates=False):
    """K proximal-gradient steps on ||y - D x||_2^2 + gamma ||x||_1.

    With the automatic step 1/||D||_2^2 the update reads
    x <- soft_threshold(x + step * D'(y - D x), gamma * step / 2),
    which is exactly proximal gradient with step 1/L on the smooth part
    (L = 2 ||D||_2^2), so the objective trace is non-increasing.
    keep_iterates=True additionally stores x^(0) .. x^(K).
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    A = D.data if isinstance(D, Dictionary) else np.asarray(D, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.shape != (A.shape[0],):
        raise ShapeMismatch("y must have length %d" % A.shape[0])
    if step == "auto":
        s2 = _spectral_norm_sq(A)
        if s2 == 0.0:
            raise ValueError("zero dictionary has no automatic step")
        step = 1.0 / s2
    step = float(step)
    if step <= 0:
        raise ValueError("step must be positive")

    x = np.zeros(A.shape[1])
    resid = y - A @ x
    obj = float(resid @ resid)
    trace = [obj]
    iterates = [x.copy()] if keep_iterates else None
    rises = 0
    for k in range(K):
        x = soft_threshold(x + step * (A.T @ resid), gamma * step / 2.0)
        resid = y - A @ x
        obj = float(resid @ resid) + gamma * float(np.abs(x).sum())
        if obj > trace[-1] + 1e-12 * max(1.0, trace[-1]):
            rises += 1
            if rises >= 3:
                raise DivergingStep(
                    "objective rose %d times in a row; step %.3e too large"
                    % (rises, step))
        else:
            rises = 0
        trace.append(obj)
        if keep_iterates:
            iterates.append(x.copy())
    return PursuitResult(code=SparseCode(x), residual=float(
        np.linalg.norm(y - A @ x)), iterations=K,
        objective_trace=tuple(trace),
        iterates=tuple(iterates) if keep_iterates else None)


def basis_pursuit(D, y):
    """min ||x||_1 subject to y = D x (x free), via the split x = u - v."""
    A = D.data if isinstance(D, Dictionary) else np.asarray(D, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.shape != (A.shape[0],):
        raise ShapeMismatch("y must have length %d" % A.shape[0])
    sol, res, _, _ = np.linalg.lstsq(A, y, rcond=None)
    if np.linalg.norm(y - A @ sol) > _RANGE_TOL * max(1.0,
                                                      np.linalg.norm(y)):
        raise Infeasible("y is not in the range of the dictionary")
    n = A.shape[1]
    c = np.ones(2 * n)
    a_eq = np.hstack([A, -A])
    uv, _ = solve_lp(c, a_eq=a_eq, b_eq=y)
    return SparseCode(uv[:n] - uv[n:])


def brute_force_l0(D, y, lam_max, eps=0.0):
    """Sparsest code with ||y - D x||_2 <= eps, by exhaustive search.

    Supports are visited in (size, lexicographic) order; the first fit
    within tolerance wins. eps = 0 means exact up to 1e-9.
    """
    A = D.data if isinstance(D, Dictionary) else np.asarray(D, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.shape != (A.shape[0],):
        raise ShapeMismatch("y must have length %d" % A.shape[0])
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    n = A.shape[1]
    lam_max = int(lam_max)
    if lam_max < 0:
        raise ValueError("lam_max must be nonnegative")
    lam_max = min(lam_max, n)
    if math.comb(n, lam_max) > _L0_GUARD:
        raise BudgetExceeded(
            "C(%d, %d) supports exceed the enumeration guard" % (n, lam_max))
    tol = eps if eps > 0 else _EXACT_TOL
    for size in range(lam_max + 1):
        for support in itertools.combinations(range(n), size):
            if size == 0:
                resid = float(np.linalg.norm(y))
                coef = np.empty(0)
            else:
                sub = A[:, support]
                coef, _, _, _ = np.linalg.lstsq(sub, y, rcond=None)
                resid = float(np.linalg.norm(y - sub @ coef))
            if resid <= tol:
                x = np.zeros(n)
                x[list(support)] = coef
                return SparseCode(x, budget=lam_max)
    raise NoSolution(
        "no support of size <= %d fits y within %.3e" % (lam_max, tol))


@dataclass(frozen=True)
class CosparsityResult:
    codes: tuple
    null_dim: int
    empty_null_space: bool = False


def cosparsity_stack(dicts, supports):
    """Rows outside S_j of each D_{j+1}...D_J, columns S_J, stacked.

    The deepest code's on-support entries must lie in the null space of
    this matrix; it may have zero rows when every shallower support is
    full. supports are 0-based index arrays, one per layer.
    """
    if not isinstance(dicts, LayeredDictionary):
        dicts = LayeredDictionary(dicts)
    J = dicts.depth
    dims = dicts.dims()
    supports = [np.unique(np.asarray(S, dtype=int)) for S in supports]
    SJ = supports[-1]
    blocks = []
    for j in range(1, J):
        comp = np.setdiff1d(np.arange(dims[j]), supports[j - 1])
        if comp.size == 0:
            continue
        seg = layer_product(dicts, j + 1, J).data
        blocks.append(seg[np.ix_(comp, SJ)])
    if not blocks:
        return np.empty((0, SJ.size))
    return np.vstack(blocks)


def cosparsity_solve(dicts, y, supports):
    """Recover all layer codes from known supports (0-based index sets).

    Stacks, for j = 1..J-1, the rows outside S_j of the segment product
    D_{j+1} ... D_J restricted to columns S_J; the deepest code must lie
    in the null space of that stack. A basis N of the null space comes
    from an SVD (singular values below 1e-10 relative are zero), the
    remaining coefficients are fit by least squares on the observation,
    and shallower codes follow from x_{j-1} = D_j x_j.

    A zero-dimensional null space admits only the zero code; that case
    is reported through the empty_null_space flag rather than an error.
    """
    if not isinstance(dicts, LayeredDictionary):
        dicts = LayeredDictionary(dicts)
    J = dicts.depth
    y = np.asarray(y, dtype=float)
    if y.shape != (dicts[1].rows,):
        raise ShapeMismatch("y must have length %d" % dicts[1].rows)
    dims = dicts.dims()
    supports = [np.unique(np.asarray(S, dtype=int)) for S in supports]
    if len(supports) != J:
        raise ShapeMismatch("need one support per layer")
    for j, S in enumerate(supports, start=1):
        if S.size and (S[0] < 0 or S[-1] >= dims[j]):
            raise ShapeMismatch("support %d out of range 0..%d"
                                % (j, dims[j] - 1))

    SJ = supports[-1]
    if SJ.size == 0:
        codes = [SparseCode(np.zeros(dims[j])) for j in range(1, J + 1)]
        return CosparsityResult(codes=tuple(codes), null_dim=0,
                                empty_null_space=False)

    M = cosparsity_stack(dicts, supports)
    if M.shape[0]:
        _, sv, Vt = np.linalg.svd(M, full_matrices=True)
        smax = sv[0] if sv.size else 0.0
        rank = int(np.sum(sv > _NULL_REL_TOL * smax)) if smax > 0 else 0
        N = Vt[rank:].T
    else:
        N = np.eye(SJ.size)

    if N.shape[1] == 0:
        codes = [SparseCode(np.zeros(dims[j])) for j in range(1, J + 1)]
        return CosparsityResult(codes=tuple(codes), null_dim=0,
                                empty_null_space=True)

    synth = layer_product(dicts, 1, J).data[:, SJ] @ N
    z, _, _, _ = np.linalg.lstsq(synth, y, rcond=None)
    xJ = np.zeros(dims[J])
    xJ[SJ] = N @ z

    codes = [None] * J
    codes[J - 1] = xJ
    for j in range(J, 1, -1):
        codes[j - 2] = dicts[j].data @ codes[j - 1]
    out = []
    for j in range(1, J + 1):
        x = codes[j - 1]
        mask = np.ones(dims[j], dtype=bool)
        mask[supports[j - 1]] = False
        drift = float(np.abs(x[mask]).max()) if mask.any() else 0.0
        if drift > _SUPPORT_DRIFT_TOL:
            raise InconsistentSupports(
                "layer %d has %.3e mass outside its support" % (j, drift))
        x = x.copy()
        x[mask] = 0.0
        out.append(SparseCode(x))
    return CosparsityResult(codes=tuple(out), null_dim=int(N.shape[1]),
                            empty_null_space=False)
