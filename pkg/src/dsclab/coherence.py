"""Coherence functionals of a dictionary.

Three quantities drive every guarantee in this package:

* mutual coherence  mu(D) = max_{i != j} |d_i' d_j| / (||d_i|| ||d_j||)
* generalized mutual coherence  mu_tilde(D): for each column i minimize
  max_{j != i} |w_i' d_j| subject to w_i' d_i = 1, then take the worst
  column; always <= mu(D) because W = D is feasible
* the minimal-entry weight set: among weight matrices meeting the
  mu_tilde constraints, those minimizing max_{i,j} |W_{ij}|; the max is
  reported as C_W.

Both LP stages decompose column-wise, so the dense simplex solver only
ever sees a few dozen variables at a time. Reported values (mu_tilde,
C_W, the diagonal pins) are recomputed from the weight matrix that is
actually returned, after rescaling each column so w_i' d_i = 1 exactly;
this keeps the certificate internally consistent instead of trusting
solver tolerances.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import TooFewColumns
from .model import (Dictionary, LayeredDictionary, layer_product,
                    normalize_columns)
from .simplex import solve_lp

_ZERO_OPT_TOL = 1e-12
_STAGE2_SLACK = 1e-9
_UNIT_TOL = 1e-9


def _as_matrix(D):
    if isinstance(D, Dictionary):
        return D.data
    return np.asarray(D, dtype=float)


def mutual_coherence(D):
    """Largest absolute cosine between two distinct columns.

    Columns are normalized internally, so the value is invariant to
    nonzero column scalings.
    """
    A = _as_matrix(D)
    if A.ndim != 2 or A.shape[1] < 2:
        raise TooFewColumns("mutual coherence needs at least 2 columns")
    N = normalize_columns(Dictionary(A)).data
    G = np.abs(N.T @ N)
    np.fill_diagonal(G, 0.0)
    # cosines can exceed 1 by rounding only
    return float(min(G.max(), 1.0))


@dataclass(frozen=True)
class CoherenceCertificate:
    """mu, mu_tilde and the weight matrix attaining them.

    `w` has the same shape as the dictionary; column i is the minimizing
    weight vector for column i. `c_w` is max |w[i, j]|. The reported
    mu_tilde and c_w are recomputed from `w` itself.
    """

    mu: float
    mu_tilde: float
    w: np.ndarray
    c_w: float

    def __post_init__(self):
        self.w.setflags(write=False)


def _column_lp(A, i, entry_cap=None):
    """Stage LP for column i.

    Without `entry_cap`: minimize max_{j != i} |w' d_j| s.t. w' d_i = 1.
    With `entry_cap` (stage 2): the off-diagonal products are capped at
    `entry_cap` and the objective becomes max_k |w_k|.

    Variables are [u; v; t] with w = u - v, t the epigraph scalar.
    """
    m, n = A.shape
    nvar = 2 * m + 1
    c = np.zeros(nvar)
    c[-1] = 1.0
    others = [j for j in range(n) if j != i]
    rows_ub = []
    rhs_ub = []
    for j in others:
        d = A[:, j]
        if entry_cap is None:
            rows_ub.append(np.concatenate([d, -d, [-1.0]]))
            rhs_ub.append(0.0)
            rows_ub.append(np.concatenate([-d, d, [-1.0]]))
            rhs_ub.append(0.0)
        else:
            rows_ub.append(np.concatenate([d, -d, [0.0]]))
            rhs_ub.append(entry_cap)
            rows_ub.append(np.concatenate([-d, d, [0.0]]))
            rhs_ub.append(entry_cap)
    if entry_cap is not None:
        eye = np.eye(m)
        for k in range(m):
            e = eye[k]
            rows_ub.append(np.concatenate([e, -e, [-1.0]]))
            rhs_ub.append(0.0)
            rows_ub.append(np.concatenate([-e, e, [-1.0]]))
            rhs_ub.append(0.0)
    di = A[:, i]
    a_eq = np.concatenate([di, -di, [0.0]])[None, :]
    x, val = solve_lp(c, a_ub=np.array(rows_ub), b_ub=np.array(rhs_ub),
                      a_eq=a_eq, b_eq=[1.0])
    w = x[:m] - x[m:2 * m]
    return w, val


def generalized_mutual_coherence(D, mode="exact"):
    """Certificate carrying mu, mu_tilde, the weight matrix and C_W.

    mode="fast" skips the LPs and returns W = D with mu in place of
    mu_tilde; every downstream bound stays valid (just looser) because
    mu_tilde <= mu.
    """
    A = _as_matrix(D)
    m, n = A.shape
    norms = np.linalg.norm(A, axis=0)
    if np.any(np.abs(norms - 1.0) > _UNIT_TOL):
        raise ValueError("generalized coherence expects unit-norm columns")
    mu = mutual_coherence(A)
    if mode == "fast":
        W = A.copy()
        return CoherenceCertificate(mu=mu, mu_tilde=mu, w=W,
                                    c_w=float(np.abs(W).max()))
    if mode != "exact":
        raise ValueError("mode must be 'exact' or 'fast'")

    opts = np.empty(n)
    for i in range(n):
        _, opts[i] = _column_lp(A, i)
    mu1 = float(opts.max())

    if mu1 <= _ZERO_OPT_TOL and m == n:
        # mu_tilde = 0 forces W' D = I, whose unique solution for a
        # square dictionary is the inverse transpose (W = D when
        # orthonormal); no entry-minimizing stage is needed.
        W = np.linalg.solve(A.T, np.eye(m))
    else:
        W = np.empty_like(A)
        cap = mu1 + _STAGE2_SLACK
        for i in range(n):
            W[:, i], _ = _column_lp(A, i, entry_cap=cap)

    # realized values: pin the diagonal exactly, then measure
    diag = np.einsum("ki,ki->i", W, A)
    W = W / diag
    G = np.abs(W.T @ A)
    np.fill_diagonal(G, 0.0)
    return CoherenceCertificate(mu=mu, mu_tilde=float(G.max()), w=W,
                                c_w=float(np.abs(W).max()))


@dataclass(frozen=True)
class CoherenceProfile:
    """Every coherence the relaxed uniqueness bound can ask for.

    single[j]        mu of layer j alone
    prefix[j]        mu of the product D_1 ... D_j
    segment[(j,j0)]  mu of the product D_j ... D_j0 for j < j0
    """

    single: dict = field(default_factory=dict)
    prefix: dict = field(default_factory=dict)
    segment: dict = field(default_factory=dict)


def coherence_profile(dicts):
    """Compute mu for each layer, each prefix product and each segment."""
    if not isinstance(dicts, LayeredDictionary):
        dicts = LayeredDictionary(dicts)
    J = dicts.depth
    single = {}
    prefix = {}
    segment = {}
    for j in range(1, J + 1):
        single[j] = mutual_coherence(dicts[j])
        prefix[j] = mutual_coherence(layer_product(dicts, 1, j))
    for j0 in range(2, J + 1):
        for j in range(1, j0):
            segment[(j, j0)] = mutual_coherence(layer_product(dicts, j, j0))
    return CoherenceProfile(single=single, prefix=prefix, segment=segment)
