"""Synthetic dictionaries and layered sparse-coding instances.

Instances come in two flavors:

* exact-chain: dictionaries below the first layer have pairwise-disjoint
  column supports, so every intermediate x_{j-1} = D_j x_j is exactly
  sparse and every layer tolerance is 0 (the observation may still carry
  an additive noise vector with a requested l2 norm).
* tolerance-chain: every layer code is sampled independently and the
  recorded eps_j is the realized residual ||x_{j-1} - D_j x_j||_2.

Nonzero code magnitudes are drawn from [B/2, B] with random signs, so
supports are bounded away from zero and recovery is well posed.

All randomness flows from one 64-bit seed through a counter-based
generator (see rng.py), making every artifact reproducible.
"""

import numpy as np

from .errors import InfeasibleBudget, ShapeMismatch
from .model import Dictionary, DscInstance, LayeredDictionary, SparseCode
from .rng import make_generator


def welch_bound(rows, cols):
    """Lower bound on the coherence of any rows x cols unit-norm frame."""
    if cols <= rows:
        return 0.0
    return float(np.sqrt((cols - rows) / (rows * (cols - 1.0))))


def random_dictionary(rows, cols, rng):
    """Gaussian matrix with unit-normalized columns."""
    A = rng.standard_normal((rows, cols))
    A /= np.linalg.norm(A, axis=0)
    return Dictionary(A, normalized=True)


def orthonormal_dictionary(n, rng):
    """Haar-ish random orthonormal square dictionary (QR with sign fix)."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(R))
    return Dictionary(Q, normalized=True)


def low_coherence_dictionary(rows, cols, rng, iters=1500, restarts=6):
    """Frame with coherence pushed toward the Welch bound.

    Alternating projection between the set of Gram matrices with clipped
    off-diagonal magnitude and the set of rank-`rows` PSD matrices with
    unit diagonal. The clip target tightens from 1.30x to 1.02x the
    Welch bound over the first 70% of the iterations. Several restarts
    run batched; the lowest-coherence result wins.
    """
    floor = max(welch_bound(rows, cols), 1e-3)
    X = rng.standard_normal((restarts, rows, cols))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    idx = np.arange(cols)
    for it in range(iters):
        G = np.einsum("bri,brj->bij", X, X)
        t = floor * (1.30 - 0.28 * min(1.0, it / (0.7 * iters)))
        np.clip(G, -t, t, out=G)
        G[:, idx, idx] = 1.0
        w, V = np.linalg.eigh(G)
        w = np.clip(w[:, -rows:], 0.0, None)
        X = np.sqrt(w)[:, :, None] * np.transpose(V[:, :, -rows:], (0, 2, 1))
        X /= np.maximum(np.linalg.norm(X, axis=1, keepdims=True), 1e-12)
    G = np.abs(np.einsum("bri,brj->bij", X, X))
    G[:, idx, idx] = 0.0
    mus = G.max(axis=(1, 2))
    best = X[int(np.argmin(mus))]
    best = best / np.linalg.norm(best, axis=0)
    return Dictionary(best, normalized=True)


def simplex_frame(rows):
    """The rows x (rows+1) equiangular simplex frame.

    Vertices of a regular simplex expressed in an orthonormal basis of
    the complement of the all-ones direction; every off-diagonal Gram
    entry equals -1/rows, so mu = 1/rows exactly.
    """
    d = rows + 1
    Q, _ = np.linalg.qr(np.hstack([np.ones((d, 1)), np.eye(d, d - 1)]))
    F = Q[:, 1:].T  # columns F[:, i] = coordinates of projected e_i
    F = F / np.linalg.norm(F, axis=0)
    return Dictionary(F, normalized=True)


def disjoint_support_dictionary(rows, cols, fill, rng):
    """Columns with pairwise-disjoint supports of size `fill`.

    Entries are +-1/sqrt(fill), so columns are unit-norm and the product
    D x has at most fill * ||x||_0 nonzeros with no cancellation.
    """
    if fill < 1 or fill * cols > rows:
        raise InfeasibleBudget(
            "cannot place %d disjoint supports of size %d in %d rows"
            % (cols, fill, rows))
    perm = rng.permutation(rows)[:fill * cols].reshape(cols, fill)
    A = np.zeros((rows, cols))
    signs = rng.integers(0, 2, size=(cols, fill)) * 2.0 - 1.0
    for i in range(cols):
        A[perm[i], i] = signs[i] / np.sqrt(fill)
    return Dictionary(A, normalized=True)


def _sample_code(cols, s, B, rng):
    support = np.sort(rng.permutation(cols)[:s])
    vals = np.zeros(cols)
    mags = rng.uniform(B / 2.0, B, size=s)
    signs = rng.integers(0, 2, size=s) * 2.0 - 1.0
    vals[support] = mags * signs
    return vals


def _make_layer(rows, cols, ensemble, rng):
    if ensemble == "gaussian":
        return random_dictionary(rows, cols, rng)
    if ensemble == "low-coherence":
        return low_coherence_dictionary(rows, cols, rng)
    if ensemble == "orthonormal":
        if rows != cols:
            raise ShapeMismatch("orthonormal ensemble needs a square shape")
        return orthonormal_dictionary(rows, rng)
    if ensemble == "simplex-frame":
        if cols != rows + 1:
            raise ShapeMismatch("simplex-frame ensemble needs cols = rows + 1")
        return simplex_frame(rows)
    raise ValueError("unknown ensemble %r" % (ensemble,))


def generate_instance(shape, lam, B, mode="exact-chain", noise0_norm=0.0,
                      seed=0, dictionaries=None, ensemble="gaussian"):
    """Build a reproducible layered instance.

    shape: list of (d_{j-1}, d_j) pairs, chain compatible.
    lam:   per-layer sparsity budgets (lam_j >= 1).
    B:     nonzero magnitudes are drawn from [B/2, B] with random sign.
    mode:  "exact-chain" or "tolerance-chain" (see module docstring).
    noise0_norm: l2 norm of the additive observation noise.
    dictionaries: optional pre-built chain; layers are generated when
    absent (first layer from `ensemble`, deeper exact-chain layers with
    disjoint column supports).
    """
    shape = [(int(a), int(b)) for a, b in shape]
    lam = [int(v) for v in lam]
    J = len(shape)
    if len(lam) != J:
        raise ShapeMismatch("need one budget per layer")
    if any(v < 1 for v in lam):
        raise InfeasibleBudget("budgets must be >= 1")
    for j in range(1, J):
        if shape[j][0] != shape[j - 1][1]:
            raise ShapeMismatch("shape list is not chain compatible")
    for j in range(J):
        if lam[j] > shape[j][1]:
            raise InfeasibleBudget(
                "budget %d exceeds code dimension %d" % (lam[j], shape[j][1]))
    if mode not in ("exact-chain", "tolerance-chain"):
        raise ValueError("mode must be 'exact-chain' or 'tolerance-chain'")

    rng = make_generator(seed)
    if dictionaries is not None:
        dicts = (dictionaries if isinstance(dictionaries, LayeredDictionary)
                 else LayeredDictionary(dictionaries))
        if [(dicts[j].rows, dicts[j].cols) for j in range(1, J + 1)] != shape:
            raise ShapeMismatch("provided dictionaries do not match shape")
    else:
        layers = [_make_layer(shape[0][0], shape[0][1], ensemble, rng)]
        for j in range(1, J):
            rows, cols = shape[j]
            if mode == "exact-chain":
                fill = lam[j - 1] // lam[j]
                layers.append(disjoint_support_dictionary(rows, cols, fill,
                                                          rng))
            else:
                layers.append(_make_layer(rows, cols, ensemble, rng))
        dicts = LayeredDictionary(layers)

    if mode == "exact-chain":
        x = _sample_code(shape[-1][1], lam[-1], B, rng)
        codes = [x]
        for j in range(J, 1, -1):
            x = dicts[j].data @ x
            if np.count_nonzero(x) > lam[j - 2]:
                raise InfeasibleBudget(
                    "layer %d synthesis violates budget %d" % (j - 1,
                                                               lam[j - 2]))
            codes.append(x)
        codes.reverse()
        eps = [0.0] * J
    else:
        codes = [_sample_code(shape[j][1], lam[j], B, rng) for j in range(J)]
        eps = [0.0] * J
        for j in range(2, J + 1):
            eps[j - 1] = float(np.linalg.norm(codes[j - 2]
                                              - dicts[j].data @ codes[j - 1]))

    clean = dicts[1].data @ codes[0]
    noise0 = np.zeros(shape[0][0])
    if noise0_norm > 0:
        noise0 = rng.standard_normal(shape[0][0])
        noise0 *= noise0_norm / np.linalg.norm(noise0)
    eps[0] = float(noise0_norm)
    y = clean + noise0
    truth = [SparseCode(c, budget=lam[j]) for j, c in enumerate(codes)]
    return DscInstance(y=y, dicts=dicts, lam=lam, eps=eps, truth=truth,
                       noise0=noise0, seed=seed, mode=mode)
