"""Domain types for the layered sparse coding problem.

A problem instance is a chain of dictionaries D_1 ... D_J together with
per-layer sparsity budgets lambda_j and residual tolerances eps_j; a set of
codes x_1 ... x_J solves it when

    ||x_{j-1} - D_j x_j||_2 <= eps_j   and   ||x_j||_0 <= lambda_j,

with x_0 = y the observation. All types are immutable after construction
and every operation here is a pure function.
"""

import numpy as np

from .errors import IndexOutOfRange, MissingTruth, ShapeMismatch, ZeroColumn

STRUCTURAL_TOL = 1e-9


def _as_matrix(data):
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2:
        raise ShapeMismatch("expected a 2-d matrix, got ndim=%d" % arr.ndim)
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeMismatch("matrix must have at least one row and column")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


class Dictionary:
    """A dense dictionary; columns are the atoms.

    rows = signal dimension of the layer above, cols = code dimension.
    """

    def __init__(self, data, normalized=False):
        arr = _as_matrix(data).copy()
        if normalized:
            norms = np.linalg.norm(arr, axis=0)
            if np.any(np.abs(norms - 1.0) > STRUCTURAL_TOL):
                raise ValueError(
                    "normalized flag set but a column norm deviates from 1 "
                    "by more than %g" % STRUCTURAL_TOL
                )
        arr.setflags(write=False)
        self.data = arr
        self.normalized = bool(normalized)

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return "Dictionary(%dx%d, normalized=%s)" % (
            self.rows, self.cols, self.normalized)


def normalize_columns(D):
    """Scale every column of D to unit Euclidean norm.

    Accepts a Dictionary or a plain array. Raises ZeroColumn for any column
    with norm below 1e-12.
    """
    arr = D.data if isinstance(D, Dictionary) else _as_matrix(D)
    norms = np.linalg.norm(arr, axis=0)
    bad = np.nonzero(norms < 1e-12)[0]
    if bad.size:
        raise ZeroColumn(int(bad[0]), float(norms[bad[0]]))
    return Dictionary(arr / norms, normalized=True)


class LayeredDictionary:
    """An ordered chain D_1 ... D_J with cols(D_j) = rows(D_{j+1})."""

    def __init__(self, layers):
        layers = [d if isinstance(d, Dictionary) else Dictionary(d)
                  for d in layers]
        if not layers:
            raise ShapeMismatch("need at least one layer")
        for j in range(len(layers) - 1):
            if layers[j].cols != layers[j + 1].rows:
                raise ShapeMismatch(
                    "layer %d has %d cols but layer %d has %d rows"
                    % (j + 1, layers[j].cols, j + 2, layers[j + 1].rows))
        self.layers = tuple(layers)

    @property
    def depth(self):
        return len(self.layers)

    def __getitem__(self, j):
        """1-based layer accessor: self[j] is D_j."""
        if not 1 <= j <= self.depth:
            raise IndexOutOfRange("layer index %r outside 1..%d" % (j, self.depth))
        return self.layers[j - 1]

    def dims(self):
        """[d_0, d_1, ..., d_J]: signal dimension followed by code dimensions."""
        return [self.layers[0].rows] + [d.cols for d in self.layers]


def layer_product(dicts, j, j0):
    """The segment product D_j D_{j+1} ... D_{j0} (1-based, inclusive).

    layer_product(dicts, 1, j) is the prefix product D_[j].
    """
    if not isinstance(dicts, LayeredDictionary):
        dicts = LayeredDictionary(dicts)
    if not (1 <= j <= j0 <= dicts.depth):
        raise IndexOutOfRange(
            "need 1 <= j <= j0 <= %d, got j=%r j0=%r" % (dicts.depth, j, j0))
    out = dicts[j].data
    for k in range(j + 1, j0 + 1):
        out = out @ dicts[k].data
    return Dictionary(out)


class SparseCode:
    """A code vector with its (derived) support and its budget lambda."""

    def __init__(self, values, budget=None):
        values = np.asarray(values, dtype=float).copy()
        if values.ndim != 1:
            raise ShapeMismatch("code must be a vector")
        if not np.all(np.isfinite(values)):
            raise ValueError("code entries must be finite")
        values.setflags(write=False)
        self.values = values
        self.support = tuple(int(i) for i in np.nonzero(values)[0])
        if budget is None:
            budget = len(self.support)
        budget = int(budget)
        if budget < 0:
            raise ValueError("budget must be a nonnegative integer")
        self.budget = budget

    @property
    def l0(self):
        return len(self.support)

    @property
    def feasible(self):
        return self.l0 <= self.budget

    def __repr__(self):
        return "SparseCode(dim=%d, l0=%d, budget=%d)" % (
            self.values.size, self.l0, self.budget)


class SignalClass:
    """The class X(B, delta) at sparsity s.

    Codes have at most s nonzeros, each of magnitude at most B, and the
    observation noise has l1 norm at most delta.
    """

    def __init__(self, B, s, delta=0.0):
        B = float(B)
        s = int(s)
        delta = float(delta)
        if B <= 0:
            raise ValueError("B must be positive")
        if s < 0:
            raise ValueError("s must be a nonnegative integer")
        if delta < 0:
            raise ValueError("delta must be nonnegative")
        self.B = B
        self.s = s
        self.delta = delta

    def __repr__(self):
        return "SignalClass(B=%g, s=%d, delta=%g)" % (self.B, self.s, self.delta)


class DscInstance:
    """One concrete problem: observation, chain, budgets, tolerances.

    truth (optional) holds the planted codes x_1 ... x_J and noise0 the
    observation noise vector eps_0 that was added to the clean synthesis.
    """

    def __init__(self, y, dicts, lam, eps, truth=None, noise0=None,
                 seed=None, mode=None):
        if not isinstance(dicts, LayeredDictionary):
            dicts = LayeredDictionary(dicts)
        y = np.asarray(y, dtype=float).copy()
        if y.ndim != 1 or y.size != dicts[1].rows:
            raise ShapeMismatch("y must be a vector of length %d" % dicts[1].rows)
        y.setflags(write=False)
        lam = [int(v) for v in lam]
        eps = [float(v) for v in eps]
        J = dicts.depth
        if len(lam) != J or len(eps) != J:
            raise ShapeMismatch("need len(lambda) = len(eps) = J = %d" % J)
        if any(v < 0 for v in lam) or any(v < 0 for v in eps):
            raise ValueError("budgets and tolerances must be nonnegative")
        if truth is not None:
            truth = [c if isinstance(c, SparseCode) else SparseCode(c)
                     for c in truth]
            if len(truth) != J:
                raise ShapeMismatch("truth must have one code per layer")
            prev = y
            for j in range(1, J + 1):
                x = truth[j - 1]
                if x.values.size != dicts[j].cols:
                    raise ShapeMismatch("truth code %d has wrong length" % j)
                if x.l0 > lam[j - 1]:
                    raise ValueError(
                        "truth code %d violates its budget (%d > %d)"
                        % (j, x.l0, lam[j - 1]))
                resid = np.linalg.norm(prev - dicts[j].data @ x.values)
                tol = eps[j - 1] if eps[j - 1] > 0 else STRUCTURAL_TOL
                if resid > tol + STRUCTURAL_TOL:
                    raise ValueError(
                        "layer %d residual %.3e exceeds tolerance %.3e"
                        % (j, resid, tol))
                prev = x.values
        if noise0 is not None:
            noise0 = np.asarray(noise0, dtype=float).copy()
            if noise0.shape != y.shape:
                raise ShapeMismatch("noise0 must match y")
            noise0.setflags(write=False)
        self.y = y
        self.dicts = dicts
        self.lam = tuple(lam)
        self.eps = tuple(eps)
        self.truth = tuple(truth) if truth is not None else None
        self.noise0 = noise0
        self.seed = None if seed is None else int(seed)
        self.mode = mode

    @property
    def depth(self):
        return self.dicts.depth

    def layer_input(self, j):
        """The signal the layer-j subproblem decodes: y for j=1, else x_{j-1}."""
        if j == 1:
            return self.y
        if self.truth is None:
            raise MissingTruth("layer %d input needs truth codes" % j)
        return self.truth[j - 2].values
