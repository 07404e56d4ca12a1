"""Top-down layered pursuit with per-layer error accounting.

solve_layered decodes layer 1 from the observation and every deeper
layer from the previous layer's output (never from the truth). Each
layer's error budget widens by the certified bound of the layer above:

* lista: the layer signal class uses B_j = max |x_j| (from truth when
  present, a matched-filter estimate otherwise), s_j = lambda_j, and an
  l1 noise bound delta_j that adds the previous schedule's final
  analytic envelope to sqrt(dim) * eps_j;
* l0: the residual tolerance at layer j >= 2 adds the running l2 ledger
  bound to eps_j, so the planted code stays feasible for the perturbed
  input the solver actually sees.

fit_rate estimates c of an error curve ~ C exp(-c k) by least squares
on -log(err); entries below 1e-14 are discarded as float noise.
"""

import math
from dataclasses import dataclass

import numpy as np

from .activations import relu
from .coherence import mutual_coherence
from .errors import ShapeMismatch, TooFewPoints
from .lista import compute_schedule, lista_general_run, predicted_error
from .model import SignalClass, SparseCode
from .pursuit import basis_pursuit, brute_force_l0, ista

_RATE_FLOOR = 1e-14


@dataclass(frozen=True)
class LayeredRun:
    method: str
    iterations: int
    codes: tuple
    iterates: tuple
    errors: tuple
    residuals: tuple
    thetas: tuple
    envelopes: tuple
    rates: tuple
    delta: tuple
    schedules: tuple


def _fit_or_none(errors):
    try:
        return fit_rate(errors)
    except TooFewPoints:
        return None


def solve_layered(instance, method, K=30, activation=None, gamma=0.1,
                  mode="exact", certificates=None):
    """Solve all layers with one method; see the module docstring.

    certificates optionally carries one CoherenceCertificate per layer
    to spare repeated LP solves for lista schedules.
    """
    if method not in ("lista", "ista", "bp", "l0"):
        raise ValueError("method must be lista|ista|bp|l0")
    if activation is None:
        activation = relu()
    J = instance.depth
    dicts = instance.dicts
    truth = instance.truth

    codes = []
    iterates = []
    errors = []
    residuals = []
    thetas = []
    envelopes = []
    rates = []
    schedules = []

    # running l2 ledger for the l0 tolerance inflation
    if instance.noise0 is not None:
        delta_prev = float(np.linalg.norm(instance.noise0))
    else:
        delta_prev = float(instance.eps[0])
    delta = [delta_prev]

    signal = instance.y
    prev_schedule = None
    for j in range(1, J + 1):
        D = dicts[j]
        lam_j = instance.lam[j - 1]
        eps_j = instance.eps[j - 1]
        x_true = truth[j - 1].values if truth is not None else None

        if method == "lista":
            if x_true is not None and np.any(x_true != 0):
                B_j = float(np.abs(x_true).max())
            else:
                B_j = max(float(np.abs(D.data.T @ signal).max()), 1e-12)
            if j == 1:
                if instance.noise0 is not None:
                    delta_class = float(np.abs(instance.noise0).sum())
                else:
                    delta_class = math.sqrt(D.rows) * eps_j
            else:
                delta_class = prev_schedule.s_hat_trace[-1] \
                    + math.sqrt(D.rows) * eps_j
            klass = SignalClass(B=B_j, s=lam_j, delta=delta_class)
            cert = None if certificates is None else certificates[j - 1]
            sched = compute_schedule(D, klass, K, mode=mode,
                                     activation=activation,
                                     certificate=cert)
            traj = lista_general_run(sched, D, signal)
            code = SparseCode(traj[-1])
            prev_schedule = sched
            schedules.append(sched)
            thetas.append(sched.theta_list)
            envelopes.append(tuple(
                predicted_error(sched, activation, k)[1]
                for k in range(K + 1)))
            iterates.append(tuple(traj))
        elif method == "ista":
            res = ista(D, signal, gamma, K, keep_iterates=True)
            code = res.code
            traj = list(res.iterates)
            schedules.append(None)
            thetas.append(None)
            envelopes.append(None)
            iterates.append(res.iterates)
        elif method == "bp":
            code = basis_pursuit(D, signal)
            traj = [code.values]
            schedules.append(None)
            thetas.append(None)
            envelopes.append(None)
            iterates.append((code.values,))
        else:  # l0
            tol = eps_j if j == 1 else eps_j + (
                delta_prev if not math.isnan(delta_prev) else 0.0)
            code = brute_force_l0(D, signal, lam_j, eps=tol)
            traj = [code.values]
            schedules.append(None)
            thetas.append(None)
            envelopes.append(None)
            iterates.append((code.values,))

        if x_true is not None:
            err = tuple(float(np.linalg.norm(v - x_true)) for v in traj)
            errors.append(err)
            rates.append(_fit_or_none(err))
        else:
            errors.append(None)
            rates.append(None)

        residuals.append(float(np.linalg.norm(signal - D.data @ code.values)))
        codes.append(code)

        # advance the l2 ledger with the tolerance this layer enforced
        mu_j = mutual_coherence(D.data) if D.cols >= 2 else 0.0
        q = 1.0 - (2.0 * lam_j - 1.0) * mu_j
        used = eps_j if j == 1 else eps_j + (
            delta_prev if not math.isnan(delta_prev) else 0.0)
        if q > 0 and not math.isnan(delta_prev):
            delta_prev = (used + delta_prev) / math.sqrt(q)
        else:
            delta_prev = math.nan
        delta.append(delta_prev)

        signal = code.values

    return LayeredRun(method=method, iterations=K, codes=tuple(codes),
                      iterates=tuple(iterates), errors=tuple(errors),
                      residuals=tuple(residuals), thetas=tuple(thetas),
                      envelopes=tuple(envelopes), rates=tuple(rates),
                      delta=tuple(delta), schedules=tuple(schedules))


def fit_rate(errors):
    """Slope of -log(err) against the iteration index, with r^2.

    Entries at or below 1e-14 are dropped (float noise); at least 3
    usable points are required.
    """
    arr = np.asarray(errors, dtype=float)
    if arr.ndim != 1:
        raise ShapeMismatch("errors must be a 1-d sequence")
    keep = arr > _RATE_FLOOR
    if int(keep.sum()) < 3:
        raise TooFewPoints("need >= 3 errors above the 1e-14 floor")
    ks = np.nonzero(keep)[0].astype(float)
    ys = -np.log(arr[keep])
    A = np.vstack([ks, np.ones_like(ks)]).T
    (slope, intercept), _, _, _ = np.linalg.lstsq(A, ys, rcond=None)
    fitted = A @ np.array([slope, intercept])
    ss_res = float(np.sum((ys - fitted) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(r2)


def l2l1_gap(x_tilde, x_star, D_j, x_prev, gamma):
    """L(x_tilde) - L(x_star) with L(x) = ||x_prev - D x||^2 + gamma ||x||_1.

    Nonnegative whenever x_star is the certified minimizer; gamma = 0
    reduces the gap to a difference of squared residuals.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    xt = x_tilde.values if isinstance(x_tilde, SparseCode) else \
        np.asarray(x_tilde, dtype=float)
    xs = x_star.values if isinstance(x_star, SparseCode) else \
        np.asarray(x_star, dtype=float)
    A = D_j.data if hasattr(D_j, "data") else np.asarray(D_j, dtype=float)
    x_prev = np.asarray(x_prev, dtype=float)
    if xt.shape != xs.shape or xt.shape != (A.shape[1],) \
            or x_prev.shape != (A.shape[0],):
        raise ShapeMismatch("code / dictionary / input shapes disagree")

    def loss(x):
        r = x_prev - A @ x
        return float(r @ r) + gamma * float(np.abs(x).sum())

    return loss(xt) - loss(xs)
