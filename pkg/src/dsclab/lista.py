"""Analytic LISTA-CP schedules and the shrinkage iterations they drive.

A schedule fixes, for every iteration k, the weight matrix W (a minimal
max-entry minimizer from the coherence module, or D itself in fast
mode) and a threshold theta_k that dominates the worst-case coordinate
error over the signal class {|x*_i| <= B, ||x||_0 <= s, ||eps||_1 <=
delta}. Thresholds follow the analytic l1-error recursion s_hat:

    theta_k   = mu_tilde * s_hat_k + C_W * delta + floor
    relu:              s_hat_{k+1} = (2s-1) mu_tilde s_hat_k
                                     + 2 s C_W delta + s * floor
    bounded-negative:  s_hat_{k+1} = g (mu_tilde s_hat_k + C_W delta
                                     + floor) + 2 s beta L^(m-1),
                       g = 2 L^m d + (2 - 2 L^m) s

The relu recursion keeps the support-containment argument tight (only
on-support coordinates contribute, and the j != i exclusion removes one
mu_tilde s_hat_k term per coordinate); the bounded-negative one adds the
negative-side leakage of all d coordinates. The tiny floor
(1e-12 * s * B) keeps thresholds strictly above the analytic supremum,
so exact boundary ties cannot flip a coordinate on.

predicted_error reports the plain geometric envelope

    alpha = mu_tilde * g,   const = g C_W delta + 2 s beta L^(m-1)
    l1(k) = alpha^k s_hat_0 + const (1 - alpha^k) / (1 - alpha)

(for relu g = 2s), which upper-bounds the recursion above.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .activations import Activation, relu
from .coherence import generalized_mutual_coherence
from .errors import (NotContractiveWarning, RateNotContractive, ShapeMismatch,
                     SparsityTooHigh)
from .model import Dictionary, SignalClass
from .pursuit import soft_threshold

_THETA_FLOOR_SCALE = 1e-12


@dataclass(frozen=True)
class ListaSchedule:
    w_list: tuple
    theta_list: tuple
    signal_class: SignalClass
    mu_tilde: float
    c_w: float
    s_hat_trace: tuple
    activation: Activation

    @property
    def iterations(self):
        return len(self.theta_list)

    @property
    def code_dim(self):
        return self.w_list[0].shape[1]


def _leak_factor(activation, d, s):
    """g = 2 L^m d + (2 - 2 L^m) s; equals 2s for relu (no negative side)."""
    if activation.kind == "relu":
        Lm = 0.0
    else:
        Lm = activation.L ** activation.m
    return 2.0 * Lm * d + (2.0 - 2.0 * Lm) * s, Lm


def _beta_term(activation, s):
    if activation.kind == "relu" or activation.beta == 0.0:
        return 0.0
    return 2.0 * s * activation.beta * activation.L ** (activation.m - 1)


def compute_schedule(D, signal_class, K, mode="exact", activation=None,
                     certificate=None):
    """Materialize K iterations of (W, theta) for a signal class.

    mode="fast" uses W = D and mu in place of mu_tilde (looser but
    LP-free). A precomputed CoherenceCertificate can be passed to skip
    the LP stage when many schedules share one dictionary.
    """
    if not isinstance(D, Dictionary):
        D = Dictionary(np.asarray(D, dtype=float))
    if not isinstance(signal_class, SignalClass):
        raise TypeError("signal_class must be a SignalClass")
    if activation is None:
        activation = relu()
    K = int(K)
    if K < 0:
        raise ValueError("K must be nonnegative")
    cert = certificate
    if cert is None:
        cert = generalized_mutual_coherence(D, mode=mode)
    mu_t, c_w = cert.mu_tilde, cert.c_w
    s, B, delta = signal_class.s, signal_class.B, signal_class.delta
    if mu_t > 0 and s >= 0.5 * (1.0 + 1.0 / mu_t):
        raise SparsityTooHigh(
            "s = %d breaks the schedule hypothesis s < (1 + 1/mu_tilde)/2 "
            "= %.3f" % (s, 0.5 * (1.0 + 1.0 / mu_t)))
    if 2.0 * mu_t * s >= 1.0:
        warnings.warn("2 mu_tilde s = %.3f >= 1: no geometric decay"
                      % (2.0 * mu_t * s), NotContractiveWarning)
    g, _ = _leak_factor(activation, D.cols, s)
    if activation.kind != "relu" and mu_t * g >= 1.0:
        warnings.warn("mu_tilde * g = %.3f >= 1: no geometric decay"
                      % (mu_t * g), NotContractiveWarning)

    floor = _THETA_FLOOR_SCALE * s * B
    beta_term = _beta_term(activation, s)
    s_hat = [float(s) * B]
    thetas = []
    for _ in range(K):
        base = mu_t * s_hat[-1] + c_w * delta + floor
        thetas.append(base)
        if activation.kind == "relu":
            nxt = (2.0 * s - 1.0) * mu_t * s_hat[-1] \
                + 2.0 * s * c_w * delta + s * floor
        else:
            nxt = g * base + beta_term
        s_hat.append(max(nxt, 0.0))
    W = np.array(cert.w, dtype=float)
    W.setflags(write=False)
    return ListaSchedule(w_list=(W,) * K, theta_list=tuple(thetas),
                         signal_class=signal_class, mu_tilde=mu_t, c_w=c_w,
                         s_hat_trace=tuple(s_hat), activation=activation)


def _check_shapes(schedule, D, y):
    A = D.data if isinstance(D, Dictionary) else np.asarray(D, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.shape != (A.shape[0],):
        raise ShapeMismatch("y must have length %d" % A.shape[0])
    if schedule.iterations and schedule.w_list[0].shape != A.shape:
        raise ShapeMismatch("schedule weights do not match the dictionary")
    return A, y


def lista_cp_run(schedule, D, y):
    """Soft-threshold iteration x <- tau_theta(x + W'(y - D x)) from 0.

    Returns the full trajectory [x^(0), ..., x^(K)].
    """
    A, y = _check_shapes(schedule, D, y)
    x = np.zeros(A.shape[1])
    out = [x]
    for W, theta in zip(schedule.w_list, schedule.theta_list):
        x = soft_threshold(x + W.T @ (y - A @ x), theta)
        out.append(x)
    return out


def lista_general_run(schedule, D, y, rho=None):
    """Generalized-shrinkage iteration; with rho = relu it reproduces
    lista_cp_run bit for bit."""
    if rho is None:
        rho = schedule.activation
    A, y = _check_shapes(schedule, D, y)
    x = np.zeros(A.shape[1])
    out = [x]
    for W, theta in zip(schedule.w_list, schedule.theta_list):
        x = rho.shrink(x + W.T @ (y - A @ x), theta)
        out.append(x)
    return out


def predicted_error(schedule, rho, k):
    """Worst-case (l1, l2) error envelope after k iterations.

    alpha = mu_tilde (2 L^m d + (2 - 2 L^m) s) must be < 1; for relu
    this is the classic 2 mu_tilde s rate.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    s = schedule.signal_class.s
    delta = schedule.signal_class.delta
    g, _ = _leak_factor(rho, schedule.code_dim, s)
    alpha = schedule.mu_tilde * g
    if alpha >= 1.0:
        raise RateNotContractive("alpha = %.6f >= 1" % alpha)
    const = g * schedule.c_w * delta + _beta_term(rho, s)
    a_k = alpha ** k
    l1 = a_k * schedule.s_hat_trace[0] + const * (1.0 - a_k) / (1.0 - alpha)
    return l1, l1
