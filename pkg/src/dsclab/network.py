"""Compile a LISTA schedule into explicit affine+activation stages.

Each iteration becomes one stage state -> A act(B state - c) + e over
the stacked state (x; y):

  stage 1 (input y alone):
      B = [W'; -W'; I_m]          c = (theta 1_d; theta 1_d; -M 1_m)
  stage k >= 2 (state in R^(d+m)):
      B = [I - W'D, W'; -(I - W'D), -W'; O, I_m]
  both:
      A = [I_d, -I_d, O; O, O, I_m]   e = (0_d; -M 1_m)

The top 2d rows realize the shrinkage pair act(v - theta) - act(-v -
theta); the bottom m rows carry y through the activation by shifting
with M = s B_class max|D_ij| + delta, an upper bound on |y_i| over the
signal class. Inputs below -M clip the carry (a warning, not an error:
the arithmetic stays well defined, the input is just outside the class
the network was compiled for). At y_i = -M exactly the carry is
preserved (act(0) = 0).

Dense matrices are kept as-is; the logarithmic-depth convolutional
factorization the analysis appeals to is reported only through the
symbolic estimates of size_report, because equivalence testing needs
exact blocks.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .activations import Activation, relu
from .errors import CarryClipped, ShapeMismatch
from .model import Dictionary


@dataclass(frozen=True)
class Stage:
    A: np.ndarray
    B: np.ndarray
    c: np.ndarray
    e: np.ndarray
    activation: Activation

    def __post_init__(self):
        for blk in (self.A, self.B, self.c, self.e):
            blk.setflags(write=False)


@dataclass(frozen=True)
class AffineNetwork:
    stages: tuple
    input_dim: int
    code_dim: int
    carry_bound: float

    @property
    def state_dims(self):
        return [self.input_dim] + [s.A.shape[0] for s in self.stages]

    def readout(self, state):
        """Extract the code block x from a stage output state."""
        return state[:self.code_dim]


def compile(schedule, D, signal_class=None):
    """Materialize the schedule as an AffineNetwork.

    The carry constant M comes from `signal_class` (defaults to the
    schedule's own class).
    """
    if not isinstance(D, Dictionary):
        D = Dictionary(np.asarray(D, dtype=float))
    if signal_class is None:
        signal_class = schedule.signal_class
    m, d = D.rows, D.cols
    act = schedule.activation
    M = signal_class.s * signal_class.B * float(np.abs(D.data).max()) \
        + signal_class.delta
    A_out = np.zeros((d + m, 2 * d + m))
    A_out[:d, :d] = np.eye(d)
    A_out[:d, d:2 * d] = -np.eye(d)
    A_out[d:, 2 * d:] = np.eye(m)
    e = np.zeros(d + m)
    e[d:] = -M
    stages = []
    for k in range(schedule.iterations):
        W = schedule.w_list[k]
        if W.shape != (m, d):
            raise ShapeMismatch("schedule weights do not match dictionary")
        theta = schedule.theta_list[k]
        c = np.concatenate([np.full(2 * d, theta), np.full(m, -M)])
        if k == 0:
            B = np.vstack([W.T, -W.T, np.eye(m)])
        else:
            top = np.hstack([np.eye(d) - W.T @ D.data, W.T])
            carry = np.hstack([np.zeros((m, d)), np.eye(m)])
            B = np.vstack([top, -top, carry])
        stages.append(Stage(A=A_out.copy(), B=B, c=c, e=e.copy(),
                            activation=act))
    return AffineNetwork(stages=tuple(stages), input_dim=m, code_dim=d,
                         carry_bound=M)


def forward(net, y, return_stages=False):
    """Run all stages; returns x^(K) (or every stage's code readout).

    Warns with CarryClipped when a carry row's pre-activation goes
    negative, i.e. some |y_i| exceeds the compiled class bound M.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (net.input_dim,):
        raise ShapeMismatch("input must have length %d" % net.input_dim)
    if not net.stages:
        zero = np.zeros(net.code_dim)
        return [] if return_stages else zero
    state = y
    d = net.code_dim
    outs = []
    for idx, st in enumerate(net.stages):
        pre = st.B @ state - st.c
        if np.any(pre[2 * d:] < 0.0):
            warnings.warn(
                "stage %d: carried input fell below the class bound M=%.3g"
                % (idx + 1, net.carry_bound), CarryClipped)
        state = st.A @ st.activation.apply(pre) + st.e
        if return_stages:
            outs.append(net.readout(state).copy())
    if return_stages:
        return outs
    return net.readout(state).copy()


def _pair_param_count(m, d, K):
    """Exact nonzero count of the dense compilation for one dictionary."""
    if K <= 0:
        return 0
    a = 2 * d + m
    c = 2 * d + m
    e = m
    first = (2 * d * m + m) + a + c + e
    later = (2 * d * (d + m) + m) + a + c + e
    return first + (K - 1) * later


def size_report(dims, K, kernel_size, nets=None):
    """Depth/weight asymptotics plus the exact dense parameter count.

    dims = [d_0, ..., d_J]; the estimates are K log_s prod(d_{j-1}+d_j)
    for depth and K prod (d_{j-1}+d_j)^2 for weights, with s the kernel
    size of the hypothetical convolutional realization. When compiled
    networks are supplied their actual nonzeros are counted; otherwise
    the count assumes generic dense blocks.
    """
    dims = [int(v) for v in dims]
    K = int(K)
    kernel_size = int(kernel_size)
    if kernel_size < 2:
        raise ValueError("kernel size must be >= 2")
    pairs = list(zip(dims[:-1], dims[1:]))
    prod = 1.0
    for a, b in pairs:
        prod *= a + b
    depth = 0.0 if K == 0 else K * math.log(prod, kernel_size)
    weight = float(K)
    for a, b in pairs:
        weight *= float(a + b) ** 2
    if K == 0:
        weight = 0.0
    if nets is not None:
        exact = sum(int(np.count_nonzero(blk))
                    for net in nets for st in net.stages
                    for blk in (st.A, st.B, st.c, st.e))
    else:
        exact = sum(_pair_param_count(a, b, K) for a, b in pairs)
    return {"depth_estimate": depth, "weight_estimate": weight,
            "exact_param_count": exact}
