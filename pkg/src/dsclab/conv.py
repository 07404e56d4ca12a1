"""Strided convolution with zero extension, in one and two dimensions.

The convention is asymmetric: output index i (0-based) reads the input
window starting at i * stride,

    (w *_t x)[i] = sum_k w[k] x[i t + k],   i = 0 .. ceil(d / t) - 1,

with out-of-range input entries treated as zero. A multi-channel DCNN
stacks these: channel l of layer j is

    h_{j,l} = rho( sum_i w^{(j)}_{l,i} *_{t_j} h_{j-1,i} + b^{(j)}_l 1 ).

The 2-D variant applies the same window arithmetic to both axes with a
square filter and a common stride per layer.
"""

from dataclasses import dataclass

import numpy as np

from .activations import Activation
from .errors import ShapeMismatch


def conv1d(w, x, t):
    """Strided 1-D convolution of filter w with x, zero-extended."""
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    t = int(t)
    if w.ndim != 1 or x.ndim != 1:
        raise ShapeMismatch("conv1d expects vectors")
    if t < 1 or w.size < 1:
        raise ValueError("need filter size >= 1 and stride >= 1")
    d = x.size
    n_out = -(-d // t)
    pad = np.zeros(n_out * t + w.size)
    pad[:d] = x
    out = np.zeros(n_out)
    for k in range(w.size):
        out += w[k] * pad[k:k + n_out * t:t]
    return out


def conv2d(w, x, t):
    """Strided 2-D convolution with a square filter, zero-extended."""
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    t = int(t)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or x.ndim != 2:
        raise ShapeMismatch("conv2d expects a square filter and a matrix")
    if t < 1 or w.shape[0] < 1:
        raise ValueError("need filter size >= 1 and stride >= 1")
    s = w.shape[0]
    r_out = -(-x.shape[0] // t)
    c_out = -(-x.shape[1] // t)
    pad = np.zeros((r_out * t + s, c_out * t + s))
    pad[:x.shape[0], :x.shape[1]] = x
    out = np.zeros((r_out, c_out))
    for k in range(s):
        for l in range(s):
            out += w[k, l] * pad[k:k + r_out * t:t, l:l + c_out * t:t]
    return out


@dataclass(frozen=True)
class ConvSpec:
    """Filter sizes, strides and channel counts of a depth-J DCNN.

    channels has length J + 1 and starts with the input channel count.
    Layer j maps length d_{j-1} to d_j = ceil(d_{j-1} / strides[j]).
    """

    filter_sizes: tuple
    strides: tuple
    channels: tuple

    def __post_init__(self):
        object.__setattr__(self, "filter_sizes",
                           tuple(int(v) for v in self.filter_sizes))
        object.__setattr__(self, "strides",
                           tuple(int(v) for v in self.strides))
        object.__setattr__(self, "channels",
                           tuple(int(v) for v in self.channels))
        J = len(self.filter_sizes)
        if len(self.strides) != J or len(self.channels) != J + 1:
            raise ShapeMismatch("need J filter sizes, J strides, J+1 channel "
                                "counts")
        if any(s < 2 for s in self.filter_sizes):
            raise ValueError("filter sizes must be >= 2")
        if any(t < 1 for t in self.strides):
            raise ValueError("strides must be >= 1")
        if any(n < 1 for n in self.channels):
            raise ValueError("channel counts must be >= 1")

    @property
    def depth(self):
        return len(self.filter_sizes)

    def layer_dims(self, d0):
        dims = [int(d0)]
        for t in self.strides:
            dims.append(-(-dims[-1] // t))
        return dims


def _check_params(spec, params):
    if len(params) != spec.depth:
        raise ShapeMismatch("need one (filters, bias) pair per layer")
    for j, (w, b) in enumerate(params):
        w = np.asarray(w, dtype=float)
        b = np.asarray(b, dtype=float)
        n_out, n_in = spec.channels[j + 1], spec.channels[j]
        if w.shape[:2] != (n_out, n_in) or b.shape != (n_out,):
            raise ShapeMismatch(
                "layer %d expects filters (%d, %d, ...) and bias (%d,)"
                % (j + 1, n_out, n_in, n_out))
        yield w, b


def dcnn_forward(spec, params, x, rho):
    """Layer outputs h_1 .. h_J of a 1-D multi-channel DCNN.

    params is a list of (filters, bias) with filters of shape
    (n_j, n_{j-1}, s_j). The input may be a vector (one channel) or a
    (n_0, d_0) array. Each h_j has shape (n_j, d_j).
    """
    if not isinstance(rho, Activation):
        raise TypeError("rho must be an Activation")
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[0] != spec.channels[0]:
        raise ShapeMismatch("input has %d channels, spec says %d"
                            % (x.shape[0], spec.channels[0]))
    outs = []
    h = x
    for j, (w, b) in enumerate(_check_params(spec, params)):
        if w.ndim != 3 or w.shape[2] != spec.filter_sizes[j]:
            raise ShapeMismatch("layer %d filters must have length %d"
                                % (j + 1, spec.filter_sizes[j]))
        t = spec.strides[j]
        d_out = -(-h.shape[1] // t)
        nxt = np.empty((w.shape[0], d_out))
        for l in range(w.shape[0]):
            acc = np.full(d_out, b[l])
            for i in range(h.shape[0]):
                acc += conv1d(w[l, i], h[i], t)
            nxt[l] = rho.apply(acc)
        outs.append(nxt)
        h = nxt
    return outs


def dcnn_forward_2d(spec, params, x, rho):
    """2-D analogue of dcnn_forward with square filters.

    The input may be a matrix (one channel) or (n_0, r, c); filters have
    shape (n_j, n_{j-1}, s_j, s_j) and each h_j has shape (n_j, r_j, c_j)
    with both spatial dims divided (ceiling) by the stride.
    """
    if not isinstance(rho, Activation):
        raise TypeError("rho must be an Activation")
    x = np.asarray(x, dtype=float)
    if x.ndim == 2:
        x = x[None, :, :]
    if x.shape[0] != spec.channels[0]:
        raise ShapeMismatch("input has %d channels, spec says %d"
                            % (x.shape[0], spec.channels[0]))
    outs = []
    h = x
    for j, (w, b) in enumerate(_check_params(spec, params)):
        s = spec.filter_sizes[j]
        if w.ndim != 4 or w.shape[2:] != (s, s):
            raise ShapeMismatch("layer %d filters must be (%d, %d) squares"
                                % (j + 1, s, s))
        t = spec.strides[j]
        r_out = -(-h.shape[1] // t)
        c_out = -(-h.shape[2] // t)
        nxt = np.empty((w.shape[0], r_out, c_out))
        for l in range(w.shape[0]):
            acc = np.full((r_out, c_out), b[l])
            for i in range(h.shape[0]):
                acc += conv2d(w[l, i], h[i], t)
            nxt[l] = rho.apply(acc)
        outs.append(nxt)
        h = nxt
    return outs
