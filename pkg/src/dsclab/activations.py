"""Activation functions for the generalized shrinkage iteration.

An Activation is the identity on [0, inf) and one of two things on the
negative axis:

* relu: exactly zero (the classic case);
* bounded-negative: a smooth curve beta * tanh(L x / beta), which is
  L-Lipschitz on the negative side and bounded by beta in magnitude.

The composition power m applies the base function m times (literally,
not in closed form, so any conforming curve could be swapped in). For
x < 0 the m-fold value obeys |rho^m(x)| <= min(L^m |x|, L^(m-1) beta),
the property the error envelopes rely on.

The shrink pair rho^m(v - theta) - rho^m(-v - theta) generalizes soft
thresholding; with kind="relu" it reproduces soft_threshold bit for bit.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Activation:
    kind: str = "relu"
    beta: float = 0.0
    L: float = 0.0
    m: int = 1

    def __post_init__(self):
        if self.kind not in ("relu", "bounded-negative"):
            raise ConfigError("unknown activation kind %r" % (self.kind,),
                              field="kind")
        if self.beta < 0:
            raise ConfigError("beta must be >= 0", field="beta")
        if self.L < 0:
            raise ConfigError("L must be >= 0", field="L")
        if self.m < 1 or int(self.m) != self.m:
            raise ConfigError("m must be a positive integer", field="m")

    def rho(self, x):
        """One application of the base activation."""
        x = np.asarray(x, dtype=float)
        if self.kind == "relu" or self.beta == 0.0:
            return np.maximum(x, 0.0)
        neg = self.beta * np.tanh(self.L * x / self.beta)
        return np.where(x >= 0, x, neg)

    def apply(self, x):
        """m-fold composition rho^m."""
        out = np.asarray(x, dtype=float)
        for _ in range(self.m):
            out = self.rho(out)
        return out

    def shrink(self, v, theta):
        """rho^m(v - theta) - rho^m(-v - theta), the generalized shrinkage."""
        v = np.asarray(v, dtype=float)
        return self.apply(v - theta) - self.apply(-v - theta)


def relu(m=1):
    return Activation(kind="relu", m=m)


def bounded_negative(beta, L, m=1):
    return Activation(kind="bounded-negative", beta=beta, L=L, m=m)


def parse_activation(text):
    """CLI syntax: 'relu' or 'bneg:BETA,L,M' (M optional, default 1)."""
    text = text.strip()
    if text == "relu":
        return relu()
    if text.startswith("bneg:"):
        parts = text[len("bneg:"):].split(",")
        if len(parts) not in (2, 3):
            raise ConfigError("expected bneg:BETA,L[,M]", field="activation")
        beta, L = float(parts[0]), float(parts[1])
        m = int(parts[2]) if len(parts) == 3 else 1
        return bounded_negative(beta, L, m)
    raise ConfigError("unknown activation %r" % (text,), field="activation")
