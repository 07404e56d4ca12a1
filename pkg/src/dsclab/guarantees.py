"""Machine-checkable certificates for the layered recovery theorems.

Everything here is a closed-form evaluation: uniqueness thresholds from
coherence, the per-layer stability recursion, its corollary closed
forms (with the two prior-work bounds they are compared against), the
non-cumulative and known-support variants, and the sparsity cap for
bounded-negative activations.

Infeasibility of a layer (1 - (2 lambda - 1) mu <= 0) is reported as a
flag with NaN downstream, never an exception: a certificate should say
"the theorem is silent here" without aborting a multi-layer report.
"""

import math
from dataclasses import dataclass

import numpy as np

from .coherence import mutual_coherence
from .errors import Infeasible, MissingCodes, ShapeMismatch, UndefinedForL
from .model import Dictionary, SparseCode

_RANK_REL_TOL = 1e-10


def uniqueness_bound(mu):
    """Sparsity threshold (1 + 1/mu) / 2; +inf for orthogonal columns."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must lie in [0, 1]")
    if mu == 0.0:
        return math.inf
    return 0.5 * (1.0 + 1.0 / mu)


@dataclass(frozen=True)
class UniquenessReport:
    bounds: tuple
    counts: tuple
    verdicts: tuple

    @property
    def overall(self):
        return all(self.verdicts)


def check_uniqueness(instance, mus, codes=None):
    """Per-layer verdicts ||x_j||_0 < (1 + 1/mu_j) / 2.

    mus holds one coherence per layer. Codes default to the instance's
    planted truth; the +inf bound of an orthogonal layer is capped at
    that layer's code dimension (a support can never exceed it).
    """
    if codes is None:
        codes = instance.truth
    if codes is None:
        raise MissingCodes("no codes to certify: instance has no truth")
    codes = [c if isinstance(c, SparseCode) else SparseCode(c) for c in codes]
    J = instance.depth
    if len(codes) != J or len(mus) != J:
        raise ShapeMismatch("need one code and one mu per layer")
    bounds = []
    counts = []
    verdicts = []
    for j in range(1, J + 1):
        b = uniqueness_bound(mus[j - 1])
        b = min(b, float(instance.dicts[j].cols))
        n = codes[j - 1].l0
        bounds.append(b)
        counts.append(n)
        verdicts.append(bool(n < b))
    return UniquenessReport(bounds=tuple(bounds), counts=tuple(counts),
                            verdicts=tuple(verdicts))


def relaxed_bound(profile, j0):
    """Largest of the layer / prefix / segment uniqueness thresholds.

    Takes the output of coherence_profile; any zero coherence makes the
    bound +inf.
    """
    j0 = int(j0)
    mus = [profile.single[j0], profile.prefix[j0]]
    mus += [profile.segment[(j, j0)] for j in range(1, j0)]
    return max(uniqueness_bound(mu) for mu in mus)


@dataclass(frozen=True)
class StabilityLedger:
    delta: tuple
    feasible: tuple
    eps0_norm: float
    eps: tuple
    lam: tuple
    mu: tuple


def stability_ledger(eps0_norm, eps, lam, mu):
    """delta_0 = ||eps_0||_2, delta_j = (eps_j + delta_{j-1}) / sqrt(q_j)
    with q_j = 1 - (2 lambda_j - 1) mu_j.

    Layers with q_j <= 0 are flagged infeasible; their delta and every
    deeper delta are NaN.
    """
    eps = [float(v) for v in eps]
    lam = [int(v) for v in lam]
    mu = [float(v) for v in mu]
    if not len(eps) == len(lam) == len(mu):
        raise ShapeMismatch("eps, lambda, mu must have equal lengths")
    if eps0_norm < 0 or any(v < 0 for v in eps):
        raise ValueError("noise norms must be nonnegative")
    delta = [float(eps0_norm)]
    feasible = []
    for j in range(len(eps)):
        q = 1.0 - (2.0 * lam[j] - 1.0) * mu[j]
        ok = q > 0.0
        feasible.append(ok)
        if ok and not math.isnan(delta[-1]):
            delta.append((eps[j] + delta[-1]) / math.sqrt(q))
        else:
            delta.append(math.nan)
    return StabilityLedger(delta=tuple(delta), feasible=tuple(feasible),
                           eps0_norm=float(eps0_norm), eps=tuple(eps),
                           lam=tuple(lam), mu=tuple(mu))


def corollary_bounds(eps0_norm, eps, lam, mu):
    """Closed forms of the stability recursion and the prior bounds.

    Per layer j (squared l2 bounds):
      noiseless: ||eps_0||^2 / prod_{i<=j} q_i        (all eps_j = 0)
      var0:      (sum_{i<=j} eps_i prod_{t<i} sqrt(q_t))^2 / prod_{i<=j} q_i
                 (clean observation, per-layer tolerances)
      papyan:    4x the noiseless bound
      sulam:     4 ||eps_0||^2 / prod_{i<=j} 4^(1-i) q_i

    Also returns ours/prior ratios (ours/papyan is 1/4 identically).
    Infeasible layers produce NaN entries.
    """
    ledger = stability_ledger(eps0_norm, eps, lam, mu)
    J = len(ledger.eps)
    q = [1.0 - (2.0 * ledger.lam[j] - 1.0) * ledger.mu[j] for j in range(J)]
    out = {"noiseless": [], "var0": [], "papyan": [], "sulam": [],
           "ratio_papyan": [], "ratio_sulam": []}
    e0sq = ledger.eps0_norm ** 2
    for j in range(1, J + 1):
        if not all(ledger.feasible[:j]):
            for key in out:
                out[key].append(math.nan)
            continue
        prod_q = math.prod(q[:j])
        noiseless = e0sq / prod_q
        acc = 0.0
        run = 1.0
        for i in range(j):
            acc += ledger.eps[i] * run
            run *= math.sqrt(q[i])
        var0 = acc ** 2 / prod_q
        papyan = 4.0 * noiseless
        sulam_prod = math.prod(4.0 ** (-i) * q[i] for i in range(j))
        sulam = 4.0 * e0sq / sulam_prod
        out["noiseless"].append(noiseless)
        out["var0"].append(var0)
        out["papyan"].append(papyan)
        out["sulam"].append(sulam)
        out["ratio_papyan"].append(0.25 if papyan > 0 else math.nan)
        out["ratio_sulam"].append(noiseless / sulam if sulam > 0
                                  else math.nan)
    return {k: tuple(v) for k, v in out.items()}


def noncumulative_bound(delta_j, eps_seg, lam_j0, mu_seg):
    """(eps_seg + delta_j) / sqrt(1 - (2 lambda_j0 - 1) mu_seg).

    Skips the layer-by-layer accumulation between j and j0 by using the
    segment product's coherence directly.
    """
    if delta_j < 0 or eps_seg < 0:
        raise ValueError("noise bounds must be nonnegative")
    q = 1.0 - (2.0 * int(lam_j0) - 1.0) * mu_seg
    if q <= 0.0:
        raise Infeasible("1 - (2 lambda - 1) mu = %.3e is not positive" % q)
    return (eps_seg + delta_j) / math.sqrt(q)


def known_support_bound(eps, lam_J, mu_stack, seg_norm=1.0):
    """eps * seg_norm / sqrt(1 - (2 lambda_J - 1) mu_stack).

    mu_stack is the coherence of the stacked known-support operator (see
    pursuit.cosparsity_stack); seg_norm the spectral norm of the segment
    submatrix (D_{j+1}...D_J)_{S_j, S_J} mapping the deepest on-support
    code to layer j (1 at j = J, where the segment is empty).
    """
    if eps < 0 or seg_norm < 0:
        raise ValueError("eps and seg_norm must be nonnegative")
    q = 1.0 - (2.0 * int(lam_J) - 1.0) * mu_stack
    if q <= 0.0:
        raise Infeasible("1 - (2 lambda - 1) mu = %.3e is not positive" % q)
    return eps * seg_norm / math.sqrt(q)


def relutype_sparsity_bound(mu_tilde, L, m, d):
    """Sparsity cap (1/mu_tilde - 2 L^m d) / (2 - 2 L^m).

    Requires L^m < 1 (the negative-side contraction); returns +inf when
    mu_tilde = 0.
    """
    m = int(m)
    if m < 1:
        raise ValueError("m must be a positive integer")
    if L < 0:
        raise ValueError("L must be nonnegative")
    Lm = L ** m
    if Lm >= 1.0:
        raise UndefinedForL("L^m = %.3f >= 1 leaves the bound undefined"
                            % Lm)
    if mu_tilde < 0:
        raise ValueError("mu_tilde must be nonnegative")
    if mu_tilde == 0.0:
        return math.inf
    return (1.0 / mu_tilde - 2.0 * Lm * d) / (2.0 - 2.0 * Lm)


@dataclass(frozen=True)
class CoincidenceCertificate:
    full_rank: bool
    wide: bool
    bound: float
    sparsity_ok: bool

    @property
    def passed(self):
        return self.full_rank and self.wide and self.sparsity_ok


def coincidence_certificate(D, lam):
    """Hypotheses of the l0/l1 coincidence: full row rank, more columns
    than rows, and lambda below the uniqueness threshold."""
    if not isinstance(D, Dictionary):
        D = Dictionary(np.asarray(D, dtype=float))
    sv = np.linalg.svd(D.data, compute_uv=False)
    full_rank = bool(sv.size and sv[-1] > _RANK_REL_TOL * sv[0])
    wide = D.rows < D.cols
    bound = uniqueness_bound(mutual_coherence(D.data))
    return CoincidenceCertificate(full_rank=full_rank, wide=wide,
                                  bound=bound,
                                  sparsity_ok=bool(int(lam) < bound))
