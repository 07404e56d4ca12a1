"""Closed-form recovery certificates and their hand-checked values."""

import math

import numpy as np
import pytest

from dsclab import (Dictionary, Infeasible, MissingCodes, ShapeMismatch,
                    UndefinedForL, check_uniqueness, coherence_profile,
                    coincidence_certificate, corollary_bounds,
                    generate_instance, known_support_bound,
                    low_coherence_dictionary, mutual_coherence,
                    noncumulative_bound, relaxed_bound,
                    relutype_sparsity_bound, stability_ledger,
                    uniqueness_bound)
from dsclab.rng import make_generator


def test_uniqueness_bound_values():
    assert uniqueness_bound(0.0) == math.inf
    assert uniqueness_bound(1.0 / 3.0) == pytest.approx(2.0, rel=1e-15)
    assert uniqueness_bound(1.0) == 1.0
    assert uniqueness_bound(0.5) == 1.5
    with pytest.raises(ValueError):
        uniqueness_bound(-0.1)
    with pytest.raises(ValueError):
        uniqueness_bound(1.1)


def test_check_uniqueness_on_planted_instance():
    inst = generate_instance([(12, 18), (18, 4)], [2, 1], 1.0, seed=70)
    mus = [mutual_coherence(inst.dicts[j].data) for j in (1, 2)]
    rep = check_uniqueness(inst, mus)
    assert rep.counts == (inst.truth[0].l0, inst.truth[1].l0)
    assert rep.bounds[0] == pytest.approx(uniqueness_bound(mus[0]))
    assert rep.overall == all(rep.verdicts)


def test_check_uniqueness_caps_infinite_bound():
    inst = generate_instance([(6, 6)], [1], 1.0, seed=71,
                             ensemble="orthonormal")
    rep = check_uniqueness(inst, [0.0])
    assert rep.bounds == (6.0,)
    assert rep.verdicts == (True,)


def test_check_uniqueness_needs_codes():
    inst = generate_instance([(6, 9)], [1], 1.0, seed=72)
    object.__setattr__(inst, "truth", None)
    with pytest.raises(MissingCodes):
        check_uniqueness(inst, [0.5])
    with pytest.raises(ShapeMismatch):
        check_uniqueness(generate_instance([(6, 9)], [1], 1.0, seed=73),
                         [0.5, 0.5])


def test_relaxed_bound_takes_the_best_threshold():
    inst = generate_instance([(12, 18), (18, 4)], [2, 1], 1.0, seed=74)
    prof = coherence_profile([inst.dicts[1], inst.dicts[2]])
    got = relaxed_bound(prof, 2)
    candidates = [prof.single[2], prof.prefix[2], prof.segment[(1, 2)]]
    want = max(uniqueness_bound(mu) for mu in candidates)
    assert got == want
    assert got >= uniqueness_bound(prof.single[2])


def test_stability_ledger_hand_values():
    led = stability_ledger(0.1, [0.05, 0.02], [2, 1], [0.2, 0.1])
    q1, q2 = 1 - 3 * 0.2, 1 - 1 * 0.1
    d1 = (0.05 + 0.1) / math.sqrt(q1)
    d2 = (0.02 + d1) / math.sqrt(q2)
    assert led.delta[0] == 0.1
    assert led.delta[1] == pytest.approx(d1, rel=1e-15)
    assert led.delta[2] == pytest.approx(d2, rel=1e-15)
    assert led.feasible == (True, True)


def test_stability_ledger_infeasible_poisons_deeper_layers():
    led = stability_ledger(0.1, [0.0, 0.0, 0.0], [3, 1, 1],
                           [0.2, 0.1, 0.1])
    assert led.feasible == (False, True, True)
    assert math.isnan(led.delta[1])
    assert math.isnan(led.delta[2])
    assert math.isnan(led.delta[3])


def test_stability_ledger_validation():
    with pytest.raises(ShapeMismatch):
        stability_ledger(0.1, [0.1], [1, 1], [0.1, 0.1])
    with pytest.raises(ValueError):
        stability_ledger(-0.1, [0.1], [1], [0.1])
    with pytest.raises(ValueError):
        stability_ledger(0.1, [-0.1], [1], [0.1])


def test_corollary_bounds_hand_values():
    out = corollary_bounds(0.3, [0.0, 0.0], [2, 2], [0.1, 0.05])
    q1, q2 = 1 - 3 * 0.1, 1 - 3 * 0.05
    assert out["noiseless"][0] == pytest.approx(0.09 / q1, rel=1e-15)
    assert out["noiseless"][1] == pytest.approx(0.09 / (q1 * q2),
                                                rel=1e-15)
    assert out["papyan"][0] == pytest.approx(4 * 0.09 / q1, rel=1e-15)
    assert out["ratio_papyan"] == (0.25, 0.25)
    assert out["sulam"][0] == out["papyan"][0]
    assert out["sulam"][1] == pytest.approx(16 * 0.09 / (q1 * q2),
                                            rel=1e-15)


def test_corollary_var0_uses_layer_tolerances():
    out = corollary_bounds(0.0, [0.2, 0.1], [1, 1], [0.3, 0.2])
    q1, q2 = 1 - 0.3, 1 - 0.2
    acc = 0.2 + 0.1 * math.sqrt(q1)
    assert out["var0"][1] == pytest.approx(acc ** 2 / (q1 * q2),
                                           rel=1e-14)
    assert out["noiseless"] == (0.0, 0.0)


def test_corollary_bounds_propagate_nan():
    out = corollary_bounds(0.1, [0.0, 0.0], [5, 1], [0.3, 0.1])
    assert all(math.isnan(out[k][0]) for k in out)
    assert all(math.isnan(out[k][1]) for k in out)


def test_noncumulative_bound():
    got = noncumulative_bound(0.2, 0.1, 2, 0.15)
    assert got == pytest.approx(0.3 / math.sqrt(1 - 3 * 0.15), rel=1e-15)
    with pytest.raises(Infeasible):
        noncumulative_bound(0.2, 0.1, 3, 0.25)
    with pytest.raises(ValueError):
        noncumulative_bound(-0.1, 0.1, 1, 0.1)


def test_known_support_bound():
    got = known_support_bound(0.05, 2, 0.2, seg_norm=1.5)
    assert got == pytest.approx(0.05 * 1.5 / math.sqrt(1 - 0.6),
                                rel=1e-15)
    assert known_support_bound(0.0, 1, 0.0) == 0.0
    with pytest.raises(Infeasible):
        known_support_bound(0.1, 2, 0.5)
    with pytest.raises(ValueError):
        known_support_bound(-1.0, 1, 0.1)


def test_relutype_sparsity_bound_example():
    assert relutype_sparsity_bound(0.02, 0.5, 2, 16) == pytest.approx(
        28.0, rel=1e-12)
    assert relutype_sparsity_bound(0.0, 0.5, 1, 16) == math.inf
    with pytest.raises(UndefinedForL):
        relutype_sparsity_bound(0.02, 1.0, 1, 16)
    with pytest.raises(ValueError):
        relutype_sparsity_bound(-0.1, 0.5, 1, 16)
    with pytest.raises(ValueError):
        relutype_sparsity_bound(0.1, 0.5, 0, 16)


def test_relutype_reduces_toward_relu_limit():
    # As L -> 0 the cap approaches the classic (1/mu)/2 scale.
    caps = [relutype_sparsity_bound(0.05, L, 1, 16)
            for L in (0.5, 0.1, 0.01)]
    assert caps == sorted(caps)
    assert caps[-1] == pytest.approx((1 / 0.05 - 2 * 0.01 * 16)
                                     / (2 - 0.02), rel=1e-12)


def test_coincidence_certificate_pass_and_fail():
    D = low_coherence_dictionary(8, 12, make_generator(75))
    cert = coincidence_certificate(D, 2)
    assert cert.full_rank and cert.wide
    assert cert.bound == uniqueness_bound(mutual_coherence(D.data))
    assert cert.passed == cert.sparsity_ok

    v = np.ones(3) / math.sqrt(3)
    flat = Dictionary(np.column_stack([v, v, v, v]))
    low_rank = coincidence_certificate(flat, 1)
    assert not low_rank.full_rank
    assert not low_rank.passed

    square = coincidence_certificate(np.eye(4), 1)
    assert not square.wide
    assert not square.passed
