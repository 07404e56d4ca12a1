"""Dictionary ensembles and instance generation."""

import numpy as np
import pytest

from dsclab import (InfeasibleBudget, ShapeMismatch,
                    disjoint_support_dictionary, generate_instance,
                    low_coherence_dictionary, mutual_coherence,
                    orthonormal_dictionary, random_dictionary, simplex_frame,
                    welch_bound)
from dsclab.rng import make_generator


def test_welch_bound_value():
    want = np.sqrt((32 - 16) / (16.0 * 31))
    assert abs(welch_bound(16, 32) - want) <= 1e-15
    assert welch_bound(4, 4) == 0.0


def test_random_dictionary_unit_columns():
    D = random_dictionary(6, 11, make_generator(2))
    assert np.abs(np.linalg.norm(D.data, axis=0) - 1.0).max() <= 1e-12


def test_orthonormal_dictionary():
    Q = orthonormal_dictionary(7, make_generator(5))
    assert np.abs(Q.data.T @ Q.data - np.eye(7)).max() <= 1e-12


def test_low_coherence_beats_random():
    rng = make_generator(9)
    base = mutual_coherence(random_dictionary(16, 32, rng).data)
    opt = mutual_coherence(
        low_coherence_dictionary(16, 32, make_generator(9)).data)
    assert opt < base
    assert opt >= welch_bound(16, 32) - 1e-9


def test_simplex_frame_equiangular():
    F = simplex_frame(15)
    assert F.shape == (15, 16)
    G = F.data.T @ F.data
    off = np.abs(G - np.diag(np.diag(G)))
    mask = ~np.eye(16, dtype=bool)
    assert np.abs(off[mask] - 1.0 / 15).max() <= 1e-12
    assert np.abs(np.diag(G) - 1.0).max() <= 1e-12


def test_disjoint_support_dictionary():
    D = disjoint_support_dictionary(8, 3, 2, make_generator(4))
    assert D.shape == (8, 3)
    seen = set()
    for j in range(3):
        supp = set(np.nonzero(D.data[:, j])[0])
        assert len(supp) == 2
        assert not (supp & seen)
        seen |= supp
        vals = np.abs(D.data[:, j][list(supp)])
        assert np.abs(vals - 1.0 / np.sqrt(2)).max() <= 1e-15
    with pytest.raises(InfeasibleBudget):
        disjoint_support_dictionary(5, 3, 2, make_generator(4))


def test_single_layer_instance_spec_example():
    inst = generate_instance([(8, 16)], [2], 1.0, seed=3)
    x = inst.truth[0]
    assert x.l0 == 2
    resid = np.linalg.norm(inst.y - inst.dicts[1].data @ x.values)
    assert resid < 1e-12
    mags = np.abs(x.values[list(x.support)])
    assert np.all(mags >= 0.5) and np.all(mags <= 1.0)


def test_noiseless_means_exact_synthesis():
    inst = generate_instance([(8, 16)], [3], 2.0, seed=12,
                             noise0_norm=0.0)
    assert np.array_equal(inst.noise0, np.zeros(8))
    assert np.array_equal(inst.y, inst.dicts[1].data @ inst.truth[0].values)


def test_noise_norm_is_honored():
    inst = generate_instance([(8, 16)], [2], 1.0, seed=6,
                             noise0_norm=0.25)
    assert abs(np.linalg.norm(inst.noise0) - 0.25) <= 1e-12
    assert inst.eps[0] == 0.25


def test_tolerance_chain_records_residuals():
    inst = generate_instance([(6, 9), (9, 5)], [3, 2], 1.0,
                             mode="tolerance-chain", seed=8)
    want = np.linalg.norm(inst.truth[0].values
                          - inst.dicts[2].data @ inst.truth[1].values)
    assert abs(inst.eps[1] - want) <= 1e-15


def test_exact_chain_two_layers_budgets_met():
    inst = generate_instance([(12, 18), (18, 4)], [4, 2], 1.0, seed=10)
    assert inst.truth[1].l0 <= 2
    assert inst.truth[0].l0 <= 4
    x1 = inst.truth[0].values
    assert np.linalg.norm(x1 - inst.dicts[2].data
                          @ inst.truth[1].values) < 1e-9
    assert np.linalg.norm(inst.y - inst.dicts[1].data @ x1) < 1e-9


def test_same_seed_same_instance():
    a = generate_instance([(8, 16)], [2], 1.0, seed=77, noise0_norm=0.1)
    b = generate_instance([(8, 16)], [2], 1.0, seed=77, noise0_norm=0.1)
    assert np.array_equal(a.y, b.y)
    assert np.array_equal(a.dicts[1].data, b.dicts[1].data)
    assert np.array_equal(a.truth[0].values, b.truth[0].values)
    c = generate_instance([(8, 16)], [2], 1.0, seed=78, noise0_norm=0.1)
    assert not np.array_equal(a.y, c.y)


def test_generation_errors():
    with pytest.raises(InfeasibleBudget):
        generate_instance([(8, 16)], [0], 1.0, seed=1)
    with pytest.raises(InfeasibleBudget):
        generate_instance([(8, 4)], [5], 1.0, seed=1)
    with pytest.raises(ShapeMismatch):
        generate_instance([(8, 16), (15, 4)], [2, 1], 1.0, seed=1)
    with pytest.raises(ValueError):
        generate_instance([(8, 16)], [2], 1.0, mode="bogus", seed=1)
