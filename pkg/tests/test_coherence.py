"""Coherence measures and the two-stage analysis-weights program."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsclab import (TooFewColumns, coherence_profile,
                    generalized_mutual_coherence, layer_product,
                    mutual_coherence, normalize_columns,
                    orthonormal_dictionary, random_dictionary)
from dsclab.rng import make_generator


def test_mutual_coherence_identity_zero():
    assert mutual_coherence(np.eye(3)) == 0.0


def test_mutual_coherence_known_pair():
    # angle 60 degrees -> inner product 1/2
    D = np.array([[1.0, 0.5], [0.0, np.sqrt(3) / 2]])
    assert abs(mutual_coherence(D) - 0.5) <= 1e-15


def test_mutual_coherence_normalizes_internally():
    D = np.array([[2.0, 1.0], [0.0, 1.0]])
    want = abs(np.dot([1, 0], [1, 1]) / np.sqrt(2))
    assert abs(mutual_coherence(D) - want) <= 1e-15


def test_mutual_coherence_needs_two_columns():
    with pytest.raises(TooFewColumns):
        mutual_coherence(np.ones((3, 1)))


def _grid_mu_tilde(D, steps=20001, span=25.0):
    """Brute-force the per-column min-max over a 1-d slice.

    For a 2xN dictionary every w with w'd_i = 1 is w0 + t*n with n
    orthogonal to d_i, so a fine scan of t is a true oracle.
    """
    best_overall = 0.0
    n_cols = D.shape[1]
    for i in range(n_cols):
        d = D[:, i]
        w0 = d / (d @ d)
        n = np.array([-d[1], d[0]])
        n = n / np.linalg.norm(n)
        ts = np.linspace(-span, span, steps)
        W = w0[None, :] + ts[:, None] * n[None, :]
        others = np.delete(np.arange(n_cols), i)
        vals = np.abs(W @ D[:, others]).max(axis=1)
        best_overall = max(best_overall, float(vals.min()))
    return best_overall


def test_lp_matches_grid_search_2x3():
    rng = make_generator(13)
    for _ in range(5):
        D = random_dictionary(2, 3, rng).data
        cert = generalized_mutual_coherence(D)
        want = _grid_mu_tilde(D)
        assert abs(cert.mu_tilde - want) <= 2e-3


def test_generalized_bounded_by_mutual():
    rng = make_generator(31)
    for _ in range(10):
        rows = int(rng.integers(3, 7))
        cols = int(rng.integers(rows, rows + 4))
        D = random_dictionary(rows, cols, rng)
        cert = generalized_mutual_coherence(D)
        assert cert.mu_tilde <= cert.mu + 1e-9
        assert cert.mu_tilde >= -1e-12


def test_orthonormal_gives_zero_and_identity_weights():
    Q = orthonormal_dictionary(5, make_generator(3))
    cert = generalized_mutual_coherence(Q)
    assert cert.mu_tilde <= 1e-12
    assert np.abs(cert.w - Q.data).max() <= 1e-12


def test_second_stage_weights_stay_feasible():
    rng = make_generator(17)
    for _ in range(5):
        D = random_dictionary(4, 7, rng)
        cert = generalized_mutual_coherence(D)
        G = cert.w.T @ D.data
        assert np.abs(np.diag(G) - 1.0).max() <= 1e-9
        off = np.abs(G - np.diag(np.diag(G)))
        assert off.max() <= cert.mu_tilde + 1e-7
        assert abs(float(np.abs(cert.w).max()) - cert.c_w) <= 1e-15


def test_fast_mode_uses_dictionary_itself():
    D = random_dictionary(4, 6, make_generator(8))
    cert = generalized_mutual_coherence(D, mode="fast")
    assert np.array_equal(cert.w, D.data)
    assert cert.mu_tilde == cert.mu


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 6))
def test_mu_tilde_never_exceeds_mu(seed):
    D = random_dictionary(3, 5, make_generator(seed))
    cert = generalized_mutual_coherence(D)
    assert cert.mu_tilde <= cert.mu + 1e-9


def test_profile_matches_direct_products():
    rng = make_generator(41)
    chain = [random_dictionary(6, 8, rng).data,
             random_dictionary(8, 5, rng).data]
    prof = coherence_profile(chain)
    assert abs(prof.single[1] - mutual_coherence(chain[0])) <= 1e-15
    assert abs(prof.single[2] - mutual_coherence(chain[1])) <= 1e-15
    prod = normalize_columns(layer_product(chain, 1, 2).data).data
    assert abs(prof.prefix[2] - mutual_coherence(prod)) <= 1e-15
    assert prof.segment[(1, 2)] == prof.prefix[2]
    assert prof.prefix[1] == prof.single[1]
