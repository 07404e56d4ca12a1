import numpy as np
import pytest

from dsclab import generalized_mutual_coherence, low_coherence_dictionary
from dsclab.rng import make_generator


@pytest.fixture(scope="session")
def flat_dict():
    """One shared 16x32 low-coherence dictionary."""
    return low_coherence_dictionary(16, 32, make_generator(424242))


@pytest.fixture(scope="session")
def flat_cert(flat_dict):
    """Its exact coherence certificate (solved once per session)."""
    cert = generalized_mutual_coherence(flat_dict)
    assert cert.mu_tilde < 0.25
    return cert


@pytest.fixture
def rng():
    return make_generator(99)


def l2(v):
    return float(np.linalg.norm(v))
