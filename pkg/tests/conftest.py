import numpy as np
import pytest

from discord_witness.preprocessing.states import assemble_cq, random_cq_spec, random_state

SMALL_DIMS = [(2, 2), (2, 3), (3, 2)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_states(rng):
    """Five Ginibre-random full-rank states per small dimension pair."""
    return [random_state(dA, dB, seed=rng) for dA, dB in SMALL_DIMS for _ in range(5)]


@pytest.fixture
def cq_states(rng):
    return [assemble_cq(random_cq_spec(dA, dB, seed=rng)) for dA, dB in SMALL_DIMS + [(3, 3)] for _ in range(3)]
