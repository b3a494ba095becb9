import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def exp_sample(rng):
    from censkl import type2_censor

    return type2_censor(rng.exponential(size=30), 20)
