import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from moikit.rng import SplitMix64

settings.register_profile("moikit", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("moikit")


@pytest.fixture
def rng():
    return SplitMix64(12345)


def herm(rng, n):
    g = rng.complex_normal((n, n))
    h = g + g.conj().T
    return h / np.linalg.norm(h, 2)
