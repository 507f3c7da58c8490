import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_events(rng, n=100, span=2 * np.pi):
    return rng.uniform(0, span, (n, 4))
