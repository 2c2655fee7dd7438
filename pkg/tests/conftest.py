import numpy as np
import pytest

from clarklab import gallery


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_corpus():
    """Three rational inner symbols with Theta(0) = 0, one per dimension."""
    return [
        gallery.random_inner(1, 3, seed=1),
        gallery.random_inner(2, 3, seed=2),
        gallery.random_inner(3, 4, seed=3),
    ]
