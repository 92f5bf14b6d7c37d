import numpy as np
import pytest

from splitfed.model import UNetSpec


@pytest.fixture()
def rng():
    yield np.random.default_rng(42)


@pytest.fixture()
def small_spec():
    yield UNetSpec(levels=2, base_channels=4, num_classes=5)


@pytest.fixture()
def batch():
    # two 16x16 images with random masks
    r = np.random.default_rng(7)
    x = r.random((2, 1, 16, 16)).astype(np.float32)
    y = r.integers(0, 5, size=(2, 16, 16))
    yield x, y
