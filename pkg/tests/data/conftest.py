import pytest

from splitfed.data import generate


@pytest.fixture()
def dataset():
    yield generate(12, size=32, seed=3)
