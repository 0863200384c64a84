import pytest

from kummer_forge.rng import generator


@pytest.fixture
def rng():
    return generator(12345, 7)
