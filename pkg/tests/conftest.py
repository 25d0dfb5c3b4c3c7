import numpy as np
import pytest

from tdas import ImageDataset, NoiseSource


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))


@pytest.fixture
def small_dataset(rng):
    return ImageDataset(rng.standard_normal((12, 1, 8, 8)))


@pytest.fixture
def src():
    return NoiseSource(77)
