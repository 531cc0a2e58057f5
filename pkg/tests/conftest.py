import numpy as np
import pytest

from anosov_domains import spectral


@pytest.fixture(autouse=True, scope="session")
def _normalization_checks():
    # every eigen_magnitudes call also checks prod(lambda) == |det|
    old = spectral.CHECK_NORMALIZATION
    spectral.CHECK_NORMALIZATION = True
    yield
    spectral.CHECK_NORMALIZATION = old


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
