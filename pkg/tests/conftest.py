import numpy as np
import pytest

from meshmend.geometry import Tolerance


@pytest.fixture
def tol():
    return Tolerance()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
