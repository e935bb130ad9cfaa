import numpy as np
import pytest

from ctrm.model import CoupledProductFrechet, ExponentialIndependent, IndependentStableFrechet


@pytest.fixture
def coupled():
    return CoupledProductFrechet(beta=0.5, gamma=1.0)


@pytest.fixture
def independent():
    return IndependentStableFrechet(beta=0.5, alpha=1.0)


@pytest.fixture
def exponential():
    return ExponentialIndependent(rate=1.0)


@pytest.fixture
def log_grid():
    return np.logspace(-1, 1, 5)
