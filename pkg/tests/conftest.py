import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def sym_gauss(rng, n):
    w = rng.normal(size=(n, n))
    m = np.triu(w, 1)
    m = m + m.T
    np.fill_diagonal(m, rng.normal(size=n))
    return m


@pytest.fixture
def sym_matrix(rng):
    return lambda n: sym_gauss(rng, n)
