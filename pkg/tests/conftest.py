import numpy as np
import pytest

from nessgraph.lattice import chain, effective_generator, generator_set
from nessgraph.linalg import local_operator


def random_generator_set(rng, dim, jumps):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = a + a.conj().T
    ls = [rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
          for _ in range(jumps)]
    return effective_generator(h, ls)


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def chain2():
    return generator_set(chain(2))


@pytest.fixture(scope="session")
def dephasing():
    return effective_generator(np.zeros((2, 2)), [local_operator("sigma_z")])
