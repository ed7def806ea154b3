import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nessgraph.errors import ShapeError, ValidationError
from nessgraph.linalg import (
    LocalOperatorKind,
    dagger,
    embed_site,
    identity,
    is_exact,
    kron,
    kron_power,
    local_operator,
    nullspace_basis,
    numerical_rank,
)

SM = local_operator("sigma_minus")
SP = local_operator("sigma_plus")


def test_local_operators():
    assert np.array_equal(local_operator("identity"), np.eye(2))
    assert np.array_equal(SM, [[0, 0], [1, 0]])
    assert np.array_equal(local_operator("sigma_x"), SP + SM)
    assert np.array_equal(local_operator("sigma_z"), np.diag([1, -1]))
    sy = local_operator(LocalOperatorKind.SIGMA_Y)
    assert np.allclose(sy @ sy, np.eye(2))
    assert is_exact(SM) and not is_exact(sy)


def test_kron_examples():
    assert np.array_equal(kron(identity(2), identity(2)), np.eye(4))
    m = kron(SM, identity(2))
    expected = np.zeros((4, 4), dtype=int)
    expected[2, 0] = expected[3, 1] = 1
    assert np.array_equal(m, expected)
    mm = kron(SM, SM)
    assert not np.any(mm @ mm)


def test_kron_rejects_non_square():
    with pytest.raises(ShapeError):
        kron(np.ones((2, 3)), np.eye(2))


def test_kron_sparse_matches_dense():
    a = kron(sp.csr_matrix(SM), sp.identity(2))
    assert sp.issparse(a)
    assert np.array_equal(a.toarray(), kron(SM, identity(2)))
    assert np.array_equal(kron_power(SP, 3, sparse=True).toarray(),
                          kron(kron(SP, SP), SP))


def test_embed_site():
    assert np.array_equal(embed_site(SM, 1, 1), SM)
    assert np.array_equal(embed_site(SM, 1, 2), kron(SM, identity(2)))
    a2 = embed_site(SM, 1, 2) + embed_site(SM, 2, 2)
    assert {tuple(p + 1) for p in np.argwhere(a2)} == {
        (2, 1), (3, 1), (4, 2), (4, 3)}
    with pytest.raises(ValidationError):
        embed_site(SM, 3, 2)
    with pytest.raises(ValidationError):
        embed_site(SM, 0, 2)


def test_rank_examples():
    assert numerical_rank(np.eye(4)) == 4
    assert nullspace_basis(np.eye(4)).shape == (4, 0)
    assert numerical_rank(np.zeros((3, 3))) == 0
    assert nullspace_basis(np.zeros((3, 3))).shape == (3, 3)
    assert numerical_rank(SM) == 1
    ns = nullspace_basis(SM)
    assert ns.shape == (2, 1)
    # sigma_minus kills the ground state (second basis vector)
    assert np.allclose(np.abs(ns[:, 0]), [0, 1])


exact = st.integers(1, 3).flatmap(
    lambda n: arrays(np.int64, (n, n), elements=st.integers(-3, 3)))


@settings(max_examples=60, deadline=None)
@given(exact, exact, exact)
def test_kron_associative(a, b, c):
    assert np.array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(
    *[arrays(np.int64, (n, n), elements=st.integers(-4, 4))] * 2)),
       st.integers(1, 8).flatmap(lambda n: st.tuples(
    *[arrays(np.int64, (n, n), elements=st.integers(-4, 4))] * 2)))
def test_mixed_product(ac, bd):
    (a, c), (b, d) = ac, bd
    if a.shape[0] * b.shape[0] > 16:
        b, d = b[:2, :2], d[:2, :2]
    assert np.array_equal(kron(a, b) @ kron(c, d), kron(a @ c, b @ d))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_dagger_distributes(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
               for _ in range(3))
    assert np.allclose(dagger(kron(a, b)), kron(dagger(a), dagger(b)))
    assert np.allclose(dagger(a @ c), dagger(c) @ dagger(a))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(0, 8), st.integers(0, 2 ** 32 - 1))
def test_rank_plus_nullity(n, r, seed):
    rng = np.random.default_rng(seed)
    r = min(r, n)
    m = rng.normal(size=(n, r)) @ rng.normal(size=(r, n))
    assert numerical_rank(m) == r
    assert numerical_rank(m) + nullspace_basis(m).shape[1] == n
