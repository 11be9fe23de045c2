#!env python3
# -*- coding: utf-8 -*-
import numpy as np
import pytest


@pytest.fixture
def random_hermitian():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    return a + a.conj().T


def test_eigh_matches_lapack(random_hermitian):
    from qdcryptpy._numlin import hermitian_eigh
    w, v = hermitian_eigh(random_hermitian)
    assert np.allclose(w, np.linalg.eigvalsh(random_hermitian), atol=1e-10)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, random_hermitian, atol=1e-10)
    assert np.allclose(v.conj().T @ v, np.eye(6), atol=1e-10)


def test_eigh_already_diagonal():
    from qdcryptpy._numlin import hermitian_eigh
    w, _ = hermitian_eigh(np.diag([3.0, -1.0, 2.0]))
    assert list(w) == [-1.0, 2.0, 3.0]


def test_as_hermitian_rejects():
    from qdcryptpy._numlin import as_hermitian
    with pytest.raises(ValueError):
        as_hermitian([[0, 1], [0, 0]])
    with pytest.raises(ValueError):
        as_hermitian(np.zeros((2, 3)))


def test_binary_entropy():
    from qdcryptpy._numlin import binary_entropy
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0)
    assert binary_entropy(0.02) == pytest.approx(0.141441, abs=1e-6)
    with pytest.raises(ValueError):
        binary_entropy(1.5)


def test_trace_norm():
    from qdcryptpy._numlin import trace_norm
    assert trace_norm(np.diag([1.0, -2.0])) == pytest.approx(3.0)


def test_partial_trace_product():
    from qdcryptpy._numlin import partial_trace
    a = np.array([[0.7, 0.1j], [-0.1j, 0.3]])
    b = np.diag([0.2, 0.5, 0.3])
    x = np.kron(a, b)
    assert np.allclose(partial_trace(x, (2, 3), [0]), a)
    assert np.allclose(partial_trace(x, (2, 3), [1]), b)
    with pytest.raises(ValueError):
        partial_trace(x, (2, 2), [0])


def test_hermitian_basis_spans():
    from qdcryptpy._numlin import hermitian_basis
    basis = hermitian_basis(3)
    assert len(basis) == 9
    flat = np.array([np.concatenate([h.real.ravel(), h.imag.ravel()]) for h in basis])
    assert np.linalg.matrix_rank(flat) == 9


@pytest.mark.parametrize("dim", range(1, 21))
def test_eigh_random_battery(dim):
    from qdcryptpy._numlin import hermitian_eigh
    rng = np.random.default_rng(dim)
    for _ in range(5):
        a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        a = a + a.conj().T
        w, v = hermitian_eigh(a)
        assert np.max(np.abs(v.conj().T @ v - np.eye(dim))) < 1e-10
        assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - a)) < 1e-10 * dim
        assert np.all(np.diff(w) >= 0)


def test_eigh_rank_deficient_and_degenerate():
    from qdcryptpy._numlin import hermitian_eigh
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.normal(size=(10, 10)) + 1j * rng.normal(size=(10, 10)))
    a = q @ np.diag([0.0] * 6 + [0.25] * 4) @ q.conj().T
    w, v = hermitian_eigh((a + a.conj().T) / 2)
    assert np.allclose(w, [0.0] * 6 + [0.25] * 4, atol=1e-12)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, a, atol=1e-12)


def test_eigh_wide_dynamic_range():
    from qdcryptpy._numlin import hermitian_eigh
    a = np.array([[1e200, 1e-200], [1e-200, -1e200]])
    w, _ = hermitian_eigh(a)
    assert w == pytest.approx([-1e200, 1e200])


def test_trace_norm_is_a_norm():
    from qdcryptpy._numlin import trace_norm
    rng = np.random.default_rng(11)
    for _ in range(10):
        a, b = (m + m.conj().T for m in (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(2)))
        assert trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-9
        assert trace_norm(-2.5 * a) == pytest.approx(2.5 * trace_norm(a), abs=1e-9)


def test_la_token_states_decompose():
    from qdcryptpy._numlin import min_eigenvalue
    from qdcryptpy._sources import QdsModel, preset
    from qdcryptpy._tokens import token_states
    for rho in token_states(QdsModel(preset("la"), 0.289)):
        assert min_eigenvalue(rho.matrix) > -1e-12
