#!env python3
# -*- coding: utf-8 -*-
import numpy as np
import pytest

SINGLE = [0.0, 1.0, 0.0, 0.0]


@pytest.fixture
def two_modes():
    from qdcryptpy._fock import FockBasis
    return FockBasis(2, 3)


def test_basis_layout(two_modes):
    assert two_modes.dim == 10
    assert two_modes.labels[0] == (0, 0)
    assert two_modes.index((1, 0)) != two_modes.index((0, 1))


def test_hong_ou_mandel(two_modes):
    from qdcryptpy._fock import PureState, apply_beamsplitter
    psi = apply_beamsplitter(PureState.from_occupations(two_modes, {(1, 1): 1.0}), 0, 1, 0.5)
    assert abs(psi.amplitude((1, 1))) < 1e-12
    assert abs(psi.amplitude((2, 0))) ** 2 == pytest.approx(0.5)
    assert np.sum(np.abs(psi.amplitudes) ** 2) == pytest.approx(1.0)


def test_beamsplitter_rejects_same_mode(two_modes):
    from qdcryptpy._fock import PureState, apply_beamsplitter
    psi = PureState.from_occupations(two_modes, {(1, 0): 1.0})
    with pytest.raises(ValueError):
        apply_beamsplitter(psi, 0, 0, 0.5)


def test_balanced_interferometer_routes_photon(two_modes):
    from qdcryptpy._fock import encode_state, mzi_coefficients
    rho = encode_state(SINGLE, 1.0, 0.0, 0.5)
    assert np.real(rho.matrix[two_modes.index((1, 0)), two_modes.index((1, 0))]) == pytest.approx(1.0)
    rho = encode_state(SINGLE, 1.0, np.pi, 0.5)
    assert np.real(rho.matrix[two_modes.index((0, 1)), two_modes.index((0, 1))]) == pytest.approx(1.0)
    c0, c1, loss = mzi_coefficients(0.0, 0.5)
    assert c0 == pytest.approx(1.0) and abs(c1) < 1e-12 and loss == 0.0


def test_splitter_state_amplitudes(two_modes):
    from qdcryptpy._fock import encode_splitter_state
    rho = encode_splitter_state(SINGLE, 1.0, 0.9, np.pi)
    i, j = two_modes.index((1, 0)), two_modes.index((0, 1))
    assert np.real(rho.matrix[i, i]) == pytest.approx(0.9)
    assert np.real(rho.matrix[j, j]) == pytest.approx(0.1)
    assert np.real(rho.matrix[i, j]) == pytest.approx(-np.sqrt(0.09))
    assert rho.purity() == pytest.approx(1.0)


def test_collection_loss(two_modes):
    from qdcryptpy._fock import encode_splitter_state
    rho = encode_splitter_state(SINGLE, 0.3, 0.5, 0.0)
    assert np.real(rho.matrix[two_modes.index((0, 0)), two_modes.index((0, 0))]) == pytest.approx(0.7)
    assert np.real(np.trace(rho.matrix)) == pytest.approx(1.0)


def test_incoherent_source_is_block_diagonal(two_modes):
    from qdcryptpy._fock import encode_splitter_state
    pops = [0.5, 0.5, 0.0, 0.0]
    v, one = two_modes.index((0, 0)), two_modes.index((1, 0))
    coherent = encode_splitter_state(pops, 1.0, 0.9, 0.0, coherent=True)
    incoherent = encode_splitter_state(pops, 1.0, 0.9, 0.0, coherent=False)
    assert abs(coherent.matrix[v, one]) == pytest.approx(0.5 * np.sqrt(0.9))
    assert abs(incoherent.matrix[v, one]) == 0.0
    assert np.allclose(np.diag(coherent.matrix), np.diag(incoherent.matrix))


def test_populations_validated():
    from qdcryptpy._fock import encode_state
    with pytest.raises(ValueError):
        encode_state([0.5, 0.6, 0.0, 0.0], 1.0, 0.0)
    with pytest.raises(ValueError):
        encode_state(SINGLE, 1.2, 0.0)


def test_density_matrix_text_form():
    from qdcryptpy._fock import dumps_density_matrix, encode_state, loads_density_matrix
    rho = encode_state([0.1, 0.8, 0.1, 0.0], 0.6, 0.7, 0.5)
    text = dumps_density_matrix(rho)
    assert text.startswith("# fock: modes=2 max_total=3")
    back = loads_density_matrix(text)
    assert back.basis == rho.basis
    assert np.allclose(back.matrix, rho.matrix, rtol=0, atol=1e-15)


def test_phase_acts_on_occupation(two_modes):
    from qdcryptpy._fock import PureState, apply_phase
    h = 1 / np.sqrt(2)
    psi = PureState.from_occupations(two_modes, {(1, 0): h, (0, 2): h})
    out = apply_phase(psi, 1, np.pi / 2)
    assert out.amplitude((1, 0)) == pytest.approx(h)
    assert out.amplitude((0, 2)) == pytest.approx(-h)


def test_bb84_phases_overlap():
    from qdcryptpy._fock import encode_state
    phases = [k * np.pi / 2 for k in range(4)]
    states = [encode_state(SINGLE, 1.0, phi, 0.5).matrix for phi in phases]
    for j, a in enumerate(states):
        for k, b in enumerate(states):
            expected = np.cos((phases[j] - phases[k]) / 2) ** 2
            assert np.real(np.trace(a @ b)) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_number_state_stays_pure(n):
    from qdcryptpy._fock import encode_state
    from qdcryptpy._numlin import hermitian_eigh
    pops = [0.0] * 4
    pops[n] = 1.0
    rng = np.random.default_rng(n)
    for coherent in (True, False):
        rho = encode_state(pops, 1.0, rng.uniform(0, 2 * np.pi), rng.uniform(0, 1), coherent)
        assert rho.purity() == pytest.approx(1.0, abs=1e-12)
        w, _ = hermitian_eigh(rho.matrix)
        assert w[-1] == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(w[:-1], 0.0, atol=1e-12)


def random_state(basis, rng):
    from qdcryptpy._fock import PureState
    v = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    return PureState(basis, v / np.linalg.norm(v))


def test_mode_operations_preserve_norm():
    from qdcryptpy._fock import FockBasis, apply_beamsplitter, apply_phase
    basis = FockBasis(3, 3)
    rng = np.random.default_rng(5)
    for _ in range(50):
        psi = random_state(basis, rng)
        a, b = rng.choice(3, size=2, replace=False)
        out = apply_phase(apply_beamsplitter(psi, int(a), int(b), rng.uniform()), int(b), rng.uniform(0, 2 * np.pi))
        assert np.sum(np.abs(out.amplitudes) ** 2) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(out.density_matrix().matrix.trace(), 1.0, atol=1e-12)


def test_partial_trace_drops_which_mode_coherence():
    from qdcryptpy._fock import FockBasis, PureState, partial_trace
    basis = FockBasis(3, 3)
    h = 1 / np.sqrt(2)
    rho = PureState.from_occupations(basis, {(1, 0, 0): h, (0, 1, 0): h}).density_matrix()
    two = partial_trace(rho, keep=[0, 1])
    assert two.basis == FockBasis(2, 3)
    assert two.matrix[two.basis.index((1, 0)), two.basis.index((0, 1))] == pytest.approx(0.5)
    one = partial_trace(rho, keep=[0])
    assert np.allclose(one.matrix, np.diag([0.5, 0.5, 0.0, 0.0]), atol=1e-15)


def test_partial_trace_composes():
    from qdcryptpy._fock import FockBasis, partial_trace
    from qdcryptpy._numlin import min_eigenvalue
    basis = FockBasis(3, 3)
    rng = np.random.default_rng(9)
    for _ in range(10):
        rho = random_state(basis, rng).density_matrix()
        two = partial_trace(rho, keep=[0, 2])
        assert np.real(np.trace(two.matrix)) == pytest.approx(1.0, abs=1e-12)
        assert min_eigenvalue(two.matrix) > -1e-12
        assert np.allclose(partial_trace(two, keep=[0]).matrix, partial_trace(rho, keep=[0]).matrix, atol=1e-12)


def test_partial_trace_rejects_bad_modes():
    from qdcryptpy._fock import FockBasis, partial_trace
    rho = random_state(FockBasis(2, 3), np.random.default_rng(1)).density_matrix()
    with pytest.raises(ValueError):
        partial_trace(rho, keep=[2])
    with pytest.raises(ValueError):
        partial_trace(rho, keep=[])
