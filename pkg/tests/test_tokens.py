#!env python3
# -*- coding: utf-8 -*-
import numpy as np
import pytest


@pytest.fixture
def qubit_problem():
    from qdcryptpy._numlin import projector
    from qdcryptpy._sources import QUBIT_STATES
    from qdcryptpy._tokens import TokenProblem
    return TokenProblem([projector(q) for q in QUBIT_STATES], allowed_loss=0.05)


@pytest.fixture
def tpe():
    from qdcryptpy._sources import preset
    return preset("tpe")


def test_operator_shapes(qubit_problem):
    from qdcryptpy._tokens import build_error_loss_operators
    ops = build_error_loss_operators(qubit_problem)
    assert all(op.shape == (18, 18) for op in ops)
    for op in ops:
        assert np.allclose(op, op.conj().T)


def test_problem_validation():
    from qdcryptpy._errors import ConfigError
    from qdcryptpy._tokens import TokenProblem
    with pytest.raises(ConfigError):
        TokenProblem([np.eye(2) / 2] * 3, 0.1)
    with pytest.raises(ConfigError):
        TokenProblem([np.eye(2) / 2] * 4, 1.5)


def test_token_states_per_source(tpe):
    from qdcryptpy._sources import PdsModel, QdsModel
    from qdcryptpy._tokens import token_states
    assert len(token_states(QdsModel(tpe, 0.5))) == 4
    assert token_states(PdsModel(0.3)).__len__() == 4
    assert token_states(PdsModel(0.3, "fixed"))[0].dim == 4
    assert token_states(PdsModel(0.3))[0].dim == 7


def test_honest_loss(tpe):
    from qdcryptpy._sources import QdsModel
    from qdcryptpy._tokens import honest_loss
    assert honest_loss(QdsModel(tpe, 1.0)) == pytest.approx(1 - 0.9526, abs=1e-4)
    assert honest_loss(QdsModel(tpe, 1.0), 0.5) > honest_loss(QdsModel(tpe, 1.0))


def test_collection_for_source_efficiency(tpe):
    from qdcryptpy._errors import ConfigError
    from qdcryptpy._sources import QdsModel, source_efficiency
    from qdcryptpy._tokens import collection_for_source_efficiency
    eta = collection_for_source_efficiency(tpe, 0.5)
    assert source_efficiency(QdsModel(tpe, eta)) == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(ConfigError):
        collection_for_source_efficiency(tpe, 0.99)


@pytest.mark.slow
def test_qubit_tokens_resist_forging(qubit_problem):
    from qdcryptpy._tokens import noise_tolerance
    res = noise_tolerance(qubit_problem)
    assert res.solution.solved
    assert 1e-3 < res.min_error < 0.15


@pytest.mark.slow
def test_slots_are_symmetric(qubit_problem):
    from qdcryptpy._tokens import noise_tolerance
    a = noise_tolerance(qubit_problem).min_error
    b = noise_tolerance(qubit_problem, swap_slots=True).min_error
    assert a == pytest.approx(b, abs=1e-5)


@pytest.mark.slow
def test_more_loss_less_tolerance():
    from qdcryptpy._numlin import projector
    from qdcryptpy._sources import QUBIT_STATES
    from qdcryptpy._tokens import TokenProblem, noise_tolerance
    states = [projector(q) for q in QUBIT_STATES]
    low = noise_tolerance(TokenProblem(states, 0.05)).min_error
    high = noise_tolerance(TokenProblem(states, 0.4)).min_error
    assert high <= low + 1e-6


@pytest.mark.slow
def test_quantum_dot_tolerance(tpe):
    from qdcryptpy._sources import QdsModel
    from qdcryptpy._tokens import source_tolerance
    res = source_tolerance(QdsModel(tpe, 1.0))
    assert res.solution.solved
    assert 0.0 < res.min_error < 0.15


@pytest.mark.slow
def test_half_loss_defeats_tokens():
    from qdcryptpy._numlin import projector
    from qdcryptpy._sources import QUBIT_STATES
    from qdcryptpy._tokens import TokenProblem, noise_tolerance
    states = [projector(q) for q in QUBIT_STATES]
    assert noise_tolerance(TokenProblem(states, 0.5)).min_error < 1e-3
    assert noise_tolerance(TokenProblem(states, 0.7)).min_error < 1e-6


@pytest.mark.slow
def test_token_sdp_certificate(qubit_problem):
    from qdcryptpy._numlin import min_eigenvalue, partial_trace
    from qdcryptpy._sdp import FEASIBILITY_TOL, GAP_TOL
    from qdcryptpy._tokens import build_error_loss_operators, noise_tolerance
    res = noise_tolerance(qubit_problem)
    sol = res.solution
    assert sol.primal_residual <= FEASIBILITY_TOL
    assert sol.dual_residual <= FEASIBILITY_TOL
    assert abs(sol.primal_value - sol.dual_value) <= GAP_TOL * (1 + abs(sol.primal_value))
    e1, e2, l1, l2 = build_error_loss_operators(qubit_problem)
    x = sol.X
    assert min_eigenvalue(x) > -1e-7
    assert np.allclose(partial_trace(x, (9, 2), keep=[1]), np.eye(2), atol=1e-6)
    assert np.real(np.trace(e1 @ x)) == pytest.approx(sol.primal_value, abs=1e-6)
    assert np.real(np.trace((e2 - e1) @ x)) <= 1e-6
    for loss in (l1, l2):
        assert np.real(np.trace(loss @ x)) <= qubit_problem.allowed_loss + 1e-6


@pytest.mark.slow
def test_best_poisson_tolerance():
    from qdcryptpy._tokens import PDS_MU_BOUNDS, best_pds_tolerance
    tol, mu = best_pds_tolerance()
    assert tol == pytest.approx(0.0269, abs=2e-3)
    assert PDS_MU_BOUNDS[0] < mu < PDS_MU_BOUNDS[1]
    assert mu == pytest.approx(1.0, abs=0.3)


@pytest.mark.slow
def test_threshold_collection_per_pumping():
    from qdcryptpy._sources import preset
    from qdcryptpy._tokens import best_pds_tolerance, threshold_collection
    pds_best, _ = best_pds_tolerance()
    tpe = threshold_collection(preset("tpe"), pds_best)
    la = threshold_collection(preset("la"), pds_best)
    re = threshold_collection(preset("re"), pds_best)
    assert tpe == pytest.approx(0.38, abs=0.015)
    assert la == pytest.approx(0.44, abs=0.015)
    assert re == pytest.approx(0.47, abs=0.015)
    assert tpe < la < re


@pytest.mark.slow
def test_incoherent_pumping_tolerance_overhead():
    from qdcryptpy._sources import preset
    from qdcryptpy._tokens import tolerance_overhead
    for other in ("tpe", "la"):
        assert tolerance_overhead(preset("re"), preset(other), 0.8) == pytest.approx(0.02, abs=0.005)


@pytest.mark.slow
def test_threshold_without_crossing(tpe):
    from qdcryptpy._tokens import threshold_collection
    assert threshold_collection(tpe, 1.0, bracket=(0.5, 0.5000001)) is None
