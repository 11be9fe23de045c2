# -*- coding: utf-8 -*-
"""
Unforgeability of single-state quantum tokens.

A forger is a channel from one token state to two output slots, each read
by a verifier with a squashed qubit-plus-no-click measurement. The best
forger's error is an SDP over the channel's Choi matrix J on
H1 ⊗ H2 ⊗ H_in with Tr_{H1 H2} J = 1.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from qdcryptpy._errors import ConfigError, SolverFailure
from qdcryptpy._fock import DensityMatrix, encode_state
from qdcryptpy._numlin import as_hermitian, projector
from qdcryptpy._qkd import ChannelParams, channel_transmittance
from qdcryptpy._sdp import PartialTraceConstraint, SdpProblem, SdpSolution, sdp_solve
from qdcryptpy._sources import (PdsModel, QdPopulations, QdsModel, Source, QUBIT_STATES,
                                alpha_from_mu, pds_fixed_phase_state, pds_randomized_state,
                                source_efficiency)

logger = logging.getLogger(__name__)

OUTPUT_DIM = 3
PHASES = tuple(k * np.pi / 2 for k in range(4))
PDS_MU_BOUNDS = (0.05, 3.0)
THRESHOLD_TOL = 0.005


@dataclass
class SquashedMeasurement:
    """Outcomes |0>, |1>, |∅> of a threshold-detector verifier after squashing."""
    beta_perp: List[np.ndarray]
    empty: np.ndarray

    @classmethod
    def bb84(cls) -> "SquashedMeasurement":
        perps = []
        for k in range(4):
            q = QUBIT_STATES[(k + 2) % 4]
            perps.append(projector(np.append(q, 0.0)))
        return cls(perps, projector([0, 0, 1]))


@dataclass
class TokenProblem:
    input_states: List[np.ndarray]
    allowed_loss: float
    output_dim: int = OUTPUT_DIM

    def __post_init__(self):
        if len(self.input_states) != 4:
            raise ConfigError("a token problem needs exactly four input states")
        mats = [as_hermitian(s.matrix if isinstance(s, DensityMatrix) else s) for s in self.input_states]
        if len({m.shape for m in mats}) != 1:
            raise ConfigError("token input states must share one basis")
        self.input_states = mats
        if not 0.0 <= self.allowed_loss <= 1.0:
            raise ConfigError(f"allowed loss must lie in [0, 1], got {self.allowed_loss}")

    @property
    def input_dim(self) -> int:
        return self.input_states[0].shape[0]


@dataclass
class NoiseToleranceResult:
    min_error: float
    gap: float
    solution: SdpSolution


def build_error_loss_operators(problem: TokenProblem,
                               measurement: Optional[SquashedMeasurement] = None
                               ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    E1, E2, L1, L2 on H1 ⊗ H2 ⊗ H_in.

    Error operators carry an extra ½ for the verifier's random basis choice;
    input states enter conjugated to pair with the Choi matrix.
    """
    meas = measurement or SquashedMeasurement.bb84()
    eye = np.eye(problem.output_dim)
    if meas.empty.shape != (problem.output_dim, problem.output_dim):
        raise ConfigError("measurement and output dimensions differ")
    e1 = e2 = l1 = l2 = 0
    for k, sigma in enumerate(problem.input_states):
        s = np.conj(sigma) / 4
        e1 = e1 + np.kron(np.kron(meas.beta_perp[k], eye), s) / 2
        e2 = e2 + np.kron(np.kron(eye, meas.beta_perp[k]), s) / 2
        l1 = l1 + np.kron(np.kron(meas.empty, eye), s)
        l2 = l2 + np.kron(np.kron(eye, meas.empty), s)
    return e1, e2, l1, l2


def noise_tolerance(problem: TokenProblem, swap_slots: bool = False) -> NoiseToleranceResult:
    """
    Smallest error a forger must cause on slot 1 while slot 2 errs no more
    and neither slot reports more than the allowed loss.

    :raises SolverFailure: the SDP did not close
    """
    e1, e2, l1, l2 = build_error_loss_operators(problem)
    if swap_slots:
        e1, e2, l1, l2 = e2, e1, l2, l1
    d = problem.input_dim
    dout = problem.output_dim ** 2
    sdp = SdpProblem(
        objective=e1,
        ineq_constraints=[(e2 - e1, 0.0), (l1, problem.allowed_loss), (l2, problem.allowed_loss)],
        partial_trace_eq=PartialTraceConstraint(dims=(dout, d), keep=1, target=np.eye(d)),
    )
    sol = sdp_solve(sdp)
    if not sol.solved:
        raise SolverFailure(f"token SDP ended with status {sol.status} (l={problem.allowed_loss:.4g})",
                            sol.status)
    return NoiseToleranceResult(min_error=max(sol.primal_value, 0.0), gap=sol.gap, solution=sol)


def token_states(source: Source, transmittance: float = 1.0) -> List[DensityMatrix]:
    """The four encoded states as seen by the verifier."""
    if isinstance(source, QdsModel):
        pop = source.populations
        eta = source.eta * transmittance
        return [encode_state(pop.as_array(), eta, phi, 0.5, pop.coherent) for phi in PHASES]
    mu = source.mu * transmittance
    if source.phase == "fixed":
        return [pds_fixed_phase_state(alpha_from_mu(mu), k).density_matrix() for k in range(4)]
    return [pds_randomized_state(mu, k) for k in range(4)]


def _thinned(source: Source, transmittance: float) -> Source:
    if isinstance(source, QdsModel):
        return QdsModel(source.populations, source.eta * transmittance)
    return PdsModel(source.mu * transmittance, source.phase)


def honest_loss(source: Source, transmittance: float = 1.0) -> float:
    return 1.0 - source_efficiency(_thinned(source, transmittance))


def token_problem(source: Source, distance_km: float = 0.0,
                  channel: ChannelParams = ChannelParams()) -> TokenProblem:
    t = channel_transmittance(distance_km, channel) * channel.eta_d
    return TokenProblem(token_states(source, t), honest_loss(source, t))


def source_tolerance(source: Source, distance_km: float = 0.0,
                     channel: ChannelParams = ChannelParams()) -> NoiseToleranceResult:
    return noise_tolerance(token_problem(source, distance_km, channel))


def best_pds_tolerance(phase: str = "randomized", distance_km: float = 0.0,
                       channel: ChannelParams = ChannelParams()) -> Tuple[float, float]:
    """(best tolerance, μ) for a Poisson source, bounded Brent search over μ."""

    def neg(mu):
        return -source_tolerance(PdsModel(mu, phase), distance_km, channel).min_error

    res = optimize.minimize_scalar(neg, bounds=PDS_MU_BOUNDS, method="bounded", options={"xatol": 1e-3})
    logger.info("best %s pds token tolerance %.5f at mu=%.4f", phase, -res.fun, res.x)
    return float(-res.fun), float(res.x)


def threshold_collection(populations: QdPopulations, pds_best: float, distance_km: float = 0.0,
                         channel: ChannelParams = ChannelParams(),
                         bracket: Tuple[float, float] = (0.01, 1.0)) -> Optional[float]:
    """
    Collection efficiency at which the quantum dot's tolerance reaches ``pds_best``,
    by bisection to ±0.005.
    """
    def gap(eta):
        return source_tolerance(QdsModel(populations, eta), distance_km, channel).min_error - pds_best

    lo, hi = bracket
    if gap(hi) < 0 or gap(lo) >= 0:
        logger.warning("no token threshold for %s: tolerance never crosses %.5f", populations.pumping, pds_best)
        return None
    while hi - lo > 2 * THRESHOLD_TOL:
        mid = (lo + hi) / 2
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
    eta = (lo + hi) / 2
    logger.info("token threshold for %s: eta*=%.3f", populations.pumping, eta)
    return eta


def collection_for_source_efficiency(populations: QdPopulations, target: float) -> float:
    """Collection efficiency giving the requested source efficiency."""
    top = source_efficiency(QdsModel(populations, 1.0))
    if not 0.0 <= target <= top:
        raise ConfigError(f"source efficiency {target} unreachable (max {top:.4f})")
    return float(optimize.brentq(lambda e: source_efficiency(QdsModel(populations, e)) - target,
                                 0.0, 1.0, xtol=1e-12))


def tolerance_overhead(reference: QdPopulations, other: QdPopulations, efficiency: float) -> float:
    """Tolerance of ``other`` minus that of ``reference`` at a shared source efficiency."""
    a = source_tolerance(QdsModel(other, collection_for_source_efficiency(other, efficiency))).min_error
    b = source_tolerance(QdsModel(reference, collection_for_source_efficiency(reference, efficiency))).min_error
    return a - b
