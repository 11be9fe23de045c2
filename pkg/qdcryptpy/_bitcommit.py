# -*- coding: utf-8 -*-
"""
Bit commitment in the bounded-storage model, built on weak string erasure
with errors.

Security holds when m2 L' - m3 λ > 0, and then for any pulse count above
max(M1, M2, M3, M4); a configured count N is checked against that minimum.
All logarithms are base 2.
"""
import logging
from dataclasses import dataclass, replace
from functools import lru_cache, partial
from math import log2, sqrt
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from qdcryptpy._errors import AssumptionViolation, ConfigError
from qdcryptpy._numlin import binary_entropy
from qdcryptpy._qkd import ChannelParams, channel_transmittance
from qdcryptpy._sources import (EffectiveCoefficients, PdsModel, QdPopulations, QdsModel, Source, describe,
                                effective_coefficients, source_efficiency)
from qdcryptpy._sweep import SweepResult, parallel_map

logger = logging.getLogger(__name__)

M3_READINGS = ("multiphoton", "vacuum")
PDS_MU_BOUNDS = (1e-4, 3.0)

CURVE_COLUMNS = ("x", "source", "source_efficiency", "eta_c", "m2", "m3", "L_prime", "delta", "lambda",
                 "margin", "secure", "N_min", "N_sufficient")


@dataclass(frozen=True)
class BitCommitParams:
    """
    Protocol constants plus the photon statistics of one source.

    ``emitted`` are P_x(0), P_x(1), P_x(>=2) leaving Alice; ``received``
    are the same after honest losses η_c.
    """
    emitted: Optional[EffectiveCoefficients] = None
    received: Optional[EffectiveCoefficients] = None
    epsilon: float = 2e-5
    beta: float = 0.007
    gamma: float = 0.008
    S: int = 972
    e: float = 0.02
    N: Optional[float] = 1e8
    m3_reading: str = "multiphoton"

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        for name in ("beta", "gamma"):
            v = getattr(self, name)
            if not 0.0 < v <= 0.01:
                raise ConfigError(f"{name} must lie in (0, 0.01], got {v}")
        if self.S < 0:
            raise ConfigError(f"storage size S must be >= 0, got {self.S}")
        if not 0.0 <= self.e <= 1.0:
            raise ConfigError(f"error rate must lie in [0, 1], got {self.e}")
        if self.N is not None and self.N < 1:
            raise ConfigError(f"pulse count N must be >= 1, got {self.N}")
        if self.m3_reading not in M3_READINGS:
            raise ConfigError(f"m3 reading must be one of {M3_READINGS}, got {self.m3_reading!r}")

    def for_source(self, source: Source, eta_c: float = 1.0) -> "BitCommitParams":
        """Copy with the statistics of ``source`` filled in.

        :raises AssumptionViolation: a source with photon-number coherence
        """
        require_phase_randomized(source)
        if not 0.0 <= eta_c <= 1.0:
            raise ConfigError(f"honest transmission must lie in [0, 1], got {eta_c}")
        return replace(self, emitted=effective_coefficients(source), received=effective_coefficients(source, eta_c))


@dataclass
class BitCommitReport:
    m2: float
    m3: float
    L_prime: float
    delta: float
    lam: float
    M1: float
    M2: float
    M3: float
    M4: float
    condition_margin: float
    secure: bool
    N_min: Optional[float]
    N_sufficient: Optional[bool] = None  # N >= N_min; None without N or when insecure


def require_phase_randomized(source: Source):
    if isinstance(source, QdsModel) and source.coherent:
        raise AssumptionViolation("bounded-storage bit commitment assumes no photon-number coherence; "
                                  "it must be run with phase-randomized PDS or LA/TPE quantum dots")
    if isinstance(source, PdsModel) and source.phase != "randomized":
        raise AssumptionViolation("bounded-storage bit commitment assumes a phase-randomized Poisson source")


def _neg_l_prime(s: float, epsilon: float) -> float:
    return (log2(1.0 + 2.0 ** s) - 1.0 - s) / s + 3.0 * epsilon / s


@lru_cache(maxsize=64)
def l_prime(epsilon: float) -> Tuple[float, float]:
    """(L', argmax s) for L' = max_{s in (0,1]} -(1/s)[log(1+2^s) - 1 - s] - 3ε/s."""
    res = optimize.minimize_scalar(_neg_l_prime, bounds=(1e-9, 1.0), args=(epsilon,),
                                   method="bounded", options={"xatol": 1e-10})
    s, val = float(res.x), -float(res.fun)
    at_one = -_neg_l_prime(1.0, epsilon)
    if at_one > val:
        s, val = 1.0, at_one
    return val, s


def delta_lambda(e: float, beta: float) -> Tuple[float, float]:
    """
    δ = 2(e + β/√(1-2β)) / (1 - 4√5 β) and λ = H2(δ) + 3β².

    :raises ConfigError: δ outside [0, ½)
    """
    den = 1.0 - 4.0 * sqrt(5.0) * beta
    if den <= 0:
        raise ConfigError(f"beta={beta} leaves no room for the error term")
    delta = 2.0 * (e + beta / sqrt(1.0 - 2.0 * beta)) / den
    if not 0.0 <= delta < 0.5:
        raise ConfigError(f"delta={delta:.4g} must lie below 1/2 for the entropy bound")
    return delta, binary_entropy(delta) + 3.0 * beta * beta


def security_parameters(params: BitCommitParams) -> BitCommitReport:
    """Evaluate m2, m3, L', δ, λ, M1..M4 and the security condition."""
    if params.emitted is None or params.received is None:
        raise ConfigError("emitted and received photon statistics must be provided!")
    p0, p1, _ = params.emitted.as_tuple()
    r0, _, rm = params.received.as_tuple()
    m2 = p1 - r0 + p0 - 3.0 * params.gamma
    m3 = 1.0 - (rm if params.m3_reading == "multiphoton" else r0)
    lp, _ = l_prime(params.epsilon)
    delta, lam = delta_lambda(params.e, params.beta)
    margin = m2 * lp - m3 * lam
    eps, beta, gamma = params.epsilon, params.beta, params.gamma
    m1 = log2(2.0 / eps) / (2.0 * gamma * gamma)
    m2_count = log2(1.0 / eps) / (eps * m2) if m2 > 0 else float("inf")
    m3_count = log2(2.0 / eps) / ((m3 - gamma) * beta * beta) if m3 > gamma else float("inf")
    m4 = params.S / margin if margin > 0 else float("inf")
    secure = margin > 0
    n_min = max(m1, m2_count, m3_count, m4) if secure else None
    if n_min is not None and not np.isfinite(n_min):
        n_min = None
    enough = None if params.N is None or n_min is None else params.N >= n_min
    if enough is False:
        logger.debug("N=%.3g pulses is below N_min=%.3g", params.N, n_min)
    return BitCommitReport(m2, m3, lp, delta, lam, m1, m2_count, m3_count, m4, margin, secure, n_min, enough)


def honest_transmission(channel: ChannelParams = ChannelParams(), distance_km: float = 0.0) -> float:
    return channel_transmittance(distance_km, channel) * channel.eta_d


def source_report(source: Source, params: BitCommitParams = BitCommitParams(),
                  channel: ChannelParams = ChannelParams(), distance_km: float = 0.0) -> BitCommitReport:
    return security_parameters(params.for_source(source, honest_transmission(channel, distance_km)))


def _curve_row(point: Tuple[float, Source, float], params: BitCommitParams,
               channel: ChannelParams) -> List:
    x, source, distance = point
    eta_c = honest_transmission(channel, distance)
    r = security_parameters(params.for_source(source, eta_c))
    return [x, describe(source), source_efficiency(source), eta_c, r.m2, r.m3, r.L_prime, r.delta, r.lam,
            r.condition_margin, r.secure, r.N_min, r.N_sufficient]


def security_curve(sources: Sequence[Source], xs: Sequence[float], params: BitCommitParams = BitCommitParams(),
                   channel: ChannelParams = ChannelParams(), distances: Optional[Sequence[float]] = None,
                   workers: int = 1) -> SweepResult:
    """
    Security margin along a sweep; ``xs`` labels the rows (η, μ or km) and
    ``distances`` defaults to 0 km everywhere.
    """
    sources = list(sources)
    if len(sources) != len(xs):
        raise ConfigError("one sweep value per source must be provided!")
    distances = [0.0] * len(sources) if distances is None else list(distances)
    if len(distances) != len(sources):
        raise ConfigError("one distance per source must be provided!")
    for s in sources:
        require_phase_randomized(s)
    rows = parallel_map(partial(_curve_row, params=params, channel=channel),
                        list(zip(xs, sources, distances)), workers)
    rows.sort(key=lambda r: r[0])
    meta = {
        "primitive": "bitcommit",
        "epsilon": params.epsilon, "beta": params.beta, "gamma": params.gamma, "S": params.S,
        "e": params.e, "N": params.N, "m3_reading": params.m3_reading, "log_base": 2,
    }
    return SweepResult(CURVE_COLUMNS, rows, meta)


def best_pds_margin(params: BitCommitParams = BitCommitParams(), channel: ChannelParams = ChannelParams(),
                    distance_km: float = 0.0) -> Tuple[float, float]:
    """(best margin, μ) of a phase-randomized Poisson source, searched in log μ."""
    eta_c = honest_transmission(channel, distance_km)

    def neg(log_mu):
        return -security_parameters(params.for_source(PdsModel(float(np.exp(log_mu))), eta_c)).condition_margin

    lo, hi = np.log(PDS_MU_BOUNDS[0]), np.log(PDS_MU_BOUNDS[1])
    res = optimize.minimize_scalar(neg, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6})
    best, mu = -float(res.fun), float(np.exp(res.x))
    for edge in PDS_MU_BOUNDS:
        v = -neg(np.log(edge))
        if v > best:
            best, mu = v, edge
    return best, mu


def threshold_collection(populations: QdPopulations, params: BitCommitParams = BitCommitParams(),
                         channel: ChannelParams = ChannelParams(), distance_km: float = 0.0) -> Optional[float]:
    """Collection efficiency at which a quantum dot's margin reaches the best Poisson margin."""
    target, mu = best_pds_margin(params, channel, distance_km)
    eta_c = honest_transmission(channel, distance_km)

    def gap(eta):
        return security_parameters(params.for_source(QdsModel(populations, eta), eta_c)).condition_margin - target

    if gap(1.0) < 0 or gap(0.0) >= 0:
        logger.warning("no bit commitment threshold for %s (best pds margin %.5f at mu=%.4f)",
                       populations.pumping, target, mu)
        return None
    eta = float(optimize.brentq(gap, 0.0, 1.0, xtol=1e-8))
    logger.info("bit commitment threshold for %s: eta*=%.4f (pds mu=%.4f)", populations.pumping, eta, mu)
    return eta
