# -*- coding: utf-8 -*-
"""
Asymptotic key rates for BB84 (no decoys, infinite decoys) and twin-field QKD.

Both source families enter through their photon-number distribution P(k);
channel and detector follow the usual threshold-detector yield model.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from qdcryptpy._errors import AssumptionViolation, ConfigError
from qdcryptpy._numlin import binary_entropy
from qdcryptpy._sources import PdsModel, QdPopulations, QdsModel, Source, photon_distribution

logger = logging.getLogger(__name__)

PDS_MU_BOUNDS = (1e-4, 1.5)
PDS_MU_XTOL = 1e-5

PHASE_RANDOMIZATION = ("BB84 security assumes the states' global phase must be uniformly randomized; "
                       "coherent sources are not accepted here")


@dataclass(frozen=True)
class ChannelParams:
    eta_d: float = 1.0
    Y0: float = 1e-9
    loss_db_per_km: float = 0.21
    e_d: float = 0.02
    e0: float = 0.5
    f: float = 1.2

    def __post_init__(self):
        for name in ("eta_d", "Y0", "e_d", "e0"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if self.f < 1:
            raise ConfigError(f"error-correction inefficiency f must be >= 1, got {self.f}")
        if self.loss_db_per_km < 0:
            raise ConfigError(f"fiber loss must be >= 0 dB/km, got {self.loss_db_per_km}")


@dataclass(frozen=True)
class TwinFieldParams:
    m: int = 16
    d: float = 1.0
    e_s: float = 0.01275

    def __post_init__(self):
        if self.m < 1:
            raise ConfigError(f"phase slice count must be >= 1, got {self.m}")
        if not 0.0 < self.d <= 1.0:
            raise ConfigError(f"duty cycle must lie in (0, 1], got {self.d}")
        if not 0.0 <= self.e_s <= 1.0:
            raise ConfigError(f"slicing error must lie in [0, 1], got {self.e_s}")


@dataclass
class YieldTable:
    Y: np.ndarray
    Q_k: np.ndarray
    e_k: np.ndarray
    Q: float
    E: float


@dataclass
class KeyRateResult:
    rate: float
    Q: float
    E: float
    Q1: float
    e1: float
    bracket: float = 0.0  # unclamped value
    mu: Optional[float] = None


def channel_transmittance(distance_km: float, channel: ChannelParams = ChannelParams()) -> float:
    if distance_km < 0:
        raise ConfigError(f"distance must be >= 0 km, got {distance_km}")
    return float(10.0 ** (-channel.loss_db_per_km * distance_km / 10.0))


def yields_gains_qber(distribution: Sequence[float], channel: ChannelParams, eta_t: float,
                      e_d: Optional[float] = None) -> YieldTable:
    """
    Per-photon-number yields, gains and error rates plus totals.

    :param distribution: P(k) for k = 0..K
    :param channel: detector and error parameters
    :param eta_t: channel transmittance
    :param e_d: misalignment override (twin-field adds the slicing error)
    """
    p = np.asarray(distribution, dtype=float)
    e_d = channel.e_d if e_d is None else e_d
    k = np.arange(p.size)
    click = 1.0 - (1.0 - channel.eta_d * eta_t) ** k
    y = channel.Y0 + (1.0 - channel.Y0) * click
    with np.errstate(divide="ignore", invalid="ignore"):
        e = np.where(y > 0, (channel.e0 * channel.Y0 + e_d * click) / y, 0.0)
    qk = y * p
    q = float(np.sum(qk))
    err = float(np.sum(e * qk) / q) if q > 0 else 0.0
    return YieldTable(Y=y, Q_k=qk, e_k=e, Q=q, E=min(max(err, 0.0), 1.0))


def _entropy(x: float) -> float:
    return binary_entropy(min(max(x, 0.0), 0.5))


def _bracket(q1: float, e1: float, q: float, e: float, f: float) -> float:
    if q1 <= 0:
        return q1 - f * q * _entropy(e)
    return q1 * (1.0 - _entropy(e1)) - f * q * _entropy(e)


def _check_bb84_source(source: Source):
    if isinstance(source, QdsModel) and source.coherent:
        raise AssumptionViolation(PHASE_RANDOMIZATION)
    if isinstance(source, PdsModel) and source.phase != "randomized":
        raise AssumptionViolation(PHASE_RANDOMIZATION)


def key_rate_bb84(source: Source, channel: ChannelParams = ChannelParams(), distance_km: float = 0.0,
                  decoy: str = "none") -> KeyRateResult:
    """
    BB84 secret key rate per pulse, R = ½[Q1(1 - H2(e1)) - f Q H2(E)] clamped at 0.

    Args:
        source: phase-randomized Poisson source or incoherent quantum dot.
        channel: channel and detector parameters.
        distance_km: fiber length.
        decoy: ``none`` bounds every multiphoton event as insecure;
            ``infinite`` knows the single-photon yield exactly.

    Raises:
        AssumptionViolation: coherent or fixed-phase source.
    """
    _check_bb84_source(source)
    if decoy not in ("none", "infinite"):
        raise ConfigError(f"decoy must be none or infinite, got {decoy!r}")
    eta_t = channel_transmittance(distance_km, channel)
    p = photon_distribution(source)
    t = yields_gains_qber(p, channel, eta_t)
    if decoy == "none":
        q1 = t.Q - float(np.sum(p[2:]))
        e1 = t.E * t.Q / q1 if q1 > 0 else 0.5
    else:
        y1 = t.Y[1] if t.Y.size > 1 else channel.Y0 + (1 - channel.Y0) * channel.eta_d * eta_t
        p1 = p[1] if p.size > 1 else 0.0
        q1 = y1 * p1
        e1 = (channel.e0 * channel.Y0 + channel.e_d * channel.eta_d * eta_t) / y1 if y1 > 0 else 0.5
    b = _bracket(q1, e1, t.Q, t.E, channel.f)
    return KeyRateResult(rate=max(0.0, 0.5 * b), Q=t.Q, E=t.E, Q1=max(q1, 0.0), e1=min(e1, 1.0), bracket=0.5 * b)


def _check_twinfield_source(source: Source):
    if isinstance(source, QdsModel):
        if not source.coherent:
            raise AssumptionViolation("twin-field QKD needs a phase reference: it must be implemented with "
                                      "coherent (RE) quantum dots, incoherent LA/TPE states are rejected")
        if np.count_nonzero(source.populations.as_array()) < 2:
            raise AssumptionViolation("a photon-number eigenstate has no accessible phase to encode")


def key_rate_twinfield(source: Source, channel: ChannelParams = ChannelParams(), distance_km: float = 0.0,
                       tf: TwinFieldParams = TwinFieldParams(), decoy: str = "infinite") -> KeyRateResult:
    """
    Twin-field rate with infinite decoys: each pulse travels half the distance
    (√η_t in the yields), phase slicing adds e_s to the misalignment, and the
    sifting prefactor is d/(2m).
    """
    _check_twinfield_source(source)
    if decoy != "infinite":
        raise ConfigError("twin-field rates are computed with infinite decoys only")
    eta_t = np.sqrt(channel_transmittance(distance_km, channel))
    e_mis = channel.e_d + tf.e_s
    p = photon_distribution(source)
    t = yields_gains_qber(p, channel, eta_t, e_d=e_mis)
    y1 = t.Y[1]
    q1 = y1 * p[1]
    e1 = (channel.e0 * channel.Y0 + e_mis * channel.eta_d * eta_t) / y1 if y1 > 0 else 0.5
    b = _bracket(q1, e1, t.Q, t.E, channel.f)
    pref = tf.d / (2 * tf.m)
    return KeyRateResult(rate=max(0.0, pref * b), Q=t.Q, E=t.E, Q1=q1, e1=min(e1, 1.0), bracket=pref * b)


RATE_FUNCTIONS = {
    "bb84": lambda s, c, d: key_rate_bb84(s, c, d, decoy="none"),
    "decoy": lambda s, c, d: key_rate_bb84(s, c, d, decoy="infinite"),
    "twinfield": lambda s, c, d: key_rate_twinfield(s, c, d),
}


def optimal_pds_rate(scheme: str, channel: ChannelParams = ChannelParams(),
                     distance_km: float = 0.0) -> KeyRateResult:
    """
    Best randomized-phase Poisson rate over μ in [1e-4, 1.5].

    The unclamped bracket is maximized in log μ, which keeps the narrow
    optimum of no-decoy BB84 at long distance inside the search.
    """
    fn = RATE_FUNCTIONS[scheme]

    def neg(log_mu):
        return -fn(PdsModel(float(np.exp(log_mu))), channel, distance_km).bracket

    lo, hi = np.log(PDS_MU_BOUNDS[0]), np.log(PDS_MU_BOUNDS[1])
    res = optimize.minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                                   options={"xatol": PDS_MU_XTOL})
    mu = float(np.exp(res.x))
    best = fn(PdsModel(mu), channel, distance_km)
    for edge in PDS_MU_BOUNDS:
        cand = fn(PdsModel(edge), channel, distance_km)
        if cand.bracket > best.bracket:
            best, mu = cand, edge
    logger.debug("%s best pds mu=%.6g at %.1f km: rate=%.6g", scheme, mu, distance_km, best.rate)
    best.mu = mu
    return best


def crossing_distance(curve_a: Callable[[float], float], curve_b: Callable[[float], float],
                      distances: Sequence[float], tol_km: float = 0.5) -> Optional[float]:
    """
    First distance where curve_a reaches curve_b after being below it.

    The grid brackets the sign change; bisection refines it to ``tol_km``.
    """
    grid = list(distances)
    if len(grid) < 2:
        raise ConfigError("crossing search needs at least two grid points")
    diff = [curve_a(x) - curve_b(x) for x in grid]
    for i in range(len(grid) - 1):
        if diff[i] < 0 <= diff[i + 1]:
            lo, hi = grid[i], grid[i + 1]
            while hi - lo > tol_km:
                mid = (lo + hi) / 2
                if curve_a(mid) - curve_b(mid) < 0:
                    lo = mid
                else:
                    hi = mid
            return (lo + hi) / 2
    return None


def qds_rate_curve(populations: QdPopulations, eta: float, scheme: str,
                   channel: ChannelParams = ChannelParams()) -> Callable[[float], float]:
    fn = RATE_FUNCTIONS[scheme]
    src = QdsModel(populations, eta)
    return lambda d: fn(src, channel, d).rate


def pds_rate_curve(scheme: str, channel: ChannelParams = ChannelParams()) -> Callable[[float], float]:
    return lambda d: optimal_pds_rate(scheme, channel, d).rate


def decoy_threshold_collection(populations: QdPopulations, channel: ChannelParams = ChannelParams(),
                               distance_km: float = 50.0, scheme: str = "decoy") -> Optional[float]:
    """Collection efficiency at which a quantum dot matches the best Poisson source."""
    fn = RATE_FUNCTIONS[scheme]
    target = optimal_pds_rate(scheme, channel, distance_km).rate

    def gap(eta):
        return fn(QdsModel(populations, eta), channel, distance_km).rate - target

    if gap(1.0) < 0 or gap(0.0) >= 0:
        logger.warning("no collection-efficiency threshold for %s at %.1f km", populations.pumping, distance_km)
        return None
    return float(optimize.brentq(gap, 0.0, 1.0, xtol=1e-6))

