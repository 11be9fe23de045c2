# -*- coding: utf-8 -*-
"""
Strong coin flipping with photonic qubit states.

Alice sends N states |Φ_{α,c}> = √y|v0> + (-1)^α √(1-y)|v1> (c = 0) or
√(1-y)|v0> - (-1)^α √y|v1> (c = 1). Dishonest Alice's bound depends on y
alone. Dishonest Bob's bound is a photon-number case analysis when the
source carries no photon-number coherence, and a repeated unambiguous
discrimination attack closed by a Helstrom measurement when it does.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache, partial
from math import ceil, log, pi, sqrt
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats
from scipy.linalg import block_diag

from qdcryptpy._errors import AssumptionViolation, ConfigError, SolverFailure
from qdcryptpy._fock import PHOTON_CUTOFF, DensityMatrix, encode_splitter_state
from qdcryptpy._numlin import as_hermitian, hermitian_basis, hermitian_eigh, trace_norm
from qdcryptpy._qkd import ChannelParams, channel_transmittance
from qdcryptpy._sdp import SdpProblem, sdp_solve
from qdcryptpy._sources import (EffectiveCoefficients, PdsModel, QdsModel, Source, describe,
                                effective_coefficients, photon_distribution)
from qdcryptpy._sweep import SweepResult, parallel_map

logger = logging.getLogger(__name__)

INCOHERENT_CASES = "incoherent-cases"
USD_HELSTROM = "usd-helstrom"

BOUND_FORMS = ("half-abort", "half-root")
DEFAULT_BOUND_FORM = "half-root"
Y_TOL = 1e-4
KERNEL_TOL = 1e-10

SWEEP_COLUMNS = ("distance_km", "eta", "N", "y", "p_alice", "p_bob", "P_ab",
                 "classical_bound", "advantage", "attack", "balanced")


@dataclass
class CoinFlipConfig:
    source: Source
    y: float = 0.9
    N: int = 1000
    e: float = 0.015
    channel: ChannelParams = field(default_factory=ChannelParams)
    distance_km: float = 0.0
    dark_counts: bool = True
    bound_form: str = DEFAULT_BOUND_FORM

    def __post_init__(self):
        if not 0.5 <= self.y <= 1.0:
            raise ConfigError(f"y must lie in [1/2, 1], got {self.y}")
        if self.N < 1:
            raise ConfigError(f"N must be >= 1, got {self.N}")
        if not 0.0 <= self.e <= 1.0:
            raise ConfigError(f"error rate must lie in [0, 1], got {self.e}")
        if self.bound_form not in BOUND_FORMS:
            raise ConfigError(f"classical bound form must be one of {BOUND_FORMS}, got {self.bound_form!r}")


@dataclass
class CheatBounds:
    p_alice: float
    p_bob: float
    attack_label: str
    y: float = float("nan")

    @property
    def cheat(self) -> float:
        return max(self.p_alice, self.p_bob)


@dataclass
class BalancedPoint:
    """One balanced (or best-effort) protocol at fixed N."""
    bounds: CheatBounds
    N: int
    balanced: bool


def _emitted_populations(source: Source) -> Tuple[np.ndarray, float, bool]:
    if isinstance(source, QdsModel):
        return source.populations.as_array(), source.eta, source.coherent
    p = stats.poisson.pmf(np.arange(PHOTON_CUTOFF), source.mu)
    # the truncated tail is lumped into the highest kept photon number
    p = np.append(p, max(0.0, 1.0 - float(p.sum())))
    return p, 1.0, source.phase == "fixed"


def has_number_coherence(source: Source) -> bool:
    return _emitted_populations(source)[2]


def coinflip_states(y: float, source: Source) -> Dict[Tuple[int, int], DensityMatrix]:
    """
    The four states σ_{α,c} Alice may send, keyed by (α, c).

    The collection efficiency (or mean photon number) is carried by the
    source model. A photon enters a splitter of reflectivity y (c = 0) or
    1 - y (c = 1) and picks up phase π(α + c) on the transmitted arm.
    """
    if not 0.5 <= y <= 1.0:
        raise ConfigError(f"y must lie in [1/2, 1], got {y}")
    pops, eta, coherent = _emitted_populations(source)
    states = {}
    for alpha in (0, 1):
        for c in (0, 1):
            r = y if c == 0 else 1.0 - y
            states[(alpha, c)] = encode_splitter_state(pops, eta, r, pi * ((alpha + c) % 2), coherent)
    return states


def bob_mixtures(states: Dict[Tuple[int, int], DensityMatrix]) -> Tuple[np.ndarray, np.ndarray]:
    """σ_c = ½(σ_{0,c} + σ_{1,c}): what Bob faces not knowing α."""
    s0 = (states[(0, 0)].matrix + states[(1, 0)].matrix) / 2
    s1 = (states[(0, 1)].matrix + states[(1, 1)].matrix) / 2
    return s0, s1


def alice_cheat_bound(y: float) -> float:
    """3/4 + ½√(y(1-y))."""
    if not 0.0 <= y <= 1.0:
        raise ConfigError(f"y must lie in [0, 1], got {y}")
    return 0.75 + 0.5 * sqrt(y * (1.0 - y))


def case_probabilities(coeffs: EffectiveCoefficients, N: int) -> Tuple[float, float, float, float]:
    """
    Probabilities that Alice's N pulses hold only vacuum, vacuum and single
    photons, exactly one multiphoton pulse among vacua, or one multiphoton
    pulse among vacua and single photons.
    """
    if N < 1:
        raise ConfigError(f"N must be >= 1, got {N}")
    p0, p1, pm = coeffs.as_tuple()
    a1 = p0 ** N
    a2 = (p0 + p1) ** N - a1
    a3 = N * pm * p0 ** (N - 1)
    a4 = N * pm * ((p0 + p1) ** (N - 1) - p0 ** (N - 1))
    return a1, a2, a3, a4


def bob_cheat_bound_incoherent(coeffs: Union[EffectiveCoefficients, Source], N: int, y: float) -> float:
    """
    Case-analysis bound on Bob's bias towards his outcome: ½ on all-vacuum,
    y on the single-photon and single-multiphoton cases, -2y²+4y-1 on their
    combination and 1 elsewhere.

    :param coeffs: P(0), P(1), P(>=2) at the source, or a source to take them from
    :raises AssumptionViolation: a source with photon-number coherence
    """
    if isinstance(coeffs, (PdsModel, QdsModel)):
        require_incoherent(coeffs)
        coeffs = effective_coefficients(coeffs)
    cases = case_probabilities(coeffs, N)
    values = (0.5, y, y, -2 * y * y + 4 * y - 1)
    covered = sum(cases)
    return float(sum(p * v for p, v in zip(cases, values)) + max(0.0, 1.0 - covered))


def _kernel(rho: np.ndarray) -> np.ndarray:
    w, v = hermitian_eigh(rho)
    top = max(float(np.max(np.abs(w))), np.finfo(float).tiny)
    return v[:, w <= KERNEL_TOL * top]


def usd_probability(sigma0, sigma1) -> float:
    """
    Best equal-prior success probability of unambiguous discrimination.

    M0 is confined to the kernel of σ1 and M1 to that of σ0, so the
    zero-error conditions hold by construction and the SDP is
    strictly feasible:

        max  ½[Tr(K1 X0 K1^† σ0) + Tr(K0 X1 K0^† σ1)]
        s.t. K1 X0 K1^† + K0 X1 K0^† + M_inc = 1,   X0, X1, M_inc >= 0.

    :raises SolverFailure: the SDP did not close
    """
    s0, s1 = as_hermitian(sigma0, 1e-10), as_hermitian(sigma1, 1e-10)
    if s0.shape != s1.shape:
        raise ConfigError("USD states must share one basis")
    d = s0.shape[0]
    k1, k0 = _kernel(s1), _kernel(s0)
    blocks = [(k, rho) for k, rho in ((k1, s0), (k0, s1)) if k.shape[1] > 0]
    if not blocks:
        return 0.0
    sizes = [k.shape[1] for k, _ in blocks] + [d]
    objective = block_diag(*([0.5 * k.conj().T @ rho @ k for k, rho in blocks] + [np.zeros((d, d))]))
    eqs = []
    for h in hermitian_basis(d):
        a = block_diag(*([k.conj().T @ h @ k for k, _ in blocks] + [h]))
        eqs.append((a, float(np.real(np.trace(h)))))
    sol = sdp_solve(SdpProblem(objective=objective, eq_constraints=eqs, sense="maximize", block_sizes=sizes))
    if not sol.solved:
        raise SolverFailure(f"USD SDP ended with status {sol.status}", sol.status)
    logger.debug("usd value=%.10f gap=%.2e kernels=%s", sol.primal_value, sol.gap, sizes[:-1])
    return float(min(max(sol.primal_value, 0.0), 1.0))


def helstrom(sigma0, sigma1) -> float:
    """½ + ¼‖σ0 - σ1‖₁ for equal priors."""
    s0, s1 = as_hermitian(sigma0, 1e-10), as_hermitian(sigma1, 1e-10)
    if s0.shape != s1.shape:
        raise ConfigError("Helstrom states must share one basis")
    return 0.5 + 0.25 * trace_norm(s0 - s1)


def usd_helstrom_bound(p_usd: float, p_hel: float, N: int) -> float:
    if N < 1:
        raise ConfigError(f"N must be >= 1, got {N}")
    miss = (1.0 - p_usd) ** (N - 1)
    return (1.0 - miss) + miss * p_hel


def bob_cheat_bound_coherent(sigma0, sigma1, N: int) -> float:
    """Unambiguous discrimination on N-1 pulses, Helstrom on the last."""
    return usd_helstrom_bound(usd_probability(sigma0, sigma1), helstrom(sigma0, sigma1), N)


@lru_cache(maxsize=4096)
def _discrimination(source: Source, y: float) -> Tuple[float, float]:
    s0, s1 = bob_mixtures(coinflip_states(y, source))
    return usd_probability(s0, s1), helstrom(s0, s1)


def cheat_bounds(source: Source, y: float, N: int) -> CheatBounds:
    """Both parties' bounds; the attack on Bob's side follows the source's coherence."""
    if has_number_coherence(source):
        p_usd, p_hel = _discrimination(source, float(y))
        p_bob = usd_helstrom_bound(p_usd, p_hel, N)
        label = USD_HELSTROM
    else:
        p_bob = bob_cheat_bound_incoherent(effective_coefficients(source), N, y)
        label = INCOHERENT_CASES
    return CheatBounds(alice_cheat_bound(y), p_bob, label, y)


def require_incoherent(source: Source):
    if has_number_coherence(source):
        raise AssumptionViolation("the photon-number case analysis assumes no coherence between photon numbers; "
                                  "use the USD+Helstrom bound for coherent sources")


def click_probability(source: Source, channel: ChannelParams = ChannelParams(), distance_km: float = 0.0,
                      dark_counts: bool = True) -> float:
    """Probability that honest Bob registers a click on one pulse."""
    t = channel_transmittance(distance_km, channel) * channel.eta_d
    no_click = float(photon_distribution(source, t)[0])
    if dark_counts:
        no_click *= 1.0 - channel.Y0
    return 1.0 - no_click


def abort_probability(z: float, e: float) -> float:
    """P_ab = Z + (1 - Z) e/2."""
    if not 0.0 <= z <= 1.0 or not 0.0 <= e <= 1.0:
        raise ConfigError(f"Z and e must lie in [0, 1], got Z={z}, e={e}")
    return z + (1.0 - z) * e / 2


def honest_abort(source: Source, channel: ChannelParams = ChannelParams(), distance_km: float = 0.0,
                 N: int = 1000, e: float = 0.015, dark_counts: bool = True) -> float:
    """Honest abort probability with Z the chance that none of N pulses clicks."""
    if N < 1:
        raise ConfigError(f"N must be >= 1, got {N}")
    z = (1.0 - click_probability(source, channel, distance_km, dark_counts)) ** N
    return abort_probability(z, e)


def required_pulses(p_click: float, P_ab: float, e: float) -> Optional[int]:
    """
    Fewest pulses keeping the honest abort probability at or below P_ab;
    None when no pulse count can.
    """
    if not 0.0 <= P_ab <= 1.0:
        raise ConfigError(f"abort probability must lie in [0, 1], got {P_ab}")
    z_target = (P_ab - e / 2) / (1.0 - e / 2)
    if z_target >= 1.0:
        return 1
    if z_target <= 0.0 or p_click <= 0.0:
        return None
    if p_click >= 1.0:
        return 1
    return max(1, int(ceil(log(z_target) / log(1.0 - p_click) - 1e-12)))


def classical_bound(P_ab: float, form: str = DEFAULT_BOUND_FORM) -> float:
    """
    Best classical cheating probability at honest abort P_ab.

    ``half-abort`` is 1 - √(P_ab/2); ``half-root`` is 1 - √P_ab / 2.
    """
    if not 0.0 <= P_ab <= 1.0:
        raise ConfigError(f"abort probability must lie in [0, 1], got {P_ab}")
    if form == "half-abort":
        return 1.0 - sqrt(P_ab / 2)
    if form == "half-root":
        return 1.0 - sqrt(P_ab) / 2
    raise ConfigError(f"classical bound form must be one of {BOUND_FORMS}, got {form!r}")


def balance(source: Source, N: int, tol: float = Y_TOL) -> BalancedPoint:
    """
    Bisect y in [1/2, 1] until Alice's and Bob's bounds meet.

    Identical bounds over the whole bracket return its midpoint. Without a
    sign change the endpoint with the smaller worse-party bound is kept and
    the point is flagged unbalanced.
    """
    lo, hi = 0.5, 1.0
    b_lo, b_hi = cheat_bounds(source, lo, N), cheat_bounds(source, hi, N)
    f_lo, f_hi = b_lo.p_alice - b_lo.p_bob, b_hi.p_alice - b_hi.p_bob
    if abs(f_lo) < 1e-12 and abs(f_hi) < 1e-12:
        return BalancedPoint(cheat_bounds(source, 0.75, N), N, True)
    if f_lo * f_hi > 0:
        best = min((b_lo, b_hi), key=lambda b: b.cheat)
        logger.warning("coin flip not balanceable for %s at N=%d; keeping y=%.4f", describe(source), N, best.y)
        return BalancedPoint(best, N, False)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        b = cheat_bounds(source, mid, N)
        f = b.p_alice - b.p_bob
        if f == 0:
            return BalancedPoint(b, N, True)
        if (f > 0) == (f_lo > 0):
            lo, f_lo = mid, f
        else:
            hi = mid
    return BalancedPoint(cheat_bounds(source, (lo + hi) / 2, N), N, True)


def _source_x(source: Source) -> float:
    return source.eta if isinstance(source, QdsModel) else source.mu


def evaluate_point(config: CoinFlipConfig, abort_target: Optional[float] = None,
                   pulse_source: Optional[Source] = None) -> List:
    """
    One sweep row. With ``abort_target`` the pulse count is solved per
    point so the honest abort stays at that value; ``pulse_source``
    takes the count from another source's click rate instead.
    """
    src = config.source
    if abort_target is None:
        n = config.N
    else:
        ref = pulse_source or src
        p_click = click_probability(ref, config.channel, config.distance_km, config.dark_counts)
        n = required_pulses(p_click, abort_target, config.e)
        if n is None:
            logger.warning("no pulse count reaches P_ab=%.4g for %s at %.1f km",
                           abort_target, describe(ref), config.distance_km)
            return [config.distance_km, _source_x(src), 0, None, None, None, abort_target,
                    classical_bound(abort_target, config.bound_form), False, "", False]
    p_ab = honest_abort(src, config.channel, config.distance_km, n, config.e, config.dark_counts)
    point = balance(src, n)
    bound = classical_bound(p_ab, config.bound_form)
    b = point.bounds
    return [config.distance_km, _source_x(src), n, b.y, b.p_alice, b.p_bob, p_ab,
            bound, b.cheat < bound, b.attack_label, point.balanced]


def balance_and_sweep(configs: Sequence[CoinFlipConfig], abort_target: Optional[float] = None,
                      pulse_source: Optional[Source] = None, workers: int = 1) -> SweepResult:
    """Balance every configuration and tabulate cheating against the classical bound."""
    configs = list(configs)
    if not configs:
        raise ConfigError("configs must be provided!")
    logger.info("coin flip sweep over %d points", len(configs))
    fn = partial(evaluate_point, abort_target=abort_target, pulse_source=pulse_source)
    rows = parallel_map(fn, configs, workers)
    rows.sort(key=lambda r: (r[0], r[1]))
    first = configs[0]
    meta = {
        "primitive": "coinflip",
        "source": describe(first.source),
        "e": first.e,
        "P_ab": "per N" if abort_target is None else abort_target,
        "classical_bound_form": first.bound_form,
        "z_dark_counts": first.dark_counts,
        "y_tolerance": Y_TOL,
    }
    return SweepResult(SWEEP_COLUMNS, rows, meta)


def quantum_advantage_distance(source: Source, P_ab: float = 0.025, e: float = 0.015,
                               channel: ChannelParams = ChannelParams(),
                               bound_form: str = DEFAULT_BOUND_FORM, dark_counts: bool = True,
                               max_km: float = 200.0, step_km: float = 5.0, tol_km: float = 0.5,
                               pulse_source: Optional[Source] = None) -> Optional[float]:
    """
    Longest distance at which the balanced protocol still beats the
    classical bound, with N re-solved per distance to hold P_ab fixed.

    Returns None when there is no advantage even at 0 km.
    """
    def wins(d: float) -> bool:
        cfg = CoinFlipConfig(source, e=e, channel=channel, distance_km=d,
                             dark_counts=dark_counts, bound_form=bound_form)
        return bool(evaluate_point(cfg, P_ab, pulse_source)[8])

    if not wins(0.0):
        logger.warning("no quantum advantage for %s at 0 km (%s bound)", describe(source), bound_form)
        return None
    lo = 0.0
    grid = np.arange(step_km, max_km + step_km / 2, step_km)
    hi = None
    for d in grid:
        if wins(float(d)):
            lo = float(d)
        else:
            hi = float(d)
            break
    if hi is None:
        return lo
    while hi - lo > tol_km:
        mid = (lo + hi) / 2
        if wins(mid):
            lo = mid
        else:
            hi = mid
    d = (lo + hi) / 2
    logger.info("quantum advantage for %s up to %.1f km (%s bound)", describe(source), d, bound_form)
    return d
