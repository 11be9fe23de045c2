# -*- coding: utf-8 -*-
"""
Photon sources: quantum-dot populations and Poisson-distributed sources.

Quantum dots are described by emitted photon-number populations p_0..p_3
and a coherence flag (resonant excitation keeps coherences between photon
numbers, phonon-assisted and two-photon excitation do not). Poisson sources
are attenuated lasers with a mean photon number and a phase flag.
"""
from dataclasses import dataclass
from math import cos, cosh, exp, sin, sinh, sqrt
from typing import Dict, Tuple, Union

import numpy as np
from scipy import stats

from qdcryptpy._errors import ConfigError
from qdcryptpy._fock import DensityMatrix, PureState

PUMPINGS = ("RE", "LA", "TPE")
POISSON_TAIL = 1e-12

FIXED_PHASE_LABELS = ("b0", "b1", "b2", "b3")
RANDOMIZED_LABELS = ("v", "q0", "q1", "m0", "m1", "m2", "m3")


@dataclass(frozen=True)
class QdPopulations:
    p0: float
    p1: float
    p2: float
    p3: float
    pumping: str = "LA"
    coherent: bool = False

    def __post_init__(self):
        if self.pumping not in PUMPINGS:
            raise ConfigError(f"pumping must be one of {PUMPINGS}, got {self.pumping!r}")
        ps = self.as_array()
        if np.any(ps < 0) or np.any(ps > 1) or abs(ps.sum() - 1.0) > 1e-12:
            raise ConfigError(f"populations must be probabilities summing to 1, got {list(ps)}")
        if self.pumping == "TPE" and self.p3 != 0:
            raise ConfigError("two-photon excitation cannot emit three photons (p3 must be 0)")

    def as_array(self) -> np.ndarray:
        return np.array([self.p0, self.p1, self.p2, self.p3], dtype=float)


@dataclass(frozen=True)
class SourcePreset:
    """An optimal pumping configuration and the measured inputs behind it."""
    name: str
    pulse_ps: float
    pulse_area: str
    brightness_tilde: float
    P2: float
    P3: float
    populations: QdPopulations


def _preset(pumping: str, p1: float, p2: float, p3: float, pulse_ps: float, area: str) -> SourcePreset:
    pop = QdPopulations(1.0 - p1 - p2 - p3, p1, p2, p3, pumping, coherent=(pumping == "RE"))
    return SourcePreset(pumping, pulse_ps, area, p1 + 2 * (p2 + p3) + 3 * p3, p2 + p3, p3, pop)


PRESETS: Dict[str, SourcePreset] = {
    "re": _preset("RE", 0.9275, 0.0091, 1e-8, 3.0, "pi_RE"),
    "la": _preset("LA", 0.8219, 0.0180, 1e-7, 8.0, "10 pi_RE"),
    "tpe": _preset("TPE", 0.9514, 0.0012, 0.0, 12.0, "pi_TPE"),
}


def preset(name: str) -> QdPopulations:
    key = name.lower().replace("-coherent", "").replace("-incoherent", "")
    if key not in PRESETS:
        raise ConfigError(f"unknown source preset {name!r}; known: {sorted(PRESETS)}")
    return PRESETS[key].populations


@dataclass(frozen=True)
class PdsModel:
    mu: float
    phase: str = "randomized"

    def __post_init__(self):
        if self.mu < 0:
            raise ConfigError(f"mean photon number must be >= 0, got {self.mu}")
        if self.phase not in ("fixed", "randomized"):
            raise ConfigError(f"phase must be fixed or randomized, got {self.phase!r}")


@dataclass(frozen=True)
class QdsModel:
    """A quantum dot seen through collection efficiency ``eta``."""
    populations: QdPopulations
    eta: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ConfigError(f"collection efficiency must lie in [0, 1], got {self.eta}")

    @property
    def coherent(self) -> bool:
        return self.populations.coherent


Source = Union[PdsModel, QdsModel]


@dataclass(frozen=True)
class EffectiveCoefficients:
    P0: float
    P1: float
    P_multi: float

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.P0, self.P1, self.P_multi


def populations_from_correlations(brightness_tilde: float, P2: float, P3: float,
                                  pumping: str = "LA", coherent: bool = None) -> QdPopulations:
    """
    Emitted populations from the unnormalized brightness and the
    probabilities P2 (two or more photons) and P3 (three photons).

    :raises ConfigError: inconsistent inputs giving a population outside [0, 1]
    """
    p1 = brightness_tilde - 2 * P2 - 3 * P3
    p2 = P2 - P3
    p3 = P3
    p0 = 1 - p1 - p2 - p3
    for name, v in (("p0", p0), ("p1", p1), ("p2", p2), ("p3", p3)):
        if v < 0 or v > 1:
            raise ConfigError(f"inconsistent measurement inputs: {name} = {v:.6g} outside [0, 1]")
    if coherent is None:
        coherent = pumping == "RE"
    return QdPopulations(p0, p1, p2, p3, pumping, coherent)


def brightness_purity(pop: QdPopulations) -> Tuple[float, float]:
    """(B, P) with B = p1+p2+p3 and P = p1/B; P is nan when B = 0."""
    b = pop.p1 + pop.p2 + pop.p3
    return b, (pop.p1 / b if b > 0 else float("nan"))


def poisson_coefficients(mu: float) -> Tuple[float, float, float]:
    if mu < 0:
        raise ConfigError(f"mean photon number must be >= 0, got {mu}")
    p0 = exp(-mu)
    p1 = mu * p0
    return p0, p1, 1.0 - p0 - p1


def poisson_cutoff(mu: float, tail: float = POISSON_TAIL) -> int:
    k = 2
    while stats.poisson.sf(k, mu) >= tail:
        k += 1
    return k


def thinned_distribution(pop: QdPopulations, eta: float) -> np.ndarray:
    """P_eta(k), k = 0..3: binomial thinning of the emitted populations."""
    p = pop.as_array()
    out = np.zeros(4)
    for n, pn in enumerate(p):
        if pn:
            out[:n + 1] += pn * stats.binom.pmf(np.arange(n + 1), n, eta)
    return out


def photon_distribution(source: Source, transmittance: float = 1.0) -> np.ndarray:
    """Photon-number distribution leaving the source, optionally thinned further."""
    if isinstance(source, QdsModel):
        return thinned_distribution(source.populations, source.eta * transmittance)
    mu = source.mu * transmittance
    return stats.poisson.pmf(np.arange(poisson_cutoff(mu) + 1), mu)


def qds_effective_coefficients(pop: QdPopulations, eta: float) -> EffectiveCoefficients:
    d = thinned_distribution(pop, eta)
    return EffectiveCoefficients(float(d[0]), float(d[1]), float(1.0 - d[0] - d[1]))


def effective_coefficients(source: Source, transmittance: float = 1.0) -> EffectiveCoefficients:
    if isinstance(source, QdsModel):
        return qds_effective_coefficients(source.populations, source.eta * transmittance)
    return EffectiveCoefficients(*poisson_coefficients(source.mu * transmittance))


def source_efficiency(source: Source) -> float:
    """Probability that at least one photon leaves the source."""
    if isinstance(source, PdsModel):
        return 1.0 - exp(-source.mu)
    p = source.populations.as_array()
    return float(1.0 - np.sum(p * (1.0 - source.eta) ** np.arange(p.size)))


def alpha_from_mu(mu: float) -> float:
    return sqrt(mu)


def fixed_phase_coefficients(alpha: float) -> np.ndarray:
    """B_0..B_3 of a fixed-phase coherent state of total mean photon number alpha**2."""
    x = alpha * alpha / 2
    pref = exp(-alpha * alpha / 4) / sqrt(2)
    # B_j collect the Fock amplitudes with n = j mod 4; clip guards tiny negative rounding
    vals = [cosh(x) + cos(x), sinh(x) + sin(x), cosh(x) - cos(x), sinh(x) - sin(x)]
    return pref * np.sqrt(np.clip(vals, 0.0, None))


def pds_fixed_phase_state(alpha: float, k: int) -> PureState:
    """Fixed-phase coherent state with encoding index k in the mod-4 basis."""
    if alpha < 0:
        raise ConfigError(f"amplitude must be >= 0, got {alpha}")
    if k not in (0, 1, 2, 3):
        raise ConfigError(f"encoding index must be 0..3, got {k}")
    b = fixed_phase_coefficients(alpha)
    amps = b * (1j ** k) ** np.arange(4)
    return PureState(FIXED_PHASE_LABELS, amps)


QUBIT_STATES = (
    np.array([1, 1]) / sqrt(2),
    np.array([1, 1j]) / sqrt(2),
    np.array([1, -1]) / sqrt(2),
    np.array([1, -1j]) / sqrt(2),
)


def pds_randomized_state(mu: float, k: int) -> DensityMatrix:
    """Phase-randomized Poisson state: vacuum, a BB84 qubit and a distinguishable multiphoton flag."""
    if k not in (0, 1, 2, 3):
        raise ConfigError(f"encoding index must be 0..3, got {k}")
    p0, p1, pm = poisson_coefficients(mu)
    rho = np.zeros((7, 7), dtype=complex)
    rho[0, 0] = p0
    q = QUBIT_STATES[k]
    rho[1:3, 1:3] = p1 * np.outer(q, q.conj())
    rho[3 + k, 3 + k] = pm
    return DensityMatrix(RANDOMIZED_LABELS, rho)


def describe(source: Source) -> str:
    if isinstance(source, PdsModel):
        tag = "rp" if source.phase == "randomized" else "fp"
        return f"pds-{tag}(mu={source.mu:.6g})"
    pop = source.populations
    coh = "coherent" if pop.coherent else "incoherent"
    return f"qds-{pop.pumping.lower()}-{coh}(eta={source.eta:.6g})"
