# -*- coding: utf-8 -*-
"""
Run configuration: flat ``key = value`` files and command-line overrides.

Precedence is command line, then file, then the defaults below.
"""
import logging
from dataclasses import dataclass, fields, replace
from typing import Any, Dict, List, Optional, Tuple

from qdcryptpy._bitcommit import BitCommitParams, M3_READINGS
from qdcryptpy._coinflip import BOUND_FORMS, DEFAULT_BOUND_FORM
from qdcryptpy._errors import ConfigError
from qdcryptpy._qkd import ChannelParams, TwinFieldParams
from qdcryptpy._sources import PdsModel, QdPopulations, QdsModel, Source, preset
from qdcryptpy._sweep import sweep_grid

logger = logging.getLogger(__name__)

PRIMITIVES = ("bb84", "decoy", "twinfield", "tokens", "coinflip", "bitcommit")
SWEEP_VARIABLES = ("eta", "mu", "distance", "y", "N", "P_ab", "gamma", "epsilon")
COINFLIP_ERROR = 0.015
BITCOMMIT_ERROR = 0.02
_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off")


def _bool(v: str) -> bool:
    s = str(v).strip().lower()
    if s in _TRUE:
        return True
    if s in _FALSE:
        return False
    raise ConfigError(f"expected a boolean, got {v!r}")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    lo: float
    hi: float
    steps: int

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"unknown sweep variable {self.variable!r}; known: {SWEEP_VARIABLES}")
        if self.steps < 2:
            raise ConfigError(f"a sweep needs at least 2 steps, got {self.steps}")
        if not self.hi > self.lo:
            raise ConfigError(f"sweep maximum {self.hi} must exceed minimum {self.lo}")

    @classmethod
    def parse(cls, text) -> "SweepSpec":
        parts = text.split() if isinstance(text, str) else list(text)
        if len(parts) != 4:
            raise ConfigError(f"sweep must be 'VAR MIN MAX STEPS', got {text!r}")
        try:
            return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"malformed sweep {text!r}: {e}") from e

    def __str__(self):
        return f"{self.variable} {self.lo!r} {self.hi!r} {self.steps}"


@dataclass
class RunConfig:
    primitive: str = "decoy"
    source: str = "tpe"
    p0: Optional[float] = None
    p1: Optional[float] = None
    p2: Optional[float] = None
    p3: Optional[float] = None
    coherent: Optional[bool] = None
    eta: float = 1.0
    mu: float = 0.1
    distance: float = 0.0
    eta_d: float = 1.0
    Y0: float = 1e-9
    loss_db_per_km: float = 0.21
    e_d: float = 0.02
    e0: float = 0.5
    f: float = 1.2
    tf_m: int = 16
    tf_d: float = 1.0
    tf_e_s: float = 0.01275
    y: float = 0.9
    N: int = 1000
    e: Optional[float] = None
    P_ab: Optional[float] = None
    epsilon: float = 2e-5
    beta: float = 0.007
    gamma: float = 0.008
    S: int = 972
    bitcommit_N: float = 1e8
    m3_reading: str = "multiphoton"
    z_dark_counts: bool = True
    classical_bound_form: str = DEFAULT_BOUND_FORM
    sweep: Optional[SweepSpec] = None
    out: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        if self.primitive not in PRIMITIVES:
            raise ConfigError(f"primitive must be one of {PRIMITIVES}, got {self.primitive!r}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.m3_reading not in M3_READINGS:
            raise ConfigError(f"m3_reading must be one of {M3_READINGS}, got {self.m3_reading!r}")
        if self.classical_bound_form not in BOUND_FORMS:
            raise ConfigError(f"classical_bound_form must be one of {BOUND_FORMS}, "
                              f"got {self.classical_bound_form!r}")
        if isinstance(self.sweep, (str, list, tuple)):
            self.sweep = SweepSpec.parse(self.sweep)

    @classmethod
    def keys(cls) -> List[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_layers(cls, file_values: Optional[Dict[str, str]] = None,
                    cli_values: Optional[Dict[str, Any]] = None) -> "RunConfig":
        """Defaults, overlaid by file values, overlaid by command-line values."""
        merged: Dict[str, Any] = {}
        for layer in (file_values or {}, cli_values or {}):
            for k, v in layer.items():
                if v is not None:
                    merged[k] = v
        return cls(**{k: _coerce(k, v) for k, v in merged.items()})

    def channel(self) -> ChannelParams:
        return ChannelParams(eta_d=self.eta_d, Y0=self.Y0, loss_db_per_km=self.loss_db_per_km,
                             e_d=self.e_d, e0=self.e0, f=self.f)

    def twinfield(self) -> TwinFieldParams:
        return TwinFieldParams(m=self.tf_m, d=self.tf_d, e_s=self.tf_e_s)

    def bitcommit(self) -> BitCommitParams:
        return BitCommitParams(epsilon=self.epsilon, beta=self.beta, gamma=self.gamma, S=self.S,
                               e=BITCOMMIT_ERROR if self.e is None else self.e, N=self.bitcommit_N,
                               m3_reading=self.m3_reading)

    def coinflip_error(self) -> float:
        return COINFLIP_ERROR if self.e is None else self.e

    def populations(self) -> QdPopulations:
        name = self.source.lower()
        if name == "custom":
            ps = (self.p0, self.p1, self.p2, self.p3)
            if any(p is None for p in ps):
                raise ConfigError("a custom source needs p0, p1, p2 and p3")
            coherent = bool(self.coherent)
            return QdPopulations(*ps, pumping="RE" if coherent else "LA", coherent=coherent)
        if name.startswith("pds"):
            raise ConfigError(f"source {self.source!r} is not a quantum dot")
        pop = preset(name)
        if name.endswith("-incoherent"):
            pop = replace(pop, coherent=False)
        elif name.endswith("-coherent"):
            pop = replace(pop, coherent=True)
        if self.coherent is not None:
            pop = replace(pop, coherent=self.coherent)
        return pop

    def is_pds(self) -> bool:
        return self.source.lower().startswith("pds")

    def pds_phase(self) -> str:
        return "fixed" if self.source.lower() in ("pds-fixed", "pds-fp") else "randomized"

    def source_model(self, eta: Optional[float] = None, mu: Optional[float] = None) -> Source:
        if self.is_pds():
            return PdsModel(self.mu if mu is None else mu, self.pds_phase())
        return QdsModel(self.populations(), self.eta if eta is None else eta)

    def echo(self) -> Dict[str, Any]:
        """The effective settings, for result metadata."""
        out = {}
        for k in self.keys():
            v = getattr(self, k)
            if v is not None:
                out[k] = str(v) if isinstance(v, SweepSpec) else v
        return out


_FLOATS = {"p0", "p1", "p2", "p3", "eta", "mu", "distance", "eta_d", "Y0", "loss_db_per_km", "e_d", "e0", "f",
           "tf_d", "tf_e_s", "y", "e", "P_ab", "epsilon", "beta", "gamma", "bitcommit_N"}
_INTS = {"tf_m", "N", "S", "workers"}
_BOOLS = {"coherent", "z_dark_counts"}


def _coerce(key: str, value: Any) -> Any:
    if key not in RunConfig.keys():
        raise ConfigError(f"unknown configuration key {key!r}")
    if not isinstance(value, str):
        return value
    try:
        if key in _FLOATS:
            return float(value)
        if key in _INTS:
            return int(float(value))
    except ValueError as e:
        raise ConfigError(f"{key}: cannot read {value!r} as a number") from e
    if key in _BOOLS:
        return _bool(value)
    if key == "sweep":
        return SweepSpec.parse(value)
    return value.strip()


def parse_config_text(text: str, origin: str = "<string>") -> Dict[str, str]:
    """
    ``key = value`` lines; ``#`` starts a comment, blank lines are skipped.

    :raises ConfigError: a malformed line or an unknown key
    """
    values: Dict[str, str] = {}
    known = set(RunConfig.keys())
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{origin}:{lineno}: unknown configuration key {key!r}")
        values[key] = value
    return values


def load_config_file(path: str) -> Dict[str, str]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    values = parse_config_text(text, path)
    logger.info("loaded %d settings from %s", len(values), path)
    return values


def split_sweep(spec: SweepSpec) -> Tuple[str, List[float]]:
    return spec.variable, sweep_grid(spec.lo, spec.hi, spec.steps)
