"""
qdcryptpy
=====
Provides
  1. photon-number models of quantum-dot (RE, LA, TPE) and Poisson sources
  2. key rates of BB84 without and with decoys and of twin-field QKD
  3. noise tolerance of unforgeable quantum tokens, by semidefinite programming
  4. cheating bounds of strong coin flipping against the classical bound
  5. security of bit commitment in the bounded-storage model
  6. parameter sweeps written as self-describing CSV files
  7. checks of the model against published benchmark values


How to use the documentation
----------------------------
The docstring examples assume that `qdcryptpy` has been imported as `qdc`::
  >>> import qdcryptpy as qdc
  >>> src = qdc.QdsModel(qdc.preset("tpe"), eta=0.3)
  >>> qdc.key_rate_bb84(src, distance_km=50.0, decoy="infinite").rate

Use the built-in ``help`` function to view a class's docstring::
  >>> help(qdc.SweepResult)
  ...

The same computations are reachable from the shell::
  $ qdcrypt decoy --source tpe --eta 0.3 --sweep distance 0 150 76 --out decoy.csv

Classes
-------
QdPopulations, QdsModel, PdsModel
    photon statistics of the two source families
    `from qdcryptpy import QdsModel`
ChannelParams, TwinFieldParams
    fiber, detector and phase-slicing parameters
CoinFlipConfig, BitCommitParams
    protocol settings for coin flipping and bit commitment
RunConfig
    the layered configuration behind the command line
SweepResult
    rows of a sweep with csv and json output
    `from qdcryptpy import SweepResult`

Version
-------
```
import qdcryptpy as qdc
print(qdc.version)
```
"""

from qdcryptpy._errors import QdCryptError, ConfigError, AssumptionViolation, SolverFailure
from qdcryptpy._sources import (QdPopulations, QdsModel, PdsModel, EffectiveCoefficients, PRESETS, preset,
                                populations_from_correlations, brightness_purity, effective_coefficients,
                                photon_distribution, source_efficiency)
from qdcryptpy._sdp import SdpProblem, SdpSolution, sdp_solve
from qdcryptpy._qkd import (ChannelParams, TwinFieldParams, KeyRateResult, key_rate_bb84, key_rate_twinfield,
                            optimal_pds_rate, decoy_threshold_collection)
from qdcryptpy._tokens import TokenProblem, noise_tolerance, source_tolerance, best_pds_tolerance
from qdcryptpy._coinflip import (CoinFlipConfig, CheatBounds, cheat_bounds, balance, classical_bound,
                                 balance_and_sweep, quantum_advantage_distance)
from qdcryptpy._bitcommit import (BitCommitParams, BitCommitReport, security_parameters, source_report,
                                  security_curve, best_pds_margin)
from qdcryptpy._references import advantage_report, qkd_report, token_report
from qdcryptpy._sweep import SweepResult, sweep_grid
from qdcryptpy._config import RunConfig, SweepSpec

version = "0.1.0"
