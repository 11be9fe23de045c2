#!env python3
# -*- coding: utf-8 -*-
import pytest


@pytest.fixture
def tpe():
    from qdcryptpy._sources import preset
    return preset("tpe")


@pytest.fixture
def vacuum_reading():
    from qdcryptpy._bitcommit import BitCommitParams
    return BitCommitParams(m3_reading="vacuum")


def test_l_prime():
    from qdcryptpy._bitcommit import l_prime
    lp, s = l_prime(2e-5)
    assert lp == pytest.approx(0.4954, abs=5e-4)
    assert s == pytest.approx(0.0263, abs=2e-3)


def test_delta_lambda():
    from qdcryptpy._bitcommit import delta_lambda
    delta, lam = delta_lambda(0.02, 0.007)
    assert delta == pytest.approx(0.0577, abs=2e-4)
    assert lam == pytest.approx(0.3185, abs=5e-4)


def test_delta_out_of_range():
    from qdcryptpy._bitcommit import delta_lambda
    from qdcryptpy._errors import ConfigError
    with pytest.raises(ConfigError):
        delta_lambda(0.3, 0.007)


def test_params_validated():
    from qdcryptpy._bitcommit import BitCommitParams
    from qdcryptpy._errors import ConfigError
    with pytest.raises(ConfigError):
        BitCommitParams(beta=0.02)
    with pytest.raises(ConfigError):
        BitCommitParams(epsilon=0.0)
    with pytest.raises(ConfigError):
        BitCommitParams(m3_reading="both")


def test_statistics_required():
    from qdcryptpy._bitcommit import BitCommitParams, security_parameters
    from qdcryptpy._errors import ConfigError
    with pytest.raises(ConfigError):
        security_parameters(BitCommitParams())


def test_phase_randomization_required():
    from qdcryptpy._bitcommit import BitCommitParams
    from qdcryptpy._errors import AssumptionViolation
    from qdcryptpy._sources import PdsModel, QdsModel, preset
    with pytest.raises(AssumptionViolation):
        BitCommitParams().for_source(QdsModel(preset("re"), 1.0))
    with pytest.raises(AssumptionViolation):
        BitCommitParams().for_source(PdsModel(0.3, "fixed"))


def test_quantum_dot_is_secure(tpe):
    from qdcryptpy._bitcommit import source_report
    from qdcryptpy._sources import QdsModel
    r = source_report(QdsModel(tpe, 1.0))
    assert r.m2 == pytest.approx(tpe.p1 - 3 * 0.008, abs=1e-9)
    assert r.m3 == pytest.approx(1 - tpe.p2, abs=1e-9)
    assert r.condition_margin == pytest.approx(r.m2 * r.L_prime - r.m3 * r.lam)
    assert r.secure
    assert r.N_min == max(r.M1, r.M2, r.M3, r.M4)


def test_vacuum_reading(tpe, vacuum_reading):
    from qdcryptpy._bitcommit import source_report
    from qdcryptpy._sources import QdsModel
    r = source_report(QdsModel(tpe, 1.0), vacuum_reading)
    assert r.m3 == pytest.approx(1 - tpe.p0, abs=1e-9)


def test_low_collection_is_insecure(tpe):
    from qdcryptpy._bitcommit import source_report
    from qdcryptpy._sources import QdsModel
    r = source_report(QdsModel(tpe, 0.2))
    assert not r.secure
    assert r.N_min is None


def test_distance_erodes_margin(tpe):
    from qdcryptpy._bitcommit import source_report
    from qdcryptpy._sources import QdsModel
    src = QdsModel(tpe, 1.0)
    near = source_report(src, distance_km=0.0).condition_margin
    far = source_report(src, distance_km=20.0).condition_margin
    assert far < near


def test_best_poisson_margin():
    from qdcryptpy._bitcommit import PDS_MU_BOUNDS, best_pds_margin
    margin, mu = best_pds_margin()
    assert margin < 0
    assert PDS_MU_BOUNDS[0] <= mu <= PDS_MU_BOUNDS[1]


def test_best_poisson_margin_vacuum_reading(vacuum_reading):
    from qdcryptpy._bitcommit import best_pds_margin
    margin, mu = best_pds_margin(vacuum_reading)
    assert margin == pytest.approx(0.016, abs=2e-3)
    assert mu == pytest.approx(0.357, abs=0.03)


def test_threshold_collection(tpe, vacuum_reading):
    from qdcryptpy._bitcommit import threshold_collection
    assert 0.65 < threshold_collection(tpe) < 0.75
    assert 0.14 < threshold_collection(tpe, vacuum_reading) < 0.2


def test_security_curve(tpe):
    from qdcryptpy._bitcommit import CURVE_COLUMNS, security_curve
    from qdcryptpy._sources import QdsModel
    etas = [0.3, 0.6, 0.9]
    res = security_curve([QdsModel(tpe, e) for e in etas], etas)
    assert res.columns == list(CURVE_COLUMNS)
    margins = res.column("margin")
    assert margins == sorted(margins)
    assert res.metadata["log_base"] == 2


def test_security_curve_rejects_coherent():
    from qdcryptpy._bitcommit import security_curve
    from qdcryptpy._errors import AssumptionViolation
    from qdcryptpy._sources import QdsModel, preset
    with pytest.raises(AssumptionViolation):
        security_curve([QdsModel(preset("re"), 1.0)], [1.0])


def test_configured_pulses_against_minimum(tpe):
    from qdcryptpy._bitcommit import BitCommitParams, source_report
    from qdcryptpy._errors import ConfigError
    from qdcryptpy._sources import QdsModel
    src = QdsModel(tpe, 1.0)
    enough = source_report(src, BitCommitParams(N=1e8))
    assert enough.secure and enough.N_min < 1e8
    assert enough.N_sufficient is True
    short = source_report(src, BitCommitParams(N=1000))
    assert short.secure
    assert short.N_sufficient is False
    assert source_report(src, BitCommitParams(N=None)).N_sufficient is None
    assert source_report(QdsModel(tpe, 0.2), BitCommitParams(N=1e12)).N_sufficient is None
    with pytest.raises(ConfigError):
        BitCommitParams(N=0)


def test_config_carries_pulse_count():
    from qdcryptpy._config import RunConfig
    assert RunConfig().bitcommit().N == 1e8
    assert RunConfig.from_layers({"bitcommit_N": "1e6"}).bitcommit().N == 1e6
