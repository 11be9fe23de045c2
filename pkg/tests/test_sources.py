#!env python3
# -*- coding: utf-8 -*-
import numpy as np
import pytest

TABLE = {"re": (0.9366, 0.9903), "la": (0.8399, 0.9785), "tpe": (0.9526, 0.9988)}


@pytest.mark.parametrize("name", sorted(TABLE))
def test_preset_brightness_purity(name):
    from qdcryptpy._sources import brightness_purity, preset
    b, p = brightness_purity(preset(name))
    assert b == pytest.approx(TABLE[name][0], abs=5e-4)
    assert p == pytest.approx(TABLE[name][1], abs=5e-4)


def test_preset_from_measured_correlations():
    from qdcryptpy._sources import PRESETS, populations_from_correlations
    re = PRESETS["re"]
    assert re.brightness_tilde == pytest.approx(0.9457, abs=1e-4)
    pop = populations_from_correlations(re.brightness_tilde, re.P2, re.P3, "RE")
    assert pop.coherent
    assert pop.p1 == pytest.approx(re.populations.p1, abs=1e-12)
    assert pop.p2 == pytest.approx(re.populations.p2, abs=1e-12)


def test_inconsistent_correlations():
    from qdcryptpy._errors import ConfigError
    from qdcryptpy._sources import populations_from_correlations
    with pytest.raises(ConfigError):
        populations_from_correlations(0.1, 0.2, 0.0)


def test_unknown_preset():
    from qdcryptpy._errors import ConfigError
    from qdcryptpy._sources import preset
    with pytest.raises(ConfigError):
        preset("laser")


def test_tpe_has_no_three_photon_term():
    from qdcryptpy._errors import ConfigError
    from qdcryptpy._sources import QdPopulations
    with pytest.raises(ConfigError):
        QdPopulations(0.0, 0.9, 0.05, 0.05, "TPE")


def test_thinning_keeps_normalization():
    from qdcryptpy._sources import preset, thinned_distribution
    d = thinned_distribution(preset("la"), 0.37)
    assert d.sum() == pytest.approx(1.0)
    assert d[1] > d[2] > d[3]


def test_source_efficiency():
    from qdcryptpy._sources import PdsModel, QdsModel, preset, source_efficiency
    assert source_efficiency(PdsModel(0.5)) == pytest.approx(1 - np.exp(-0.5))
    assert source_efficiency(QdsModel(preset("tpe"), 1.0)) == pytest.approx(0.9526, abs=1e-4)
    assert source_efficiency(QdsModel(preset("tpe"), 0.0)) == 0.0


def test_effective_coefficients_poisson():
    from qdcryptpy._sources import PdsModel, effective_coefficients
    c = effective_coefficients(PdsModel(0.4), 0.5)
    assert c.P0 == pytest.approx(np.exp(-0.2))
    assert c.P1 == pytest.approx(0.2 * np.exp(-0.2))
    assert sum(c.as_tuple()) == pytest.approx(1.0)


def test_fixed_phase_state_normalized():
    from qdcryptpy._sources import alpha_from_mu, pds_fixed_phase_state
    psi = pds_fixed_phase_state(alpha_from_mu(0.6), 1)
    assert np.sum(np.abs(psi.amplitudes) ** 2) == pytest.approx(1.0)


def test_randomized_state_flags_multiphoton():
    from qdcryptpy._sources import pds_randomized_state
    rho = pds_randomized_state(0.3, 2)
    assert np.real(np.trace(rho.matrix)) == pytest.approx(1.0)
    assert np.real(rho.matrix[5, 5]) == pytest.approx(1 - np.exp(-0.3) * 1.3)


def test_describe():
    from qdcryptpy._sources import PdsModel, QdsModel, describe, preset
    assert describe(PdsModel(0.1, "fixed")) == "pds-fp(mu=0.1)"
    assert describe(QdsModel(preset("re"), 0.5)) == "qds-re-coherent(eta=0.5)"


def test_poisson_coefficients():
    from qdcryptpy._errors import ConfigError
    from qdcryptpy._sources import poisson_coefficients
    assert poisson_coefficients(0.0) == pytest.approx((1.0, 0.0, 0.0))
    p0, p1, pm = poisson_coefficients(0.5)
    assert p0 == pytest.approx(np.exp(-0.5))
    assert p1 == pytest.approx(0.5 * np.exp(-0.5))
    assert p0 + p1 + pm == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        poisson_coefficients(-0.1)


def test_qds_effective_coefficients_lose_photons_to_vacuum():
    from qdcryptpy._sources import preset, qds_effective_coefficients
    full = qds_effective_coefficients(preset("tpe"), 1.0)
    half = qds_effective_coefficients(preset("tpe"), 0.5)
    assert sum(full.as_tuple()) == pytest.approx(1.0)
    assert sum(half.as_tuple()) == pytest.approx(1.0)
    assert half.P0 > full.P0
    assert half.P_multi < full.P_multi
