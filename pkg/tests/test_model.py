import numpy as np
import pytest

from gridloc import (ConfigurationError, DisturbanceScenario, FrequencyTrace,
                     GridModel, IEEE39_GENERATOR_BUSES, IEEE39_LOAD_BUSES,
                     IEEE39_LOAD_MW, build_ieee39, ieee39_load_vector)


def _chain(n, value=1.0):
    b = np.zeros((n, n))
    for i in range(n - 1):
        b[i, i + 1] = b[i + 1, i] = value
    return b


def _model(**overrides):
    base = dict(bus_count=3, generator_buses=(1,), inertia_s=(3.0,),
                rating_mva=(500.0,), damping_pu=(1.0,), droop_gain=(20.0,),
                governor_time_constant_s=(0.5,), line_susceptance_pu=_chain(3))
    base.update(overrides)
    return GridModel(**base)


def test_model_arrays_are_readonly(tiny_model):
    with pytest.raises(ValueError):
        tiny_model.inertia_s[0] = 1.0
    with pytest.raises(ValueError):
        tiny_model.line_susceptance_pu[0, 1] = 2.0


def test_generator_count(tiny_model):
    assert tiny_model.generator_count == 2


def test_rejects_nonpositive_inertia_names_generator():
    with pytest.raises(ConfigurationError, match="inertia_s.*generator 1"):
        _model(inertia_s=(0.0,))


def test_rejects_nonpositive_rating():
    with pytest.raises(ConfigurationError, match="rating_mva"):
        _model(rating_mva=(-10.0,))


def test_rejects_negative_damping():
    with pytest.raises(ConfigurationError, match="damping_pu"):
        _model(damping_pu=(-0.5,))


def test_rejects_unsorted_generator_buses():
    with pytest.raises(ConfigurationError, match="ascending"):
        _model(generator_buses=(2, 1), inertia_s=(3.0, 3.0),
               rating_mva=(500.0, 500.0), damping_pu=(1.0, 1.0),
               droop_gain=(20.0, 20.0), governor_time_constant_s=(0.5, 0.5))


def test_rejects_duplicate_generator_buses():
    with pytest.raises(ConfigurationError, match="duplicate"):
        _model(generator_buses=(1, 1), inertia_s=(3.0, 3.0),
               rating_mva=(500.0, 500.0), damping_pu=(1.0, 1.0),
               droop_gain=(20.0, 20.0), governor_time_constant_s=(0.5, 0.5))


def test_rejects_generator_bus_out_of_range():
    with pytest.raises(ConfigurationError, match="outside"):
        _model(generator_buses=(7,))


def test_rejects_asymmetric_susceptance():
    b = _chain(3)
    b[0, 1] = 2.0
    with pytest.raises(ConfigurationError, match="symmetric"):
        _model(line_susceptance_pu=b)


def test_rejects_nonzero_diagonal():
    b = _chain(3)
    b[1, 1] = 1.0
    with pytest.raises(ConfigurationError, match="diagonal"):
        _model(line_susceptance_pu=b)


def test_rejects_negative_susceptance():
    b = _chain(3)
    b[0, 1] = b[1, 0] = -1.0
    with pytest.raises(ConfigurationError, match="nonnegative"):
        _model(line_susceptance_pu=b)


def test_rejects_disconnected_graph():
    b = np.zeros((3, 3))
    b[0, 1] = b[1, 0] = 1.0   # bus 3 isolated
    with pytest.raises(ConfigurationError, match="connected"):
        _model(line_susceptance_pu=b)


def test_rejects_wrong_parameter_length():
    with pytest.raises(ConfigurationError, match="one entry per generator"):
        _model(inertia_s=(3.0, 3.0))


def test_content_hash_is_stable_and_sensitive(tiny_model):
    assert tiny_model.content_hash() == tiny_model.content_hash()
    other = GridModel(bus_count=tiny_model.bus_count,
                      generator_buses=tiny_model.generator_buses,
                      inertia_s=(3.0, 4.1),
                      rating_mva=tiny_model.rating_mva,
                      damping_pu=tiny_model.damping_pu,
                      droop_gain=tiny_model.droop_gain,
                      governor_time_constant_s=tiny_model.governor_time_constant_s,
                      line_susceptance_pu=tiny_model.line_susceptance_pu)
    assert other.content_hash() != tiny_model.content_hash()


# ---------------------------------------------------------------- scenarios

def test_scenario_label_index():
    assert DisturbanceScenario(bus=None, magnitude_mw=0.0).label_index == 0
    assert DisturbanceScenario(bus=17, magnitude_mw=250.0).label_index == 17


def test_scenario_rejects_bad_combinations():
    with pytest.raises(ConfigurationError):
        DisturbanceScenario(bus=None, magnitude_mw=5.0)
    with pytest.raises(ConfigurationError):
        DisturbanceScenario(bus=4, magnitude_mw=0.0)
    with pytest.raises(ConfigurationError):
        DisturbanceScenario(bus=0, magnitude_mw=100.0)
    with pytest.raises(ConfigurationError):
        DisturbanceScenario(bus=4, magnitude_mw=100.0, duration_s=0.0)


def test_trace_validation():
    scenario = DisturbanceScenario(bus=4, magnitude_mw=100.0)
    good = FrequencyTrace(scenario=scenario, sample_period_s=0.005,
                          samples_hz=np.full((2, 5), 60.0),
                          pre_onset_frequency_hz=np.full(2, 60.0))
    assert good.generator_count == 2 and good.sample_count == 5
    with pytest.raises(ConfigurationError, match="non-finite"):
        FrequencyTrace(scenario=scenario, sample_period_s=0.005,
                       samples_hz=np.array([[60.0, np.nan]]),
                       pre_onset_frequency_hz=np.array([60.0]))
    with pytest.raises(ConfigurationError):
        FrequencyTrace(scenario=scenario, sample_period_s=0.0,
                       samples_hz=np.full((2, 5), 60.0),
                       pre_onset_frequency_hz=np.full(2, 60.0))


# ------------------------------------------------------------- 39-bus data

def test_ieee39_shape():
    m = build_ieee39()
    assert m.bus_count == 39
    assert m.generator_buses == IEEE39_GENERATOR_BUSES
    assert m.generator_count == 10
    # susceptance is 1/x of each published branch; spot-check one
    assert m.line_susceptance_pu[0, 1] == pytest.approx(1.0 / 0.0411)
    assert np.count_nonzero(np.triu(m.line_susceptance_pu)) == 46


def test_ieee39_load_table():
    assert len(IEEE39_LOAD_BUSES) == 21
    assert IEEE39_LOAD_BUSES == tuple(sorted(IEEE39_LOAD_MW))
    loads = ieee39_load_vector()
    assert loads.shape == (39,)
    assert loads.sum() == pytest.approx(sum(IEEE39_LOAD_MW.values()))
    assert loads[38] == 1104.0
    assert loads[1] == 0.0   # bus 2 carries no load


def test_ieee39_overrides():
    m = build_ieee39(damping_pu=2.0, inertia_s={3: 9.9})
    assert np.all(m.damping_pu == 2.0)
    assert m.inertia_s[2] == 9.9
    assert m.inertia_s[0] == 4.20
    with pytest.raises(ConfigurationError, match="unknown generator"):
        build_ieee39(inertia_s={11: 3.0})
    with pytest.raises(ConfigurationError, match="override"):
        build_ieee39(droop_gain=(20.0, 20.0))


def test_ieee39_default_hash_stable():
    assert build_ieee39().content_hash() == build_ieee39().content_hash()
