import numpy as np
import pytest

from gridloc import (ConfigurationError, DisturbanceScenario, FeatureConfig,
                     FeatureVector, FrequencyTrace, add_noise, canonical_mask,
                     extract, feature_length, featurize_arrays,
                     featurize_dataset, generate_dataset, simulate,
                     stack_features, trace_noise_seed)


def _trace(samples_hz, period=0.005, bus=3, mw=100.0):
    samples_hz = np.asarray(samples_hz, dtype=float)
    scenario = (DisturbanceScenario(bus=bus, magnitude_mw=mw) if bus
                else DisturbanceScenario(bus=None, magnitude_mw=0.0))
    return FrequencyTrace(scenario=scenario, sample_period_s=period,
                          samples_hz=samples_hz,
                          pre_onset_frequency_hz=samples_hz[:, 0])


def test_config_validation():
    with pytest.raises(ConfigurationError):
        FeatureConfig(sampling_window=0)
    with pytest.raises(ConfigurationError, match="averaging_window"):
        FeatureConfig(sampling_window=5, averaging_window=6)
    with pytest.raises(ConfigurationError):
        FeatureConfig(sampling_window=5, noise_sigma_hz=-1.0)
    assert FeatureConfig(sampling_window=200, averaging_window=100).block_length == 101


def test_feature_length_formula_over_swept_configs():
    # L = (W_s - W_a + 1) * N_observed + 1 for every combination we sweep
    for ws in (1, 2, 5, 50, 200):
        for wa in (1, 10, 50, 100):
            if wa > ws:
                continue
            config = FeatureConfig(sampling_window=ws, averaging_window=wa)
            for n in (1, 2, 10):
                for missing in range(n):
                    expected = (ws - wa + 1) * (n - missing) + 1
                    assert feature_length(config, n, missing) == expected


def test_hand_mean_filter_example():
    """Two generators, W_s=3, W_a=2, deviations (-1,-2,-3) and (-2,-4,-6).

    Window means are (-1.5, -2.5) and (-3, -5); trailing intercept 1.
    """
    base = 60.0
    samples = np.array([
        [base, base - 1.0, base - 2.0, base - 3.0],
        [base, base - 2.0, base - 4.0, base - 6.0],
    ])
    vector = extract(_trace(samples), FeatureConfig(sampling_window=3, averaging_window=2))
    assert np.allclose(vector.values, [-1.5, -2.5, -3.0, -5.0, 1.0])


def test_wa_one_reproduces_raw_deviations():
    rng = np.random.default_rng(4)
    samples = 60.0 + rng.normal(0.0, 0.01, size=(3, 9))
    vector = extract(_trace(samples), FeatureConfig(sampling_window=8))
    expected = (samples[:, 1:9] - samples[:, :1]).ravel()
    assert np.allclose(vector.values[:-1], expected)
    assert vector.values[-1] == 1.0


def test_wa_equals_ws_single_mean():
    samples = np.array([[60.0, 59.0, 58.0, 57.0]])
    vector = extract(_trace(samples), FeatureConfig(sampling_window=3, averaging_window=3))
    assert np.allclose(vector.values, [-2.0, 1.0])


def test_constant_trace_gives_zero_features():
    vector = extract(_trace(np.full((2, 6), 60.0), bus=None),
                     FeatureConfig(sampling_window=5, averaging_window=2))
    assert np.all(vector.values[:-1] == 0.0)
    assert vector.values[-1] == 1.0


def test_linearity_and_shift_invariance():
    rng = np.random.default_rng(11)
    deviations = rng.normal(0.0, 0.02, size=(2, 7))
    deviations[:, 0] = 0.0
    config = FeatureConfig(sampling_window=6, averaging_window=3)
    base = extract(_trace(60.0 + deviations), config).values

    scaled = extract(_trace(60.0 + 4.0 * deviations), config).values
    assert np.allclose(scaled[:-1], 4.0 * base[:-1])
    assert scaled[-1] == 1.0

    # per-generator constant offsets cancel in the deviation
    shifted = extract(_trace(60.0 + deviations + np.array([[0.3], [-0.2]])), config).values
    assert np.allclose(shifted, base)


def test_extract_too_short_trace_reports_requirement():
    with pytest.raises(ValueError, match="sampling_window 10 needs 11"):
        extract(_trace(np.full((2, 6), 60.0)), FeatureConfig(sampling_window=10))


def test_extract_missing_mask():
    samples = np.array([
        [60.0, 59.5, 59.0],
        [60.0, 59.8, 59.6],
        [60.0, 59.9, 59.8],
    ])
    config = FeatureConfig(sampling_window=2)
    full = extract(_trace(samples), config)
    partial = extract(_trace(samples), config, missing=(2,))
    assert len(partial.values) == 2 * 2 + 1
    # generators 1 and 3 survive, in ascending order
    assert np.allclose(partial.values[:-1], np.concatenate([full.values[0:2],
                                                            full.values[4:6]]))
    assert partial.missing_mask == (2,)

    with pytest.raises(ConfigurationError, match="beyond"):
        extract(_trace(samples), config, missing=(7,))
    with pytest.raises(ConfigurationError, match="every generator"):
        extract(_trace(samples), config, missing=(1, 2, 3))


def test_canonical_mask():
    assert canonical_mask((3, 1, 3)) == (1, 3)
    assert canonical_mask([]) == ()
    with pytest.raises(ConfigurationError):
        canonical_mask((0,))


def test_feature_vector_validation():
    config = FeatureConfig(sampling_window=2)
    with pytest.raises(ConfigurationError, match="intercept"):
        FeatureVector(values=np.array([1.0, 2.0, 3.0]), config=config)
    with pytest.raises(ConfigurationError, match="inconsistent"):
        FeatureVector(values=np.array([0.0, 0.0, 0.0, 1.0]), config=config)


# ------------------------------------------------------------------- noise

def test_add_noise_zero_sigma_is_identity(tiny_model):
    trace = simulate(tiny_model, DisturbanceScenario(bus=3, magnitude_mw=50.0,
                                                     duration_s=0.5))
    assert add_noise(trace, 0.0, 1) is trace


def test_add_noise_statistics():
    # empirical std over 10^5 samples must sit within 2% of sigma
    trace = _trace(np.full((100, 1000), 60.0), bus=None)
    noisy = add_noise(trace, 5e-3, 12345)
    residual = noisy.samples_hz - 60.0
    assert 4.9e-3 < residual.std() < 5.1e-3
    assert abs(residual.mean()) < 1e-4


def test_add_noise_seeded_and_distinct():
    trace = _trace(np.full((2, 50), 60.0), bus=None)
    a = add_noise(trace, 1e-3, 7)
    b = add_noise(trace, 1e-3, 7)
    c = add_noise(trace, 1e-3, 8)
    assert np.array_equal(a.samples_hz, b.samples_hz)
    assert not np.array_equal(a.samples_hz, c.samples_hz)


def test_filtered_noise_variance_tracks_window():
    # deviation = noise(t_k) - noise(t_0); the mean filter averages the first
    # term only, so the variance of a coordinate is sigma^2 * (1 + 1/W_a)
    sigma = 5e-3
    for wa in (1, 4, 16):
        config = FeatureConfig(sampling_window=16, averaging_window=wa)
        coords = []
        for seed in range(400):
            trace = add_noise(_trace(np.full((1, 17), 60.0), bus=None), sigma, seed)
            coords.append(extract(trace, config).values[0])
        observed = np.var(coords)
        expected = sigma ** 2 * (1.0 + 1.0 / wa)
        assert abs(observed - expected) < 0.25 * expected, f"wa={wa}"


def test_window_prefix_consistency():
    # the same trace featurized at a smaller W_s must see the identical
    # noise prefix, coordinate for coordinate
    samples = np.tile(np.linspace(60.0, 59.0, 21), (2, 1))
    trace = _trace(samples)
    seed = trace_noise_seed(17, 11, 0)
    noisy = add_noise(trace, 1e-3, seed)
    long = extract(noisy, FeatureConfig(sampling_window=20))
    short = extract(noisy, FeatureConfig(sampling_window=5))
    assert np.allclose(short.values[:5], long.values[:5])
    assert np.allclose(short.values[5:10], long.values[20:25])


# ----------------------------------------------------------------- datasets

def test_featurize_dataset_round_trip(tiny_model):
    ds = generate_dataset(tiny_model, (3, 4), [80.0, 160.0], seed=3,
                          no_disturbance_count=1, duration_s=0.5)
    config = FeatureConfig(sampling_window=10, averaging_window=2,
                           noise_sigma_hz=1e-3, rng_seed=17)
    samples = featurize_dataset(ds, config)
    assert len(samples) == 5
    assert [s.label_index for s in samples] == [3, 3, 4, 4, 0]
    assert samples[0].magnitude_mw == 80.0
    assert all(len(s.features.values) == feature_length(config, 2) for s in samples)

    again = featurize_dataset(ds, config)
    for a, b in zip(samples, again):
        assert np.array_equal(a.features.values, b.features.values)

    x, y, z = featurize_arrays(ds, config)
    assert x.shape == (5, feature_length(config, 2))
    assert np.array_equal(y, [3, 3, 4, 4, 0])
    for sample, row in zip(samples, x):
        assert np.array_equal(sample.features.values, row)


def test_noise_streams_differ_across_traces_and_datasets(tiny_model):
    config = FeatureConfig(sampling_window=10, noise_sigma_hz=1e-3, rng_seed=17)
    ds_a = generate_dataset(tiny_model, (3,), [80.0, 80.0], seed=3, duration_s=0.5)
    x, _, _ = featurize_arrays(ds_a, config)
    assert not np.allclose(x[0], x[1])   # same scenario, different trace noise

    ds_b = generate_dataset(tiny_model, (3,), [80.0, 80.0], seed=4, duration_s=0.5)
    x_b, _, _ = featurize_arrays(ds_b, config)
    assert not np.allclose(x[0], x_b[0])  # same index, different dataset seed


def test_featurize_errors_carry_scenario_index(tiny_model):
    ds = generate_dataset(tiny_model, (3,), [80.0], seed=3, duration_s=0.5)
    with pytest.raises(ValueError, match="scenario 0:"):
        featurize_dataset(ds, FeatureConfig(sampling_window=500))


def test_stack_features_rejects_mixed_configs(tiny_model):
    ds = generate_dataset(tiny_model, (3,), [80.0, 90.0], seed=3, duration_s=0.5)
    a = featurize_dataset(ds, FeatureConfig(sampling_window=5))
    b = featurize_dataset(ds, FeatureConfig(sampling_window=6))
    with pytest.raises(ValueError, match="mix"):
        stack_features([a[0], b[0]])
    x, y, z = stack_features(a)
    assert x.shape[0] == 2 and len(y) == 2 and len(z) == 2
    with pytest.raises(ValueError):
        stack_features([])
