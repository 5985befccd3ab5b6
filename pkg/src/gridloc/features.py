"""Feature extraction from sampled frequency traces.

A feature vector is the concatenation, over observed generators in ascending
id order, of mean-filtered frequency deviations over the first W_s samples
after onset, plus a trailing intercept coordinate fixed at 1. Deviations are
taken against the onset sample t_0 and kept in Hz. With averaging window W_a
each generator contributes W_s - W_a + 1 coordinates, so the full length is
(W_s - W_a + 1) * N_observed + 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .model import ConfigurationError, FrequencyTrace
from .simulate import TraceDataset


@dataclass(frozen=True)
class FeatureConfig:
    sampling_window: int        # W_s, samples after onset entering the features
    averaging_window: int = 1   # W_a, mean filter width; 1 = raw deviations
    noise_sigma_hz: float = 0.0  # measurement noise applied at featurization
    rng_seed: int = 0

    def __post_init__(self):
        if self.sampling_window < 1:
            raise ConfigurationError("sampling_window must be at least 1")
        if not 1 <= self.averaging_window <= self.sampling_window:
            raise ConfigurationError(
                "averaging_window must lie in 1..sampling_window, got "
                f"{self.averaging_window} with sampling_window {self.sampling_window}")
        if self.noise_sigma_hz < 0.0:
            raise ConfigurationError("noise_sigma_hz must be nonnegative")

    @property
    def block_length(self) -> int:
        return self.sampling_window - self.averaging_window + 1


def canonical_mask(excluded) -> tuple[int, ...]:
    """Sorted, duplicate-free tuple of excluded generator ids."""
    mask = tuple(sorted(set(int(g) for g in excluded)))
    if any(g < 1 for g in mask):
        raise ConfigurationError(f"generator ids must be positive, got {mask}")
    return mask


def feature_length(config: FeatureConfig, generator_count: int,
                   missing: int = 0) -> int:
    return config.block_length * (generator_count - missing) + 1


@dataclass(frozen=True)
class FeatureVector:
    values: NDArray
    config: FeatureConfig
    missing_mask: tuple[int, ...] = ()

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.ndim != 1 or values[-1] != 1.0:
            raise ConfigurationError("feature vector must be 1-D with trailing intercept 1")
        if (len(values) - 1) % self.config.block_length != 0:
            raise ConfigurationError("feature length inconsistent with the window sizes")


@dataclass(frozen=True)
class LabeledSample:
    features: FeatureVector
    label_index: int      # disturbed bus id, 0 for no disturbance
    magnitude_mw: float


def add_noise(trace: FrequencyTrace, sigma_hz: float, seed) -> FrequencyTrace:
    """Independent Gaussian measurement noise on every stored sample.

    The whole trace is noised in one draw so that any sampling-window prefix
    of the same trace and seed sees identical noise.
    """
    if sigma_hz < 0.0:
        raise ConfigurationError("sigma_hz must be nonnegative")
    if sigma_hz == 0.0:
        return trace
    rng = np.random.default_rng(seed)
    noisy = trace.samples_hz + sigma_hz * rng.standard_normal(trace.samples_hz.shape)
    return FrequencyTrace(scenario=trace.scenario,
                          sample_period_s=trace.sample_period_s,
                          samples_hz=noisy,
                          pre_onset_frequency_hz=trace.pre_onset_frequency_hz)


def extract(trace: FrequencyTrace, config: FeatureConfig,
            missing=()) -> FeatureVector:
    """Featurize one trace; ``missing`` lists excluded generator ids."""
    mask = canonical_mask(missing)
    n = trace.generator_count
    if any(g > n for g in mask):
        raise ConfigurationError(f"missing mask {mask} names a generator beyond {n}")
    if len(mask) >= n:
        raise ConfigurationError("missing mask excludes every generator")
    if trace.sample_count < config.sampling_window + 1:
        raise ValueError(
            f"trace has {trace.sample_count} samples but sampling_window "
            f"{config.sampling_window} needs {config.sampling_window + 1}")

    observed = [g - 1 for g in range(1, n + 1) if g not in mask]
    window = trace.samples_hz[observed, 1:config.sampling_window + 1]
    deviations = window - trace.samples_hz[observed, 0][:, None]
    if config.averaging_window == 1:
        filtered = deviations
    else:
        filtered = np.lib.stride_tricks.sliding_window_view(
            deviations, config.averaging_window, axis=1).mean(axis=2)
    values = np.concatenate([filtered.ravel(), [1.0]])
    return FeatureVector(values=values, config=config, missing_mask=mask)


def trace_noise_seed(rng_seed: int, dataset_seed: int,
                     index: int) -> np.random.SeedSequence:
    """Noise stream identity of one trace within one dataset."""
    return np.random.SeedSequence((rng_seed, dataset_seed, index))


def _featurized_traces(dataset: TraceDataset, config: FeatureConfig, mask):
    for index, trace in enumerate(dataset.traces):
        if config.noise_sigma_hz > 0.0:
            seed = trace_noise_seed(config.rng_seed, dataset.seed, index)
            trace = add_noise(trace, config.noise_sigma_hz, seed)
        try:
            yield trace, extract(trace, config, mask)
        except (ValueError, ConfigurationError) as exc:
            raise type(exc)(f"scenario {index}: {exc}") from exc


def featurize_dataset(dataset: TraceDataset, config: FeatureConfig,
                      missing=()) -> list[LabeledSample]:
    """Apply noise and extraction to every trace of a dataset.

    Per-trace noise streams are seeded from (config.rng_seed, dataset.seed,
    trace index), so repeated calls reproduce byte-identical features and
    different datasets never share noise.
    """
    mask = canonical_mask(missing)
    return [LabeledSample(features=features,
                          label_index=trace.scenario.label_index,
                          magnitude_mw=trace.scenario.magnitude_mw)
            for trace, features in _featurized_traces(dataset, config, mask)]


def featurize_arrays(dataset: TraceDataset, config: FeatureConfig,
                     missing=()) -> tuple[NDArray, NDArray, NDArray]:
    """featurize_dataset already stacked into (features, labels, magnitudes)."""
    mask = canonical_mask(missing)
    rows, labels, magnitudes = [], [], []
    for trace, features in _featurized_traces(dataset, config, mask):
        rows.append(features.values)
        labels.append(trace.scenario.label_index)
        magnitudes.append(trace.scenario.magnitude_mw)
    if not rows:
        raise ValueError("dataset is empty")
    return np.vstack(rows), np.array(labels, dtype=int), np.array(magnitudes)


def stack_features(samples) -> tuple[NDArray, NDArray, NDArray]:
    """Stack labeled samples into (features, labels, magnitudes) arrays.

    All samples must share one feature config and missing mask.
    """
    if not samples:
        raise ValueError("no samples to stack")
    config = samples[0].features.config
    mask = samples[0].features.missing_mask
    for s in samples:
        if s.features.config != config or s.features.missing_mask != mask:
            raise ValueError("samples mix feature configs or missing masks")
    features = np.vstack([s.features.values for s in samples])
    labels = np.array([s.label_index for s in samples], dtype=int)
    magnitudes = np.array([s.magnitude_mw for s in samples])
    return features, labels, magnitudes
