"""Per-bus linear magnitude regression and the inertial baseline.

For each disturbed bus a coefficient vector alpha minimizes
0.5 * sum_j (z_j - alpha . x_j)^2 over that bus's training samples. The
normal equations are solved directly while A'A is comfortably invertible
(condition below 1e12, measured from the singular values of A); otherwise
plain gradient descent from the zero vector takes over, which converges to
the minimum-norm least-squares solution in the directions the data spans.

The model-light baseline reads the injected power off the initial rate of
frequency change: dP = -sum_i (2 H_i S_i / f_n) * slope_i, with per-generator
slopes from a least-squares line over the first samples after onset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .features import FeatureConfig, FeatureVector, stack_features
from .model import FrequencyTrace, GridModel


@dataclass(frozen=True)
class MagnitudeSettings:
    condition_limit: float = 1e12   # normal-equation conditioning cutoff
    tolerance: float = 1e-10        # gradient max-norm stop
    max_iterations: int = 2000
    armijo_c: float = 1e-4
    ridge: float = 0.0              # optional L2 term on alpha


@dataclass(frozen=True)
class LinearModelBank:
    """Coefficient vectors keyed by (bus, missing mask)."""

    models: dict[tuple[int, tuple[int, ...]], NDArray]
    feature_config: FeatureConfig

    def buses(self, mask: tuple[int, ...] = ()) -> tuple[int, ...]:
        return tuple(sorted(bus for bus, m in self.models if m == mask))


def _gradient_descent(features: NDArray, targets: NDArray,
                      settings: MagnitudeSettings) -> NDArray:
    alpha = np.zeros(features.shape[1])
    residual = -targets.astype(float)
    value = 0.5 * float(residual @ residual)
    step = 1.0
    for _ in range(settings.max_iterations):
        gradient = features.T @ residual + settings.ridge * alpha
        if float(np.abs(gradient).max()) <= settings.tolerance:
            break
        decrease = settings.armijo_c * float(gradient @ gradient)
        step = 2.0 * step
        while True:
            candidate = alpha - step * gradient
            candidate_residual = features @ candidate - targets
            trial = 0.5 * float(candidate_residual @ candidate_residual) \
                + 0.5 * settings.ridge * float(candidate @ candidate)
            if np.isfinite(trial) and trial <= value - step * decrease:
                break
            step *= 0.5
            if step < 1e-30:
                return alpha   # no descent direction left at this precision
        if np.array_equal(candidate, alpha):
            break              # step underflowed: nothing representable left
        alpha = candidate
        residual = candidate_residual
        value = trial
    return alpha


def fit_magnitude(features: NDArray, magnitudes: NDArray,
                  method: str = "closed-form",
                  settings: MagnitudeSettings = MagnitudeSettings()) -> NDArray:
    """Array-level fit of one coefficient vector."""
    if method not in ("closed-form", "gradient"):
        raise ValueError(f"unknown method {method!r}")
    if features.shape[0] < 1:
        raise ValueError("no samples to fit")
    if method == "closed-form":
        singular = np.linalg.svd(features, compute_uv=False)
        well_posed = (features.shape[0] >= features.shape[1]
                      and singular[-1] > 0.0
                      and (singular[0] / singular[-1]) ** 2 <= settings.condition_limit)
        if well_posed:
            gram = features.T @ features
            if settings.ridge > 0.0:
                gram = gram + settings.ridge * np.eye(gram.shape[0])
            return np.linalg.solve(gram, features.T @ magnitudes)
    return _gradient_descent(features, magnitudes, settings)


def train_magnitude(samples, method: str = "closed-form",
                    settings: MagnitudeSettings = MagnitudeSettings()) -> NDArray:
    """Fit one bus's coefficient vector from its labeled samples.

    method "closed-form" solves the normal equations, falling back to
    gradient descent when the design matrix is rank deficient or A'A is
    conditioned worse than settings.condition_limit; "gradient" forces the
    descent path.
    """
    features, labels, magnitudes = stack_features(samples)
    if len(set(labels.tolist())) != 1:
        raise ValueError("magnitude training mixes labels; fit one bus at a time")
    if labels[0] == 0:
        raise ValueError("cannot fit a magnitude model to no-disturbance samples")
    return fit_magnitude(features, magnitudes, method, settings)


def train_bank(samples, method: str = "closed-form",
               settings: MagnitudeSettings = MagnitudeSettings()) -> LinearModelBank:
    """Group samples by disturbed bus and fit one model per bus."""
    by_bus: dict[int, list] = {}
    for s in samples:
        if s.label_index != 0:
            by_bus.setdefault(s.label_index, []).append(s)
    if not by_bus:
        raise ValueError("no disturbance samples to fit")
    mask = samples[0].features.missing_mask
    models = {(bus, mask): train_magnitude(group, method, settings)
              for bus, group in sorted(by_bus.items())}
    return LinearModelBank(models=models, feature_config=samples[0].features.config)


def merge_banks(banks) -> LinearModelBank:
    """Combine per-mask banks into one; configs must agree."""
    banks = list(banks)
    if not banks:
        raise ValueError("no banks to merge")
    config = banks[0].feature_config
    models = {}
    for bank in banks:
        if bank.feature_config != config:
            raise ValueError("banks mix feature configs")
        models.update(bank.models)
    return LinearModelBank(models=models, feature_config=config)


def estimate_magnitude(bank: LinearModelBank, bus: int,
                       mask: tuple[int, ...], features: FeatureVector) -> float:
    """Predicted disturbance size in MW for a known or hypothesized bus."""
    key = (bus, tuple(mask))
    if key not in bank.models:
        raise KeyError(f"no magnitude model for bus {bus} with mask {tuple(mask)}")
    if features.config != bank.feature_config:
        raise ValueError("feature config does not match the bank")
    if features.missing_mask != tuple(mask):
        raise ValueError(f"features carry mask {features.missing_mask}, expected {tuple(mask)}")
    coefficients = bank.models[key]
    if len(features.values) != len(coefficients):
        raise ValueError(f"feature vector has length {len(features.values)}, "
                         f"model expects {len(coefficients)}")
    return float(coefficients @ features.values)


def baseline_estimate(trace: FrequencyTrace, model: GridModel,
                      slope_window: int = 4) -> float:
    """Inertial estimate of the step size from the earliest samples.

    Fits a line to each generator's frequency over samples 0..slope_window
    and converts the summed slopes through the inertia constants. Requires no
    training data but degrades quickly once governor response and inter-area
    oscillations bend the trajectory.
    """
    if slope_window < 1:
        raise ValueError("slope_window must be at least 1")
    if trace.sample_count < slope_window + 1:
        raise ValueError(f"trace has {trace.sample_count} samples, "
                         f"slope_window {slope_window} needs {slope_window + 1}")
    if trace.generator_count != model.generator_count:
        raise ValueError("trace and model disagree on the generator count")
    times = trace.sample_period_s * np.arange(slope_window + 1)
    window = trace.samples_hz[:, :slope_window + 1]
    # least-squares slope of each row against the shared time grid
    centered_t = times - times.mean()
    slopes = (window - window.mean(axis=1, keepdims=True)) @ centered_t \
        / float(centered_t @ centered_t)
    weights = 2.0 * model.inertia_s * model.rating_mva / model.nominal_frequency_hz
    return float(-(weights @ slopes))
