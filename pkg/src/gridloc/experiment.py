"""End-to-end experiment pipeline: splits, tuning, sweeps, and report tables.

The protocol mirrors the standard event-localization study layout: a training
split on a fixed magnitude grid, test and validation splits with independent
uniform-random magnitudes per bus, ridge weight lambda tuned on the test
split, and all reported numbers measured on the validation split. Sweep axes
vary one knob at a time around a reference setting (sigma = 5 mHz, W_s = 200,
W_a = 1); the top-k and missing-data axes run at that same reference.

Every report file is a deterministic function of the config: seeds fix the
datasets, noise streams, and mask subsets, and wall-clock times go to a
sidecar log rather than the tables, so repeated runs are byte-identical.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray

from .features import FeatureConfig, add_noise, featurize_arrays, \
    stack_features, trace_noise_seed
from .localizer import LogisticModel, OptimizerSettings, fit_coefficients, predict_matrix
from .magnitude import MagnitudeSettings, baseline_estimate, fit_magnitude
from .model import ConfigurationError, GridModel, IEEE39_LOAD_BUSES, build_ieee39
from .simulate import GridMagnitudes, TraceDataset, UniformMagnitudes, generate_dataset

SWEEP_AXES = ("noise", "ws", "wa", "topk", "missing", "noiseless")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs; defaults reproduce the desk-scale study."""

    disturbance_buses: tuple[int, ...] = IEEE39_LOAD_BUSES
    train_magnitudes: GridMagnitudes = GridMagnitudes(100.0, 1000.0, 10.0)
    magnitude_range_mw: tuple[float, float] = (100.0, 1000.0)
    test_per_bus: int = 5
    validation_per_bus: int = 5
    no_disturbance_train: int = 91
    train_seed: int = 11
    test_seed: int = 12
    validation_seed: int = 13
    feature_seed: int = 17
    mask_seed: int = 19
    duration_s: float = 3.0
    sample_period_s: float = 0.005
    integrator_step_s: float = 0.001
    noise_sigmas_hz: tuple[float, ...] = (0.0, 0.0005, 0.001, 0.005, 0.01)
    sampling_windows: tuple[int, ...] = (5, 50, 100, 200)
    averaging_windows: tuple[int, ...] = (1, 10, 50, 100)
    noiseless_windows: tuple[int, ...] = (1, 2)
    top_k: tuple[int, ...] = (1, 2, 3, 4, 5)
    missing_counts: tuple[int, ...] = (1, 2, 3, 4, 5)
    masks_per_count: int = 5     # sampled missing sets per count, desk scale
    reference_sigma_hz: float = 0.005
    reference_sampling_window: int = 200
    reference_averaging_window: int = 1
    lambda_grid: tuple[float, ...] = (1.0, 10.0, 100.0, 1000.0, 10000.0, 100000.0)
    # the tiny-window noiseless study needs far weaker shrinkage: its feature
    # scale is mHz, so useful margins demand coefficients the main grid forbids
    noiseless_lambda_grid: tuple[float, ...] = (1e-8, 1e-6, 1e-4, 1e-2, 1.0)
    optimizer: OptimizerSettings = OptimizerSettings(max_iterations=3000)
    magnitude: MagnitudeSettings = MagnitudeSettings()
    baseline_slope_window: int = 4
    figure_bus: int = 4
    figure_magnitude_mw: float = 200.0
    figure_generators: tuple[int, ...] = (1, 10)
    figure_window: int = 500
    output_dir: str = "out"
    model_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.disturbance_buses:
            raise ConfigurationError("disturbance_buses must be nonempty")
        if self.test_per_bus < 1 or self.validation_per_bus < 1:
            raise ConfigurationError("test/validation per-bus counts must be positive")
        if self.no_disturbance_train < 0:
            raise ConfigurationError("no_disturbance_train must be nonnegative")
        low, high = self.magnitude_range_mw
        if low <= 0.0 or high < low:
            raise ConfigurationError("magnitude_range_mw must satisfy 0 < low <= high")
        for name in ("noise_sigmas_hz", "sampling_windows", "averaging_windows",
                     "noiseless_windows", "top_k", "missing_counts", "lambda_grid",
                     "noiseless_lambda_grid"):
            if not getattr(self, name):
                raise ConfigurationError(f"{name} must be nonempty")
        if min(self.noise_sigmas_hz) < 0.0 or self.reference_sigma_hz < 0.0:
            raise ConfigurationError("noise sigmas must be nonnegative")
        if min(self.lambda_grid) <= 0.0 or min(self.noiseless_lambda_grid) <= 0.0:
            raise ConfigurationError("lambda_grid entries must be positive")
        if min(self.top_k) < 1 or min(self.missing_counts) < 1:
            raise ConfigurationError("top_k and missing_counts entries must be >= 1")
        if self.masks_per_count < 1:
            raise ConfigurationError("masks_per_count must be >= 1")
        for name in ("reference_sampling_window", "reference_averaging_window",
                     "baseline_slope_window", "figure_window"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def config_hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Rebuild a config from parsed JSON; unknown keys are rejected."""
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    values = dict(raw)
    if "train_magnitudes" in values and not isinstance(values["train_magnitudes"],
                                                       GridMagnitudes):
        values["train_magnitudes"] = GridMagnitudes(**values["train_magnitudes"])
    if "optimizer" in values and not isinstance(values["optimizer"], OptimizerSettings):
        values["optimizer"] = OptimizerSettings(**values["optimizer"])
    if "magnitude" in values and not isinstance(values["magnitude"], MagnitudeSettings):
        values["magnitude"] = MagnitudeSettings(**values["magnitude"])
    for f in dataclasses.fields(ExperimentConfig):
        if f.name in values and isinstance(values[f.name], list):
            values[f.name] = tuple(tuple(v) if isinstance(v, list) else v
                                   for v in values[f.name]) \
                if any(isinstance(v, list) for v in values[f.name]) \
                else tuple(values[f.name])
    if "magnitude_range_mw" in values:
        values["magnitude_range_mw"] = tuple(values["magnitude_range_mw"])
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as handle:
        return config_from_dict(json.load(handle))


def dataset_hash(dataset: TraceDataset) -> str:
    """Content hash over scenarios and samples, for report provenance."""
    digest = hashlib.sha256()
    digest.update(repr((dataset.sample_period_s, dataset.seed,
                        dataset.model_hash)).encode())
    for trace in dataset.traces:
        s = trace.scenario
        digest.update(repr((s.bus, s.magnitude_mw, s.onset_time_s, s.duration_s)).encode())
        digest.update(np.ascontiguousarray(trace.samples_hz).tobytes())
    return digest.hexdigest()[:16]


def run_split(config: ExperimentConfig,
              model: GridModel) -> tuple[TraceDataset, TraceDataset, TraceDataset]:
    """Simulate the train/test/validation datasets for one config."""
    seeds = (config.train_seed, config.test_seed, config.validation_seed)
    if len(set(seeds)) != 3:
        raise ConfigurationError(f"split seeds must be distinct, got {seeds}")
    for bus in config.disturbance_buses:
        if not 1 <= bus <= model.bus_count:
            raise ConfigurationError(f"disturbance bus {bus} outside 1..{model.bus_count}")
    shared = dict(duration_s=config.duration_s,
                  sample_period_s=config.sample_period_s,
                  integrator_step_s=config.integrator_step_s)
    low, high = config.magnitude_range_mw
    train = generate_dataset(model, config.disturbance_buses, config.train_magnitudes,
                             seed=config.train_seed,
                             no_disturbance_count=config.no_disturbance_train, **shared)
    test = generate_dataset(model, config.disturbance_buses,
                            UniformMagnitudes(low, high, config.test_per_bus),
                            seed=config.test_seed, **shared)
    validation = generate_dataset(model, config.disturbance_buses,
                                  UniformMagnitudes(low, high, config.validation_per_bus),
                                  seed=config.validation_seed, **shared)
    return train, test, validation


def _top_k_miss(rankings: NDArray, labels: NDArray, k: int) -> float:
    hits = (rankings[:, :k] == labels[:, None]).any(axis=1)
    return float(1.0 - hits.mean())


def tune_lambda(train_samples, test_samples, lambda_grid,
                settings: OptimizerSettings = OptimizerSettings(),
                bus_count: int | None = None):
    """Pick the ridge weight with the lowest test error; ties go small.

    Returns (best lambda, ((lambda, test error), ...)).
    """
    train_x, train_y, _ = stack_features(train_samples)
    test_x, test_y, _ = stack_features(test_samples)
    best, curve, _ = _tune_arrays(train_x, train_y, test_x, test_y,
                                  lambda_grid, settings, bus_count)
    return best, curve


def _tune_arrays(train_x, train_y, test_x, test_y, lambda_grid, settings,
                 bus_count, feature_config=None, mask=()):
    if not len(lambda_grid):
        raise ValueError("lambda_grid must be nonempty")
    classes = (bus_count if bus_count is not None else int(train_y.max())) + 1
    best = None
    best_model = None
    curve = []
    for lam in sorted(float(l) for l in lambda_grid):
        beta, grad_norm, iterations, _ = fit_coefficients(
            train_x, train_y, lam, settings, classes)
        model = LogisticModel(coefficients=beta, class_labels=tuple(range(classes)),
                              feature_config=feature_config, missing_mask=mask,
                              lam=lam, final_gradient_norm=grad_norm,
                              iterations=iterations)
        _, rankings = predict_matrix(model, test_x)
        error = float((rankings[:, 0] != test_y).mean())
        curve.append((lam, error))
        if best is None or error < best[1]:   # strict: ties keep the smaller lambda
            best = (lam, error)
            best_model = model
    return best[0], tuple(curve), best_model


@dataclass(frozen=True)
class MetricsReport:
    """One sweep row; None marks metrics an axis does not measure."""

    axis: str
    value: float
    sigma_hz: float
    sampling_window: int
    averaging_window: int
    tuned_lambda: float
    lambda_curve: tuple[tuple[float, float], ...]
    test_error: float
    validation_error: float
    top_k_miss: tuple[tuple[int, float], ...]
    relative_error: float | None
    baseline_relative_error: float | None
    per_bus_relative_error: tuple[tuple[int, float], ...] | None
    runtime_seconds: float
    config_hash: str
    dataset_hashes: tuple[str, str, str]
    status: str = "ok"
    mask_count: int | None = None   # missing axis only: masks averaged over


class SweepRunner:
    """Shares datasets and per-setting results across sweep axes."""

    def __init__(self, config: ExperimentConfig, model: GridModel | None = None):
        self.config = config
        self.model = model if model is not None else build_ieee39(**config.model_overrides)
        self.train, self.test, self.validation = run_split(config, self.model)
        self.hashes = (dataset_hash(self.train), dataset_hash(self.test),
                       dataset_hash(self.validation))
        self._rows: dict[tuple, MetricsReport] = {}

    # ---- single-setting evaluation -------------------------------------

    def standard_row(self, sigma_hz: float, sampling_window: int,
                     averaging_window: int,
                     lambda_grid: tuple[float, ...] | None = None) -> MetricsReport:
        grid = tuple(lambda_grid) if lambda_grid is not None else self.config.lambda_grid
        key = ("row", sigma_hz, sampling_window, averaging_window, grid)
        if key not in self._rows:
            self._rows[key] = self._compute_standard_row(
                sigma_hz, sampling_window, averaging_window, grid)
        return self._rows[key]

    def _feature_config(self, sigma_hz, sampling_window, averaging_window):
        return FeatureConfig(sampling_window=sampling_window,
                             averaging_window=averaging_window,
                             noise_sigma_hz=sigma_hz,
                             rng_seed=self.config.feature_seed)

    def _compute_standard_row(self, sigma_hz, sampling_window, averaging_window,
                              lambda_grid):
        config = self.config
        started = time.perf_counter()
        fc = self._feature_config(sigma_hz, sampling_window, averaging_window)
        train_x, train_y, train_z = featurize_arrays(self.train, fc)
        test_x, test_y, _ = featurize_arrays(self.test, fc)
        val_x, val_y, val_z = featurize_arrays(self.validation, fc)

        lam, curve, model = _tune_arrays(train_x, train_y, test_x, test_y,
                                         lambda_grid, config.optimizer,
                                         self.model.bus_count, fc)
        test_error = dict(curve)[lam]
        _, rankings = predict_matrix(model, val_x)
        validation_error = float((rankings[:, 0] != val_y).mean())
        top = tuple((k, _top_k_miss(rankings, val_y, k))
                    for k in config.top_k if k <= rankings.shape[1])

        relative, per_bus = self._magnitude_metrics(
            train_x, train_y, train_z, val_x, val_y, val_z)
        baseline = self._baseline_relative_error(sigma_hz)
        return MetricsReport(
            axis="", value=math.nan, sigma_hz=sigma_hz,
            sampling_window=sampling_window, averaging_window=averaging_window,
            tuned_lambda=lam, lambda_curve=curve, test_error=test_error,
            validation_error=validation_error, top_k_miss=top,
            relative_error=relative, baseline_relative_error=baseline,
            per_bus_relative_error=per_bus,
            runtime_seconds=time.perf_counter() - started,
            config_hash=config.config_hash(), dataset_hashes=self.hashes)

    def _magnitude_metrics(self, train_x, train_y, train_z, val_x, val_y, val_z):
        settings = self.config.magnitude
        disturbed = val_y != 0
        if not disturbed.any():
            return None, None
        relative = np.full(val_y.shape, np.nan)
        per_bus = []
        for bus in np.unique(val_y[disturbed]):
            rows = train_y == bus
            if not rows.any():
                continue
            coefficients = fit_magnitude(train_x[rows], train_z[rows],
                                         "closed-form", settings)
            sel = val_y == bus
            estimates = val_x[sel] @ coefficients
            relative[sel] = np.abs(estimates - val_z[sel]) / val_z[sel]
            per_bus.append((int(bus), float(relative[sel].mean())))
        covered = np.isfinite(relative)
        if not covered.any():
            return None, None
        return float(relative[covered].mean()), tuple(per_bus)

    def _baseline_relative_error(self, sigma_hz: float) -> float | None:
        config = self.config
        errors = []
        for index, trace in enumerate(self.validation.traces):
            scenario = trace.scenario
            if scenario.bus is None:
                continue
            if sigma_hz > 0.0:
                seed = trace_noise_seed(config.feature_seed, self.validation.seed, index)
                trace = add_noise(trace, sigma_hz, seed)
            estimate = baseline_estimate(trace, self.model, config.baseline_slope_window)
            errors.append(abs(estimate - scenario.magnitude_mw) / scenario.magnitude_mw)
        return float(np.mean(errors)) if errors else None

    # ---- missing-data axis ----------------------------------------------

    def sampled_masks(self, count: int) -> tuple[tuple[int, ...], ...]:
        """Seeded missing sets with ``count`` generators out.

        Each mask is a prefix of one of ``masks_per_count`` fixed random
        generator orderings, so the count-i sets nest inside the count-(i+1)
        sets. Pairing counts on shared orderings keeps the degradation curve
        comparable across i instead of resampling unrelated subsets at every
        count. Duplicate prefixes collapse, so the row can carry fewer masks
        than orderings at small counts.
        """
        n = self.model.generator_count
        if not 1 <= count < n:
            raise ConfigurationError(f"missing count {count} must lie in 1..{n - 1}")
        rng = np.random.default_rng(self.config.mask_seed)
        masks = []
        for _ in range(self.config.masks_per_count):
            order = rng.permutation(np.arange(1, n + 1))
            masks.append(tuple(sorted(int(g) for g in order[:count])))
        return tuple(dict.fromkeys(masks))

    def missing_row(self, count: int) -> MetricsReport:
        key = ("missing", count)
        if key not in self._rows:
            self._rows[key] = self._compute_missing_row(count)
        return self._rows[key]

    def _compute_missing_row(self, count: int) -> MetricsReport:
        config = self.config
        started = time.perf_counter()
        reference = self.standard_row(config.reference_sigma_hz,
                                      config.reference_sampling_window,
                                      config.reference_averaging_window)
        lam = reference.tuned_lambda
        fc = self._feature_config(config.reference_sigma_hz,
                                  config.reference_sampling_window,
                                  config.reference_averaging_window)
        classes = self.model.bus_count + 1
        masks = self.sampled_masks(count)
        errors = []
        for mask in masks:
            train_x, train_y, _ = featurize_arrays(self.train, fc, mask)
            beta, grad_norm, iterations, _ = fit_coefficients(
                train_x, train_y, lam, config.optimizer, classes)
            model = LogisticModel(coefficients=beta, class_labels=tuple(range(classes)),
                                  feature_config=fc, missing_mask=mask, lam=lam,
                                  final_gradient_norm=grad_norm, iterations=iterations)
            val_x, val_y, _ = featurize_arrays(self.validation, fc, mask)
            _, rankings = predict_matrix(model, val_x)
            errors.append(float((rankings[:, 0] != val_y).mean()))
        return MetricsReport(
            axis="missing", value=float(count), sigma_hz=config.reference_sigma_hz,
            sampling_window=config.reference_sampling_window,
            averaging_window=config.reference_averaging_window,
            tuned_lambda=lam, lambda_curve=(), test_error=math.nan,
            validation_error=float(np.mean(errors)), top_k_miss=(),
            relative_error=None, baseline_relative_error=None,
            per_bus_relative_error=None,
            runtime_seconds=time.perf_counter() - started,
            config_hash=config.config_hash(), dataset_hashes=self.hashes,
            mask_count=len(masks))

    # ---- axes ------------------------------------------------------------

    def sweep_axis(self, axis: str) -> list[MetricsReport]:
        config = self.config
        ref = (config.reference_sigma_hz, config.reference_sampling_window,
               config.reference_averaging_window)
        rows = []
        if axis == "noise":
            for sigma in config.noise_sigmas_hz:
                rows.append(self._labeled(axis, sigma * 1000.0,
                                          (sigma, ref[1], ref[2])))
        elif axis == "ws":
            for window in config.sampling_windows:
                rows.append(self._labeled(axis, float(window),
                                          (ref[0], window, ref[2])))
        elif axis == "wa":
            for window in config.averaging_windows:
                rows.append(self._labeled(axis, float(window),
                                          (ref[0], ref[1], window)))
        elif axis == "noiseless":
            for window in config.noiseless_windows:
                rows.append(self._labeled(axis, float(window), (0.0, window, 1),
                                          config.noiseless_lambda_grid))
        elif axis == "topk":
            rows.append(self._labeled(axis, float(ref[0] * 1000.0), ref))
        elif axis == "missing":
            for count in config.missing_counts:
                try:
                    rows.append(self.missing_row(count))
                except Exception as exc:   # keep the remaining rows alive
                    rows.append(self._failed(axis, float(count), exc))
        else:
            raise ConfigurationError(f"unknown sweep axis {axis!r}; "
                                     f"choose from {SWEEP_AXES}")
        return rows

    def _labeled(self, axis, value, setting, lambda_grid=None) -> MetricsReport:
        try:
            row = self.standard_row(*setting, lambda_grid=lambda_grid)
        except Exception as exc:
            return self._failed(axis, value, exc)
        return replace(row, axis=axis, value=value)

    def _failed(self, axis, value, exc) -> MetricsReport:
        return MetricsReport(
            axis=axis, value=value, sigma_hz=math.nan, sampling_window=0,
            averaging_window=0, tuned_lambda=math.nan, lambda_curve=(),
            test_error=math.nan, validation_error=math.nan, top_k_miss=(),
            relative_error=None, baseline_relative_error=None,
            per_bus_relative_error=None, runtime_seconds=0.0,
            config_hash=self.config.config_hash(), dataset_hashes=self.hashes,
            status=f"failed: {exc}")


# --------------------------------------------------------------------------
# delimited report output
# --------------------------------------------------------------------------

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _header_lines(axis: str, rows) -> list[str]:
    lines = [f"# gridloc sweep {axis}"]
    if rows:
        lines.append(f"# config {rows[0].config_hash}")
        lines.append("# datasets train={} test={} validation={}".format(
            *rows[0].dataset_hashes))
    return lines


def _write_lines(path, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


_AXIS_VALUE_COLUMN = {
    "noise": "noise_mhz",
    "ws": "sampling_window",
    "wa": "averaging_window",
    "noiseless": "sampling_window",
}


def write_sweep_tables(rows, config: ExperimentConfig, axis: str, outdir) -> list[str]:
    """Write the delimited tables and plot data for one axis; returns paths."""
    import os

    os.makedirs(outdir, exist_ok=True)
    written = []
    if axis in _AXIS_VALUE_COLUMN:
        value_column = _AXIS_VALUE_COLUMN[axis]
        lines = _header_lines(axis, rows)
        columns = [value_column, "lambda", "test_error", "validation_error",
                   "relative_error"]
        if axis == "noise":
            columns.append("baseline_relative_error")
        columns.append("status")
        lines.append("\t".join(columns))
        for row in rows:
            record = [_fmt(row.value), _fmt(row.tuned_lambda), _fmt(row.test_error),
                      _fmt(row.validation_error), _fmt(row.relative_error)]
            if axis == "noise":
                record.append(_fmt(row.baseline_relative_error))
            record.append(row.status)
            lines.append("\t".join(record))
        path = os.path.join(outdir, f"{axis}_sweep.tsv")
        _write_lines(path, lines)
        written.append(path)

        curve_lines = _header_lines(axis, rows)
        curve_lines.append("\t".join([value_column, "lambda", "test_error"]))
        for row in rows:
            for lam, error in row.lambda_curve:
                curve_lines.append("\t".join([_fmt(row.value), _fmt(lam), _fmt(error)]))
        path = os.path.join(outdir, f"lambda_curve_{axis}.tsv")
        _write_lines(path, curve_lines)
        written.append(path)

        if axis == "noise":
            bus_lines = _header_lines(axis, rows)
            bus_lines.append("\t".join(["noise_mhz", "bus", "relative_error"]))
            for row in rows:
                for bus, error in row.per_bus_relative_error or ():
                    bus_lines.append("\t".join([_fmt(row.value), str(bus), _fmt(error)]))
            path = os.path.join(outdir, "per_bus_error.tsv")
            _write_lines(path, bus_lines)
            written.append(path)
    elif axis == "topk":
        lines = _header_lines(axis, rows)
        lines.append("# setting sigma_hz={} sampling_window={} averaging_window={}".format(
            _fmt(rows[0].sigma_hz), rows[0].sampling_window, rows[0].averaging_window))
        lines.append("\t".join(["k", "miss_rate", "status"]))
        for row in rows:
            for k, miss in row.top_k_miss:
                lines.append("\t".join([str(k), _fmt(miss), row.status]))
        path = os.path.join(outdir, "topk_sweep.tsv")
        _write_lines(path, lines)
        written.append(path)
    elif axis == "missing":
        lines = _header_lines(axis, rows)
        lines.append("\t".join(["missing_count", "masks", "lambda",
                                "validation_error", "status"]))
        for row in rows:
            lines.append("\t".join([str(int(row.value)), _fmt(row.mask_count),
                                    _fmt(row.tuned_lambda),
                                    _fmt(row.validation_error), row.status]))
        path = os.path.join(outdir, "missing_sweep.tsv")
        _write_lines(path, lines)
        written.append(path)
    else:
        raise ConfigurationError(f"unknown sweep axis {axis!r}")
    return written


def write_runtime_log(rows, outdir) -> str:
    """Wall-clock sidecar; the only output file that varies between runs."""
    import os

    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, "runtime.log")
    with open(path, "a", encoding="utf-8") as handle:
        for row in rows:
            handle.write(f"{row.axis} {row.value} {row.runtime_seconds:.3f}s\n")
    return path


def sweep(config: ExperimentConfig, axis: str, outdir=None,
          runner: SweepRunner | None = None):
    """Run one axis end to end and write its tables.

    A shared ``runner`` carries cached per-setting results across axes.
    Returns (rows, written table paths).
    """
    if runner is None:
        runner = SweepRunner(config)
    rows = runner.sweep_axis(axis)
    directory = outdir if outdir is not None else config.output_dir
    written = write_sweep_tables(rows, config, axis, directory)
    write_runtime_log(rows, directory)
    return rows, written
