"""Disturbance localization and magnitude estimation on power networks.

Simulates post-disturbance generator frequency dynamics on a reduced network
model, turns the sampled traces into feature vectors, and fits multinomial
logistic localizers plus per-bus linear magnitude estimators, including
variants trained for every small set of missing generator measurements.
"""

from .model import (ConfigurationError, DisturbanceScenario, FrequencyTrace,
                    GridModel, IEEE39_GENERATOR_BUSES, IEEE39_LOAD_BUSES,
                    IEEE39_LOAD_MW, build_ieee39, ieee39_load_vector)
from .network import (NumericalError, effective_resistance, kron_reduce,
                      load_participation, susceptance_laplacian)
from .simulate import (GridMagnitudes, SimulationDivergenceError, TraceDataset,
                       UniformMagnitudes, generate_dataset, simulate)
from .features import (FeatureConfig, FeatureVector, LabeledSample, add_noise,
                       canonical_mask, extract, feature_length,
                       featurize_arrays, featurize_dataset, stack_features,
                       trace_noise_seed)
from .localizer import (ConvergenceError, LocalizationPrediction,
                        LogisticModel, OptimizerSettings, fit_coefficients,
                        objective_and_gradient, predict, predict_matrix,
                        softmax_probabilities, top_k, train_localizer)
from .magnitude import (LinearModelBank, MagnitudeSettings, baseline_estimate,
                        estimate_magnitude, fit_magnitude, merge_banks,
                        train_bank, train_magnitude)
from .missing import (ScenarioBank, build_bank, enumerate_masks,
                      predict_with_missing)
from .experiment import (ExperimentConfig, MetricsReport, SWEEP_AXES,
                         SweepRunner, config_from_dict, dataset_hash,
                         load_config, run_split, sweep, tune_lambda,
                         write_runtime_log, write_sweep_tables)
from .persist import (FormatError, read_features, read_magnitude_bank,
                      read_model, read_scenario_bank, read_traces,
                      write_features, write_magnitude_bank, write_model,
                      write_scenario_bank, write_traces)
from .reporting import render_figures, write_trace_figure_data

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "ConvergenceError", "DisturbanceScenario",
    "ExperimentConfig", "FeatureConfig", "FeatureVector", "FormatError",
    "FrequencyTrace", "GridMagnitudes", "GridModel", "IEEE39_GENERATOR_BUSES",
    "IEEE39_LOAD_BUSES", "IEEE39_LOAD_MW", "LabeledSample", "LinearModelBank",
    "LocalizationPrediction", "LogisticModel", "MagnitudeSettings",
    "MetricsReport", "NumericalError", "OptimizerSettings", "SWEEP_AXES",
    "ScenarioBank", "SimulationDivergenceError", "SweepRunner", "TraceDataset",
    "UniformMagnitudes", "add_noise", "baseline_estimate", "build_bank",
    "build_ieee39", "canonical_mask", "config_from_dict", "dataset_hash",
    "effective_resistance", "enumerate_masks", "estimate_magnitude",
    "extract", "feature_length", "featurize_arrays", "featurize_dataset",
    "fit_coefficients", "fit_magnitude", "generate_dataset",
    "ieee39_load_vector", "kron_reduce", "load_config", "load_participation",
    "merge_banks", "objective_and_gradient", "predict", "predict_matrix",
    "predict_with_missing", "read_features", "read_magnitude_bank",
    "read_model", "read_scenario_bank", "read_traces", "render_figures",
    "run_split", "simulate", "softmax_probabilities", "stack_features",
    "susceptance_laplacian", "sweep", "top_k", "trace_noise_seed",
    "train_bank", "train_localizer", "train_magnitude", "tune_lambda",
    "write_features", "write_magnitude_bank", "write_model",
    "write_runtime_log", "write_scenario_bank", "write_sweep_tables",
    "write_trace_figure_data", "write_traces",
]
