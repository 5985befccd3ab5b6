"""Plain-text persistence for traces, features, models, and banks.

Every format is line-oriented UTF-8 with tab-separated fields, '#'-prefixed
header lines, and floats written with Python's shortest round-trip repr, so
files are byte-stable across runs and diff cleanly. Readers validate headers
and reject files whose declared shape disagrees with their rows.

Trace files carry the model content hash so a mismatched model is caught at
load time rather than as a silent feature skew.
"""

from __future__ import annotations

import hashlib
import os

import numpy as np

from .features import FeatureConfig, FeatureVector, LabeledSample
from .localizer import LogisticModel
from .magnitude import LinearModelBank
from .missing import ScenarioBank
from .model import DisturbanceScenario, FrequencyTrace
from .simulate import TraceDataset


class FormatError(ValueError):
    """Raised when a persisted file fails validation."""


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write(path, lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def _read_header(lines, magic: str) -> tuple[dict, int]:
    if not lines or lines[0] != f"# {magic}":
        raise FormatError(f"expected a '# {magic}' header")
    header = {}
    index = 1
    while index < len(lines) and lines[index].startswith("# "):
        key, _, value = lines[index][2:].partition(" ")
        header[key] = value
        index += 1
    return header, index


# ---- traces ----------------------------------------------------------------

def write_traces(path, dataset: TraceDataset, nominal_frequency_hz: float,
                 onset_time_s: float = 0.0) -> None:
    """Columnar trace format: one row per (scenario, generator, sample).

    Columns: scenario id (the position in the dataset), disturbed bus (0 for
    no disturbance), magnitude in MW, generator id, sample index, frequency
    in Hz.
    """
    if not dataset.traces:
        raise FormatError("refusing to write an empty dataset")
    generators = range(1, dataset.traces[0].generator_count + 1)
    lines = [
        "# gridloc-traces 1",
        f"# model_hash {dataset.model_hash}",
        f"# sample_period_s {_fmt(dataset.sample_period_s)}",
        f"# nominal_frequency_hz {_fmt(nominal_frequency_hz)}",
        f"# onset_time_s {_fmt(onset_time_s)}",
        f"# seed {dataset.seed}",
        f"# noise_sigma_hz {_fmt(dataset.noise_sigma_hz)}",
        "# generators " + " ".join(str(g) for g in generators),
        "\t".join(["scenario", "bus", "magnitude_mw", "generator", "t", "frequency_hz"]),
    ]
    for scenario_id, trace in enumerate(dataset.traces):
        scenario = trace.scenario
        bus = 0 if scenario.bus is None else scenario.bus
        for g in generators:
            row = trace.samples_hz[g - 1]
            for t in range(trace.sample_count):
                lines.append("\t".join([str(scenario_id), str(bus),
                                        _fmt(scenario.magnitude_mw), str(g),
                                        str(t), _fmt(row[t])]))
    _write(path, lines)


def read_traces(path) -> TraceDataset:
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    header, start = _read_header(lines, "gridloc-traces 1")
    for key in ("model_hash", "sample_period_s", "nominal_frequency_hz",
                "onset_time_s", "seed", "noise_sigma_hz", "generators"):
        if key not in header:
            raise FormatError(f"trace header is missing {key}")
    generators = [int(g) for g in header["generators"].split()]
    if generators != list(range(1, len(generators) + 1)):
        raise FormatError("generator ids must be 1..N in order")
    sample_period = float(header["sample_period_s"])
    nominal = float(header["nominal_frequency_hz"])
    onset = float(header["onset_time_s"])

    expected_columns = "scenario\tbus\tmagnitude_mw\tgenerator\tt\tfrequency_hz"
    if start >= len(lines) or lines[start] != expected_columns:
        raise FormatError("trace column header missing or reordered")
    samples: dict[int, dict] = {}
    for line in lines[start + 1:]:
        if not line:
            continue
        scenario_id, bus, magnitude, generator, t, frequency = line.split("\t")
        entry = samples.setdefault(int(scenario_id),
                                   {"bus": int(bus), "magnitude": float(magnitude),
                                    "values": {}})
        if entry["bus"] != int(bus) or entry["magnitude"] != float(magnitude):
            raise FormatError(f"scenario {scenario_id} rows disagree on its label")
        entry["values"][(int(generator), int(t))] = float(frequency)

    traces = []
    for scenario_id in sorted(samples):
        entry = samples[scenario_id]
        keys = entry["values"]
        sample_count = 1 + max(t for _, t in keys)
        grid = np.empty((len(generators), sample_count))
        for g in generators:
            for t in range(sample_count):
                if (g, t) not in keys:
                    raise FormatError(
                        f"scenario {scenario_id} is missing generator {g} sample {t}")
                grid[g - 1, t] = keys[(g, t)]
        scenario = DisturbanceScenario(
            bus=entry["bus"] if entry["bus"] != 0 else None,
            magnitude_mw=entry["magnitude"], onset_time_s=onset,
            duration_s=(sample_count - 1) * sample_period)
        traces.append(FrequencyTrace(
            scenario=scenario, sample_period_s=sample_period, samples_hz=grid,
            pre_onset_frequency_hz=np.full(len(generators), nominal)))
    return TraceDataset(traces=tuple(traces), model_hash=header["model_hash"],
                        sample_period_s=sample_period, seed=int(header["seed"]),
                        noise_sigma_hz=float(header["noise_sigma_hz"]))


# ---- feature matrices -------------------------------------------------------

def _config_header(config: FeatureConfig, mask) -> list[str]:
    return [
        f"# sampling_window {config.sampling_window}",
        f"# averaging_window {config.averaging_window}",
        f"# noise_sigma_hz {_fmt(config.noise_sigma_hz)}",
        f"# rng_seed {config.rng_seed}",
        "# missing " + (" ".join(str(g) for g in mask) if mask else "none"),
    ]


def _parse_config_header(header) -> tuple[FeatureConfig, tuple[int, ...]]:
    config = FeatureConfig(sampling_window=int(header["sampling_window"]),
                           averaging_window=int(header["averaging_window"]),
                           noise_sigma_hz=float(header["noise_sigma_hz"]),
                           rng_seed=int(header["rng_seed"]))
    mask = () if header["missing"] == "none" else \
        tuple(int(g) for g in header["missing"].split())
    return config, mask


def write_features(path, samples) -> None:
    """Long-format feature rows: (scenario, label, magnitude, coordinate, value)."""
    if not samples:
        raise FormatError("refusing to write an empty sample list")
    config = samples[0].features.config
    mask = samples[0].features.missing_mask
    lines = ["# gridloc-features 1"] + _config_header(config, mask)
    lines.append("\t".join(["scenario", "label", "magnitude_mw", "coordinate", "value"]))
    for scenario_id, sample in enumerate(samples):
        if sample.features.config != config or sample.features.missing_mask != mask:
            raise FormatError("samples mix feature configs or missing masks")
        for coordinate, value in enumerate(sample.features.values):
            lines.append("\t".join([str(scenario_id), str(sample.label_index),
                                    _fmt(sample.magnitude_mw), str(coordinate),
                                    _fmt(value)]))
    _write(path, lines)


def read_features(path) -> list[LabeledSample]:
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    header, start = _read_header(lines, "gridloc-features 1")
    config, mask = _parse_config_header(header)
    expected_columns = "scenario\tlabel\tmagnitude_mw\tcoordinate\tvalue"
    if start >= len(lines) or lines[start] != expected_columns:
        raise FormatError("feature column header missing or reordered")
    rows: dict[int, dict] = {}
    for line in lines[start + 1:]:
        if not line:
            continue
        scenario_id, label, magnitude, coordinate, value = line.split("\t")
        entry = rows.setdefault(int(scenario_id),
                                {"label": int(label), "magnitude": float(magnitude),
                                 "values": {}})
        entry["values"][int(coordinate)] = float(value)
    samples = []
    for scenario_id in sorted(rows):
        entry = rows[scenario_id]
        values = np.array([entry["values"][i] for i in range(len(entry["values"]))])
        samples.append(LabeledSample(
            features=FeatureVector(values=values, config=config, missing_mask=mask),
            label_index=entry["label"], magnitude_mw=entry["magnitude"]))
    return samples


# ---- logistic models ---------------------------------------------------------

def write_model(path, model: LogisticModel) -> None:
    """Header (feature config, mask, lambda, classes) then one row per class."""
    lines = ["# gridloc-localizer 1"]
    lines += _config_header(model.feature_config, model.missing_mask)
    lines.append(f"# lambda {_fmt(model.lam)}")
    lines.append("# class_labels " + " ".join(str(c) for c in model.class_labels))
    for row in model.coefficients:
        lines.append("\t".join(_fmt(v) for v in row))
    _write(path, lines)


def read_model(path) -> LogisticModel:
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    header, start = _read_header(lines, "gridloc-localizer 1")
    config, mask = _parse_config_header(header)
    labels = tuple(int(c) for c in header["class_labels"].split())
    rows = [np.array([float(v) for v in line.split("\t")])
            for line in lines[start:] if line]
    if len(rows) != len(labels):
        raise FormatError(f"expected {len(labels)} coefficient rows, found {len(rows)}")
    coefficients = np.vstack(rows)
    return LogisticModel(coefficients=coefficients, class_labels=labels,
                         feature_config=config, missing_mask=mask,
                         lam=float(header["lambda"]))


# ---- magnitude banks ----------------------------------------------------------

def write_magnitude_bank(path, bank: LinearModelBank) -> None:
    """One record per (bus, mask): a key line then its coefficient row."""
    if not bank.models:
        raise FormatError("refusing to write an empty bank")
    lines = ["# gridloc-magnitude 1"]
    lines += _config_header(bank.feature_config, ())[:4]   # mask lives per record
    for (bus, mask), coefficients in sorted(bank.models.items()):
        mask_text = " ".join(str(g) for g in mask) if mask else "none"
        lines.append(f"> bus {bus} missing {mask_text}")
        lines.append("\t".join(_fmt(v) for v in coefficients))
    _write(path, lines)


def read_magnitude_bank(path) -> LinearModelBank:
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    header, start = _read_header(lines, "gridloc-magnitude 1")
    header["missing"] = "none"
    config, _ = _parse_config_header(header)
    models = {}
    index = start
    while index < len(lines):
        if not lines[index]:
            index += 1
            continue
        if not lines[index].startswith("> bus "):
            raise FormatError(f"expected a '> bus' record line, got {lines[index]!r}")
        fields = lines[index].split()
        bus = int(fields[2])
        mask = () if fields[4:] == ["none"] else tuple(int(g) for g in fields[4:])
        if index + 1 >= len(lines):
            raise FormatError(f"record for bus {bus} has no coefficient row")
        coefficients = np.array([float(v) for v in lines[index + 1].split("\t")])
        models[(bus, mask)] = coefficients
        index += 2
    return LinearModelBank(models=models, feature_config=config)


# ---- scenario banks ------------------------------------------------------------

def _mask_slug(mask) -> str:
    return "none" if not mask else "-".join(str(g) for g in mask)


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        digest.update(handle.read())
    return digest.hexdigest()


def write_scenario_bank(directory, bank: ScenarioBank) -> None:
    """One localizer file per mask plus a shared magnitude bank and an index."""
    os.makedirs(directory, exist_ok=True)
    names = []
    for mask in sorted(bank.localizers, key=lambda m: (len(m), m)):
        name = f"localizer_{_mask_slug(mask)}.tsv"
        write_model(os.path.join(directory, name), bank.localizers[mask])
        names.append(name)
    write_magnitude_bank(os.path.join(directory, "magnitude.tsv"), bank.magnitudes)
    names.append("magnitude.tsv")
    lines = ["# gridloc-bank 1", f"# k_max {bank.k_max}"]
    for name in names:
        lines.append(f"{name}\t{_sha256(os.path.join(directory, name))}")
    _write(os.path.join(directory, "index.tsv"), lines)


def read_scenario_bank(directory) -> ScenarioBank:
    index_path = os.path.join(directory, "index.tsv")
    with open(index_path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    header, start = _read_header(lines, "gridloc-bank 1")
    localizers = {}
    magnitudes = None
    for line in lines[start:]:
        if not line:
            continue
        name, checksum = line.split("\t")
        path = os.path.join(directory, name)
        if _sha256(path) != checksum:
            raise FormatError(f"checksum mismatch for {name}")
        if name.startswith("localizer_"):
            model = read_model(path)
            localizers[model.missing_mask] = model
        elif name == "magnitude.tsv":
            magnitudes = read_magnitude_bank(path)
    if not localizers or magnitudes is None:
        raise FormatError("bank index lists no usable entries")
    first = next(iter(localizers.values()))
    return ScenarioBank(localizers=localizers, magnitudes=magnitudes,
                        k_max=int(header["k_max"]),
                        feature_config=first.feature_config)
