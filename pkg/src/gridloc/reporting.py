"""Figure rendering for sweep reports.

Reads the delimited tables a sweep wrote and renders matplotlib figures next
to them, plus the frequency-deviation panel built directly from a single
simulated scenario (clean and noisy variants of the same trace). Rendering is
side-effect free beyond the files it writes and never recomputes a sweep.
"""

from __future__ import annotations

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .experiment import ExperimentConfig
from .features import add_noise
from .model import DisturbanceScenario, GridModel
from .simulate import simulate

_FIGURE_KW = dict(dpi=150, format="png")


def _read_table(path) -> tuple[list[str], list[list[str]]]:
    with open(path, encoding="utf-8") as handle:
        lines = [line for line in handle.read().splitlines() if line]
    body = [line for line in lines if not line.startswith("#")]
    if not body:
        return [], []
    return body[0].split("\t"), [line.split("\t") for line in body[1:]]


def _column(header, rows, name, convert=float):
    index = header.index(name)
    return [convert(row[index]) for row in rows if row[index] != ""]


def write_trace_figure_data(config: ExperimentConfig, model: GridModel,
                            outdir) -> str:
    """Clean and noisy deviation samples for the showcase scenario."""
    os.makedirs(outdir, exist_ok=True)
    window = config.figure_window
    duration = max(config.duration_s, window * config.sample_period_s)
    scenario = DisturbanceScenario(bus=config.figure_bus,
                                   magnitude_mw=config.figure_magnitude_mw,
                                   duration_s=duration)
    trace = simulate(model, scenario, config.integrator_step_s, config.sample_period_s)
    noisy = add_noise(trace, config.reference_sigma_hz,
                      np.random.SeedSequence((config.feature_seed, 0)))
    lines = [
        "# gridloc figure-data frequency-deviation",
        f"# bus {config.figure_bus}",
        f"# magnitude_mw {config.figure_magnitude_mw!r}",
        f"# noise_sigma_hz {config.reference_sigma_hz!r}",
        "\t".join(["t_ms", "generator", "clean_hz", "noisy_hz"]),
    ]
    step_ms = config.sample_period_s * 1000.0
    for g in config.figure_generators:
        clean = trace.samples_hz[g - 1, :window + 1] - trace.samples_hz[g - 1, 0]
        jittered = noisy.samples_hz[g - 1, :window + 1] - noisy.samples_hz[g - 1, 0]
        for t in range(window + 1):
            lines.append("\t".join([repr(t * step_ms), str(g),
                                    repr(float(clean[t])), repr(float(jittered[t]))]))
    path = os.path.join(outdir, "freq_deviation_traces.tsv")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")
    return path


def _save(figure, path):
    figure.savefig(path, **_FIGURE_KW)
    plt.close(figure)
    return path


def _line_figure(path, x, series, xlabel, ylabel, title, logx=False, logy=False):
    figure, axes = plt.subplots(figsize=(5.0, 3.4))
    for label, values in series:
        axes.plot(x, values, marker="o", linewidth=1.2, markersize=3.5, label=label)
    axes.set_xlabel(xlabel)
    axes.set_ylabel(ylabel)
    axes.set_title(title, fontsize=10)
    if logx:
        axes.set_xscale("log")
    if logy:
        axes.set_yscale("log")
    if len(series) > 1:
        axes.legend(fontsize=8)
    axes.grid(True, alpha=0.3)
    figure.tight_layout()
    return _save(figure, path)


def render_figures(outdir) -> list[str]:
    """Render a PNG for every table present in ``outdir``; returns the paths."""
    figures_dir = os.path.join(outdir, "figures")
    os.makedirs(figures_dir, exist_ok=True)
    written = []

    path = os.path.join(outdir, "freq_deviation_traces.tsv")
    if os.path.exists(path):
        header, rows = _read_table(path)
        generators = sorted({int(row[header.index("generator")]) for row in rows})
        figure, axes_grid = plt.subplots(len(generators), 2, sharex=True,
                                         figsize=(7.2, 2.2 * len(generators)),
                                         squeeze=False)
        for i, g in enumerate(generators):
            sub = [row for row in rows if int(row[header.index("generator")]) == g]
            t = [float(r[header.index("t_ms")]) for r in sub]
            for j, column in enumerate(("clean_hz", "noisy_hz")):
                values = [float(r[header.index(column)]) for r in sub]
                axes_grid[i][j].plot(t, values, linewidth=0.9)
                axes_grid[i][j].grid(True, alpha=0.3)
                axes_grid[i][j].set_ylabel(f"gen {g} dev (Hz)", fontsize=8)
                if i == 0:
                    axes_grid[i][j].set_title(column.replace("_hz", ""), fontsize=9)
        for j in range(2):
            axes_grid[-1][j].set_xlabel("time after onset (ms)")
        figure.tight_layout()
        written.append(_save(figure, os.path.join(figures_dir, "freq_deviation.png")))

    path = os.path.join(outdir, "noise_sweep.tsv")
    if os.path.exists(path):
        header, rows = _read_table(path)
        noise = _column(header, rows, "noise_mhz")
        series = [("localization", _column(header, rows, "validation_error"))]
        written.append(_line_figure(
            os.path.join(figures_dir, "noise_error.png"), noise, series,
            "measurement noise (mHz)", "validation error",
            "classification error vs noise"))
        relative = _column(header, rows, "relative_error")
        if len(relative) == len(noise):
            written.append(_line_figure(
                os.path.join(figures_dir, "noise_magnitude_error.png"), noise,
                [("regression", relative)],
                "measurement noise (mHz)", "mean relative error",
                "magnitude error vs noise", logy=True))

    for axis, column, xlabel, name in (
            ("ws", "sampling_window", "sampling window W_s", "window_error.png"),
            ("wa", "averaging_window", "averaging window W_a", "smoothing_error.png")):
        path = os.path.join(outdir, f"{axis}_sweep.tsv")
        if os.path.exists(path):
            header, rows = _read_table(path)
            x = _column(header, rows, column)
            series = [("localization", _column(header, rows, "validation_error"))]
            relative = _column(header, rows, "relative_error")
            if len(relative) == len(x):
                series.append(("magnitude", relative))
            written.append(_line_figure(
                os.path.join(figures_dir, name), x, series, xlabel,
                "validation error", f"error vs {xlabel}"))

    path = os.path.join(outdir, "topk_sweep.tsv")
    if os.path.exists(path):
        header, rows = _read_table(path)
        k = _column(header, rows, "k", int)
        miss = _column(header, rows, "miss_rate")
        written.append(_line_figure(
            os.path.join(figures_dir, "topk_miss.png"), k,
            [("top-k", miss)], "k", "miss rate", "top-k miss rate"))

    path = os.path.join(outdir, "missing_sweep.tsv")
    if os.path.exists(path):
        header, rows = _read_table(path)
        count = _column(header, rows, "missing_count", int)
        error = _column(header, rows, "validation_error")
        written.append(_line_figure(
            os.path.join(figures_dir, "missing_error.png"), count,
            [("mean over masks", error)], "missing generators",
            "validation error", "error vs missing measurements"))

    path = os.path.join(outdir, "per_bus_error.tsv")
    if os.path.exists(path):
        header, rows = _read_table(path)
        sigma_index = header.index("noise_mhz")
        sigmas = sorted({float(r[sigma_index]) for r in rows})
        pick = sigmas[-1]   # the largest noise level is the interesting panel
        sub = [r for r in rows if float(r[sigma_index]) == pick]
        buses = [int(r[header.index("bus")]) for r in sub]
        errors = [float(r[header.index("relative_error")]) for r in sub]
        figure, axes = plt.subplots(figsize=(7.0, 3.2))
        axes.bar([str(b) for b in buses], errors, color="#4878a8")
        axes.set_xlabel("disturbed bus")
        axes.set_ylabel("mean relative error")
        axes.set_title(f"magnitude error by bus at {pick} mHz noise", fontsize=10)
        axes.tick_params(axis="x", labelsize=7)
        axes.grid(True, axis="y", alpha=0.3)
        figure.tight_layout()
        written.append(_save(figure, os.path.join(figures_dir, "per_bus_error.png")))

    return written
