"""Command line entry point.

Every subcommand reads the same JSON experiment config (``--config``, all keys
optional) and writes under ``<output root>/<config.output_dir>``. The output
root comes from ``--output``, else the ``GRIDLOC_OUTPUT_ROOT`` environment
variable, else the current directory. Failures print one line to stderr and
exit nonzero.

    gridloc simulate --split train
    gridloc featurize --traces out/traces_train.tsv --ws 200 --wa 100
    gridloc train-loc --features out/features_train.tsv --lam 100
    gridloc train-mag --features out/features_train.tsv
    gridloc build-bank --traces out/traces_train.tsv --k-max 2 --lam 100
    gridloc predict --model out/localizer.tsv --traces out/traces_test.tsv
    gridloc sweep --axis noise
    gridloc report
"""

from __future__ import annotations

import argparse
import os
import sys

from . import persist
from .experiment import (ExperimentConfig, SWEEP_AXES, load_config, run_split,
                         sweep, SweepRunner)
from .features import FeatureConfig, canonical_mask, extract, featurize_dataset
from .localizer import predict, train_localizer
from .magnitude import estimate_magnitude, train_bank
from .missing import build_bank, predict_with_missing
from .model import build_ieee39
from .reporting import render_figures, write_trace_figure_data


def _load(args) -> ExperimentConfig:
    if args.config is None:
        return ExperimentConfig()
    return load_config(args.config)


def _outdir(args, config: ExperimentConfig) -> str:
    root = args.output or os.environ.get("GRIDLOC_OUTPUT_ROOT") or "."
    path = os.path.join(root, config.output_dir)
    os.makedirs(path, exist_ok=True)
    return path


def _model(config: ExperimentConfig):
    return build_ieee39(**config.model_overrides)


def _feature_config(args, config: ExperimentConfig, noise_default) -> FeatureConfig:
    sigma = args.sigma if args.sigma is not None else noise_default
    return FeatureConfig(
        sampling_window=args.ws or config.reference_sampling_window,
        averaging_window=args.wa or 1,
        noise_sigma_hz=sigma,
        rng_seed=config.feature_seed)


def _parse_generators(text):
    return tuple(int(part) for part in text.split(",") if part)


def _cmd_simulate(args) -> int:
    config = _load(args)
    outdir = _outdir(args, config)
    model = _model(config)
    datasets = dict(zip(("train", "test", "validation"), run_split(config, model)))
    wanted = datasets if args.split == "all" else {args.split: datasets[args.split]}
    for split, dataset in wanted.items():
        path = os.path.join(outdir, f"traces_{split}.tsv")
        persist.write_traces(path, dataset, model.nominal_frequency_hz,
                             dataset.traces[0].scenario.onset_time_s)
        print(f"{path}\t{len(dataset)} traces")
    return 0


def _cmd_featurize(args) -> int:
    config = _load(args)
    outdir = _outdir(args, config)
    dataset = persist.read_traces(args.traces)
    feature_config = _feature_config(args, config, dataset.noise_sigma_hz)
    missing = canonical_mask(_parse_generators(args.missing)) if args.missing else ()
    samples = featurize_dataset(dataset, feature_config, missing=missing)
    stem = os.path.splitext(os.path.basename(args.traces))[0]
    stem = stem.replace("traces", "features") if "traces" in stem else f"features_{stem}"
    path = os.path.join(outdir, args.out or f"{stem}.tsv")
    persist.write_features(path, samples)
    print(f"{path}\t{len(samples)} samples")
    return 0


def _cmd_train_loc(args) -> int:
    config = _load(args)
    outdir = _outdir(args, config)
    samples = persist.read_features(args.features)
    model = train_localizer(samples, args.lam, config.optimizer,
                            bus_count=args.bus_count)
    path = os.path.join(outdir, args.out or "localizer.tsv")
    persist.write_model(path, model)
    print(f"{path}\titerations={model.iterations}\t"
          f"gradient_norm={model.final_gradient_norm!r}")
    return 0


def _cmd_train_mag(args) -> int:
    config = _load(args)
    outdir = _outdir(args, config)
    samples = persist.read_features(args.features)
    bank = train_bank(samples, settings=config.magnitude)
    path = os.path.join(outdir, args.out or "magnitude.tsv")
    persist.write_magnitude_bank(path, bank)
    print(f"{path}\t{len(bank.models)} models")
    return 0


def _cmd_build_bank(args) -> int:
    config = _load(args)
    outdir = _outdir(args, config)
    dataset = persist.read_traces(args.traces)
    feature_config = _feature_config(args, config, dataset.noise_sigma_hz)
    bank = build_bank(dataset, feature_config, args.k_max, args.lam,
                      settings=config.optimizer,
                      magnitude_settings=config.magnitude)
    path = os.path.join(outdir, args.out or "bank")
    persist.write_scenario_bank(path, bank)
    print(f"{path}\t{len(bank.localizers)} masks")
    return 0


def _cmd_predict(args) -> int:
    config = _load(args)
    outdir = _outdir(args, config)
    dataset = persist.read_traces(args.traces)
    lines = ["\t".join(["scenario", "true_bus", "true_mw",
                        "predicted_bus", "probability", "estimate_mw"])]
    if args.bank:
        bank = persist.read_scenario_bank(args.bank)
        observed = _parse_generators(args.observed) if args.observed else tuple(
            range(1, dataset.traces[0].generator_count + 1))
        for index, trace in enumerate(dataset):
            located, magnitude = predict_with_missing(bank, trace, observed)
            lines.append("\t".join([
                str(index), str(trace.scenario.label_index),
                repr(trace.scenario.magnitude_mw), str(located.predicted),
                repr(float(located.probabilities[located.predicted])),
                repr(magnitude)]))
    else:
        if not args.model:
            raise SystemExit("predict needs --model or --bank")
        model = persist.read_model(args.model)
        bank = persist.read_magnitude_bank(args.magnitude) if args.magnitude else None
        for index, trace in enumerate(dataset):
            features = extract(trace, model.feature_config, model.missing_mask)
            located = predict(model, features)
            estimate = ""
            if bank is not None and located.predicted != 0:
                key = (located.predicted, model.missing_mask)
                if key in bank.models:
                    estimate = repr(estimate_magnitude(
                        bank, located.predicted, model.missing_mask, features))
            lines.append("\t".join([
                str(index), str(trace.scenario.label_index),
                repr(trace.scenario.magnitude_mw), str(located.predicted),
                repr(float(located.probabilities[located.predicted])), estimate]))
    path = os.path.join(outdir, args.out or "predictions.tsv")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")
    correct = sum(1 for line in lines[1:]
                  if line.split("\t")[1] == line.split("\t")[3])
    print(f"{path}\t{correct}/{len(lines) - 1} correct")
    return 0


def _cmd_sweep(args) -> int:
    config = _load(args)
    outdir = _outdir(args, config)
    axes = SWEEP_AXES if args.axis == "all" else (args.axis,)
    runner = SweepRunner(config)
    failed = 0
    for axis in axes:
        rows, paths = sweep(config, axis, outdir, runner=runner)
        failed += sum(1 for row in rows if row.status != "ok")
        for path in paths:
            print(path)
    return 1 if failed else 0


def _cmd_report(args) -> int:
    config = _load(args)
    outdir = _outdir(args, config)
    write_trace_figure_data(config, _model(config), outdir)
    for path in render_figures(outdir):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridloc",
        description="disturbance localization and magnitude estimation "
                    "from generator frequency traces")
    parser.add_argument("--config", help="JSON experiment config")
    parser.add_argument("--output", help="output root (else GRIDLOC_OUTPUT_ROOT)")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("simulate", help="integrate the swing dynamics "
                              "and write trace tables")
    sub.add_argument("--split", choices=("train", "test", "validation", "all"),
                     default="all")
    sub.set_defaults(handler=_cmd_simulate)

    sub = commands.add_parser("featurize", help="turn traces into feature rows")
    sub.add_argument("--traces", required=True)
    sub.add_argument("--ws", type=int, help="sampling window")
    sub.add_argument("--wa", type=int, help="averaging window")
    sub.add_argument("--sigma", type=float, help="noise level in Hz "
                     "(default: the dataset's own)")
    sub.add_argument("--missing", help="comma separated generator ids to drop")
    sub.add_argument("--out")
    sub.set_defaults(handler=_cmd_featurize)

    sub = commands.add_parser("train-loc", help="fit the softmax localizer")
    sub.add_argument("--features", required=True)
    sub.add_argument("--lam", type=float, required=True)
    sub.add_argument("--bus-count", type=int, default=None)
    sub.add_argument("--out")
    sub.set_defaults(handler=_cmd_train_loc)

    sub = commands.add_parser("train-mag", help="fit per-bus magnitude models")
    sub.add_argument("--features", required=True)
    sub.add_argument("--out")
    sub.set_defaults(handler=_cmd_train_mag)

    sub = commands.add_parser("build-bank", help="train localizers and "
                              "magnitude models for every missing-data mask")
    sub.add_argument("--traces", required=True)
    sub.add_argument("--k-max", type=int, required=True)
    sub.add_argument("--lam", type=float, required=True)
    sub.add_argument("--ws", type=int)
    sub.add_argument("--wa", type=int)
    sub.add_argument("--sigma", type=float)
    sub.add_argument("--out")
    sub.set_defaults(handler=_cmd_build_bank)

    sub = commands.add_parser("predict", help="locate and size disturbances "
                              "for every trace in a file")
    sub.add_argument("--traces", required=True)
    sub.add_argument("--model", help="localizer table")
    sub.add_argument("--magnitude", help="magnitude bank table")
    sub.add_argument("--bank", help="scenario bank directory (missing-data path)")
    sub.add_argument("--observed", help="comma separated observed generator ids")
    sub.add_argument("--out")
    sub.set_defaults(handler=_cmd_predict)

    sub = commands.add_parser("sweep", help="run an experiment axis and write "
                              "its report tables")
    sub.add_argument("--axis", choices=SWEEP_AXES + ("all",), required=True)
    sub.set_defaults(handler=_cmd_sweep)

    sub = commands.add_parser("report", help="render figures for the tables "
                              "in the output directory")
    sub.set_defaults(handler=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except SystemExit:
        raise
    except Exception as exc:    # one line on stderr, nonzero exit
        print(f"gridloc: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
