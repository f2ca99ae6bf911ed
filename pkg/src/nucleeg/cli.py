"""``nucleeg`` command line: synth, extract, crossval, fit, predict, plot.

Exit status: 0 success, 2 configuration error, 3 data error, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import classify, evaluation, nuclear, plots, synthgen
from .errors import ConfigError, DataError, DecompositionError
from .signal_core import DEFAULT_EPSILON, amplitude_reject, load_dataset, save_dataset

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_IO = 4


# -------------------------------------------------------------- helpers

def _load(args):
    manifest, trials = load_dataset(args.manifest)
    region = manifest.region(args.region)
    rejected = []
    if args.reject_threshold is not None:
        trials, rejected = amplitude_reject(trials, args.reject_threshold)
    return manifest, trials, region, rejected


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_rejections(out: Path, rejected) -> Path:
    path = out / "rejected.txt"
    path.write_text("".join(f"{tid}\n" for tid in rejected))
    return path


def _fmt(v, digits=2):
    return "undef" if v is None else f"{v:.{digits}f}"


def summary_table(report: evaluation.EvaluationReport, region_name: str, n_channels: int,
                  k: int) -> str:
    """One-row table: region, k, channels, accuracy, sensitivity, specificity, AUC."""
    mean = report.aggregate["mean"]
    head = ["Region", "Features", "Channels", "Accuracy", "Sensitivity", "Specificity", "AUC"]
    row = [region_name, f"{k:02d}", str(n_channels), _fmt(mean["accuracy"]),
           _fmt(mean["sensitivity"]), _fmt(mean["specificity"]), _fmt(report.auc, 4)]
    widths = [max(len(h), len(r)) for h, r in zip(head, row)]
    line = lambda cells: "  ".join(c.rjust(w) for c, w in zip(cells, widths))  # noqa: E731
    return f"{line(head)}\n{line(row)}\n"


# ------------------------------------------------------------- commands

def cmd_synth(args) -> int:
    cfg = synthgen.GeneratorConfig(
        n_channels=args.channels, d_samples=args.samples, trials_per_class=args.trials,
        subjects=args.subjects, separation=args.separation, seed=args.seed,
        class_factor_ranks=tuple(args.ranks), class_labels=tuple(args.labels),
        amplitude=args.amplitude, noise=args.noise)
    trials, manifest = synthgen.generate_dataset(cfg)
    if args.artifact_rate > 0:
        art = synthgen.ArtifactConfig(
            rate=args.artifact_rate, amplitude=args.artifact_amplitude,
            width=args.artifact_width,
            seed=args.seed if args.artifact_seed is None else args.artifact_seed,
            channel_fraction=args.artifact_channels)
        trials = synthgen.inject_artifacts(trials, art)
    path = save_dataset(_out_dir(args.out), manifest, trials)
    print(f"wrote {len(trials)} trials and {path}")
    return EXIT_OK


def cmd_extract(args) -> int:
    manifest, trials, region, rejected = _load(args)
    out = _out_dir(args.out)
    X = nuclear.extract_many(trials, region, args.k, args.epsilon)
    S = np.empty((len(trials), len(region.channels)))
    for i, t in enumerate(trials):
        S[i] = nuclear.spectrum(t, region, args.epsilon)
    nuclear.write_feature_csv(out / "features.csv", trials, X)
    nuclear.write_feature_csv(out / "spectrum.csv", trials, S, prefix="s")
    _write_rejections(out, rejected)
    print(f"{len(trials)} trials -> {out / 'features.csv'} ({len(rejected)} rejected)")
    return EXIT_OK


def cmd_crossval(args) -> int:
    manifest, trials, region, rejected = _load(args)
    out = _out_dir(args.out)
    extra = {"reject_threshold": args.reject_threshold, "rejected": rejected}
    if args.subject_split is not None:
        report = evaluation.subject_holdout(
            trials, region, args.k, args.subject_split, args.seed, args.positive,
            args.epsilon, extra_config=extra)
    else:
        report = evaluation.crossval(
            trials, region, args.k, args.folds, args.seed, args.positive,
            stratified=not args.no_stratify, epsilon=args.epsilon, extra_config=extra)
    (out / "report.json").write_text(report.dumps())
    table = summary_table(report, region.name, len(region.channels), args.k)
    (out / "summary.txt").write_text(table)
    _write_rejections(out, rejected)
    sys.stdout.write(table)
    return EXIT_OK


def cmd_fit(args) -> int:
    manifest, trials, region, rejected = _load(args)
    out = _out_dir(args.out)
    X = nuclear.extract_many(trials, region, args.k, args.epsilon)
    model = classify.fit(X, [t.label for t in trials], class_order=manifest.labels)
    model.save(out / "model.json")
    print(f"model fitted on {len(trials)} trials -> {out / 'model.json'}")
    return EXIT_OK


def cmd_predict(args) -> int:
    model = classify.CMMDCModel.load(args.model)
    manifest, trials, region, rejected = _load(args)
    out = _out_dir(args.out)
    X = nuclear.extract_many(trials, region, model.k, args.epsilon)
    with open(out / "predictions.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial_id", "label", "predicted", "score"])
        for t, x in zip(trials, X):
            w.writerow([t.trial_id, t.label, model.predict(x), repr(model.score(x))])
    print(f"{len(trials)} predictions -> {out / 'predictions.csv'}")
    return EXIT_OK


def cmd_plot(args) -> int:
    ids, labels, _, X = nuclear.read_feature_csv(args.features)
    out = _out_dir(args.out)
    written = list(plots.histogram(out, labels, X[:, 0]))
    if X.shape[1] >= 2:
        written += plots.scatter(out, ids, labels, X)
    else:
        print("fewer than 2 features: scatter skipped", file=sys.stderr)
    if args.spectrum:
        s_ids, s_labels, _, S = nuclear.read_feature_csv(args.spectrum)
        written += plots.spectra(out, s_ids, s_labels, S)
    for p in written:
        print(p)
    return EXIT_OK if X.shape[1] >= 2 else EXIT_CONFIG


# --------------------------------------------------------------- parser

def _dataset_flags(p, with_k=True):
    p.add_argument("--manifest", required=True, help="dataset manifest JSON")
    p.add_argument("--region", default="ALL", help="region name from the manifest")
    if with_k:
        p.add_argument("--k", type=int, default=nuclear.DEFAULT_K, help="nuclear feature count")
    p.add_argument("--reject-threshold", type=float, default=None,
                   help="reject trials with any |sample| above this (off by default)")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nucleeg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic two-class dataset")
    p.add_argument("--channels", type=int, default=16)
    p.add_argument("--samples", type=int, default=150)
    p.add_argument("--trials", type=int, default=300, help="trials per class")
    p.add_argument("--subjects", type=int, default=34)
    p.add_argument("--separation", type=float, default=1.0)
    p.add_argument("--ranks", type=int, nargs=2, default=[2, 8])
    p.add_argument("--labels", nargs=2, default=["A", "B"])
    p.add_argument("--amplitude", type=float, default=10.0)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--artifact-rate", type=float, default=0.0)
    p.add_argument("--artifact-amplitude", type=float, default=90.0)
    p.add_argument("--artifact-width", type=int, default=20)
    p.add_argument("--artifact-channels", type=float, default=0.25,
                   help="fraction of channels hit in an affected trial")
    p.add_argument("--artifact-seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="write nuclear features and spectra")
    _dataset_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("crossval", help="cross-validate (or subject-holdout) the CMMDC")
    _dataset_flags(p)
    p.add_argument("--folds", type=int, default=evaluation.DEFAULT_FOLDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--positive", default=None, help="ROC-positive label (default: second)")
    p.add_argument("--subject-split", type=float, default=None, metavar="FRACTION",
                   help="hold out this fraction of subjects instead of k-fold")
    p.add_argument("--no-stratify", action="store_true")
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("fit", help="fit a model on the whole dataset")
    _dataset_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="apply a saved model")
    _dataset_flags(p, with_k=False)
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("plot", help="scatter/histogram/spectrum SVG and CSV")
    p.add_argument("--features", required=True)
    p.add_argument("--spectrum", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, DecompositionError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
