"""Plot data for nuclear-feature figures, emitted as SVG plus CSV twins.

SVG output is byte-stable across runs: no timestamp metadata and a fixed
id salt.
"""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import matplotlib
import numpy as np
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from .errors import ConfigError, DataError

BIN_RULE = "freedman-diaconis"
_COLORS = ("tab:green", "tab:red", "tab:blue", "tab:orange")
_MARKERS = ("x", "o", "s", "^")


def _save_svg(fig: Figure, path: Path) -> None:
    with matplotlib.rc_context({"svg.hashsalt": "nucleeg", "svg.fonttype": "path"}):
        FigureCanvasSVG(fig)
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})


def _classes(labels: Sequence[str]) -> list:
    return list(dict.fromkeys(labels))


def scatter(out_dir, ids, labels, X, name: str = "scatter") -> tuple[Path, Path]:
    """(f1, f2) scatter coloured by class."""
    X = np.asarray(X, dtype=float)
    if X.shape[0] == 0:
        raise DataError("no feature rows to plot")
    if X.ndim != 2 or X.shape[1] < 2:
        raise ConfigError("scatter needs at least 2 features per trial")
    out_dir = Path(out_dir)
    csv_path = out_dir / f"{name}.csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial_id", "label", "f1", "f2"])
        for tid, lab, row in zip(ids, labels, X):
            w.writerow([tid, lab, repr(float(row[0])), repr(float(row[1]))])
    fig = Figure(figsize=(5, 4))
    ax = fig.add_subplot()
    lab_arr = np.asarray(labels, dtype=object)
    for i, c in enumerate(_classes(labels)):
        sel = lab_arr == c
        ax.scatter(X[sel, 0], X[sel, 1], marker=_MARKERS[i % 4], color=_COLORS[i % 4],
                   label=str(c), s=14)
    ax.set_xlabel("first nuclear feature")
    ax.set_ylabel("second nuclear feature")
    ax.legend()
    svg_path = out_dir / f"{name}.svg"
    _save_svg(fig, svg_path)
    return svg_path, csv_path


def histogram_counts(labels, values):
    """Shared Freedman-Diaconis bin edges over all values, counts per class."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise DataError("no values to histogram")
    edges = np.histogram_bin_edges(values, bins="fd")
    lab_arr = np.asarray(labels, dtype=object)
    counts = {c: np.histogram(values[lab_arr == c], bins=edges)[0] for c in _classes(labels)}
    return edges, counts


def histogram(out_dir, labels, values, name: str = "hist_f1") -> tuple[Path, Path]:
    """Per-class histogram of the first feature."""
    edges, counts = histogram_counts(labels, values)
    out_dir = Path(out_dir)
    csv_path = out_dir / f"{name}.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write(f"# bin_rule={BIN_RULE}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "bin_left", "bin_right", "count"])
        for c, cnt in counts.items():
            for lo, hi, n in zip(edges[:-1], edges[1:], cnt):
                w.writerow([c, repr(float(lo)), repr(float(hi)), int(n)])
    fig = Figure(figsize=(5, 4))
    ax = fig.add_subplot()
    for i, (c, cnt) in enumerate(counts.items()):
        ax.stairs(cnt, edges, color=_COLORS[i % 4], label=str(c))
    ax.set_xlabel("first nuclear feature")
    ax.set_ylabel("trials")
    ax.set_title(f"bins: {BIN_RULE}", fontsize=9)
    ax.legend()
    svg_path = out_dir / f"{name}.svg"
    _save_svg(fig, svg_path)
    return svg_path, csv_path


def spectra(out_dir, ids, labels, S, name: str = "spectrum") -> tuple[Path, Path]:
    """Singular-value index vs value, one line per trial, in long-form CSV."""
    S = np.asarray(S, dtype=float)
    if S.shape[0] == 0:
        raise DataError("no spectra to plot")
    out_dir = Path(out_dir)
    csv_path = out_dir / f"{name}.csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial_id", "label", "index", "value"])
        for tid, lab, row in zip(ids, labels, S):
            for j, v in enumerate(row, start=1):
                w.writerow([tid, lab, j, repr(float(v))])
    fig = Figure(figsize=(5, 4))
    ax = fig.add_subplot()
    idx = np.arange(1, S.shape[1] + 1)
    classes = _classes(labels)
    for tid, lab, row in zip(ids, labels, S):
        ax.plot(idx, row, color=_COLORS[classes.index(lab) % 4], lw=0.5, alpha=0.4)
    for i, c in enumerate(classes):
        ax.plot([], [], color=_COLORS[i % 4], label=str(c))
    ax.set_xlabel("singular value index")
    ax.set_ylabel("singular value")
    ax.legend()
    svg_path = out_dir / f"{name}.svg"
    _save_svg(fig, svg_path)
    return svg_path, csv_path
