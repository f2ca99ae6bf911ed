"""Evaluation harness: fold planning, subject-held-out splits, confusion
metrics, ROC/AUC and scatter-matrix class separability.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from . import classify
from .errors import ConfigError, DataError, DimensionMismatchError
from .nuclear import DEFAULT_K, extract_many
from .signal_core import DEFAULT_EPSILON, RegionSpec, Trial

DEFAULT_FOLDS = 10


# ---------------------------------------------------------------- data types

@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.tn + other.tn,
                               self.fp + other.fp, self.fn + other.fn)

    def to_json(self) -> dict:
        return {"tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn}


@dataclass(frozen=True)
class MetricsReport:
    """Percentages in [0, 100]; ``None`` marks a ratio with a zero denominator."""

    accuracy: float | None
    sensitivity: float | None
    specificity: float | None
    auc: float | None = None
    undefined: tuple = ()

    def to_json(self) -> dict:
        return {"accuracy": self.accuracy, "sensitivity": self.sensitivity,
                "specificity": self.specificity, "auc": self.auc,
                "undefined": list(self.undefined)}


@dataclass(frozen=True)
class FoldPlan:
    folds: tuple  # tuple of sorted index tuples
    seed: int
    stratified: bool

    def train_test(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        test = np.array(self.folds[i], dtype=int)
        train = np.array(sorted(j for f, fold in enumerate(self.folds) if f != i for j in fold),
                         dtype=int)
        return train, test


@dataclass(frozen=True)
class ScatterAnalysis:
    Sw: np.ndarray
    Sb: np.ndarray
    Sm: np.ndarray
    J1: float | None
    J2: float | None
    det_Sw: float
    det_Sm: float
    flags: tuple = ()

    def to_json(self) -> dict:
        return {
            "Sw": self.Sw.tolist(), "Sb": self.Sb.tolist(), "Sm": self.Sm.tolist(),
            "J1": self.J1, "J2": self.J2,
            "det_Sw": self.det_Sw, "det_Sm": self.det_Sm,
            "trace_Sw": float(np.trace(self.Sw)), "trace_Sm": float(np.trace(self.Sm)),
            "flags": list(self.flags),
        }


@dataclass
class EvaluationReport:
    protocol: str
    class_labels: tuple
    positive: Hashable
    folds: list = field(default_factory=list)
    aggregate: dict = field(default_factory=dict)
    roc: list = field(default_factory=list)
    auc: float | None = None
    scatter: ScatterAnalysis | None = None
    provenance: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "protocol": self.protocol,
            "class_labels": list(self.class_labels),
            "positive": self.positive,
            "folds": self.folds,
            "aggregate": self.aggregate,
            "roc": self.roc,
            "auc": self.auc,
            "scatter": None if self.scatter is None else self.scatter.to_json(),
            "provenance": self.provenance,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


# ------------------------------------------------------------------- splits

def kfold_split(labels: Sequence[Hashable], folds: int = DEFAULT_FOLDS, seed: int = 0,
                stratified: bool = True) -> FoldPlan:
    """Seeded k-fold partition of ``range(len(labels))``.

    Stratified plans shuffle each class (in first-appearance order) and deal
    its indices round-robin across folds, continuing the deal where the
    previous class stopped so fold sizes stay within one of each other.
    """
    labels = list(labels)
    if folds < 2:
        raise ConfigError(f"need at least 2 folds, got {folds}")
    if len(labels) < folds:
        raise ConfigError(f"{len(labels)} samples cannot fill {folds} folds")
    rng = np.random.default_rng(seed)
    if stratified:
        groups = {}
        for i, lab in enumerate(labels):
            groups.setdefault(lab, []).append(i)
        small = {lab: len(ix) for lab, ix in groups.items() if len(ix) < folds}
        if small:
            raise ConfigError(f"classes smaller than the fold count ({folds}): {small}")
        sequence = [int(j) for ix in groups.values() for j in rng.permutation(ix)]
    else:
        sequence = [int(j) for j in rng.permutation(len(labels))]
    buckets = [[] for _ in range(folds)]
    for pos, j in enumerate(sequence):
        buckets[pos % folds].append(j)
    return FoldPlan(tuple(tuple(sorted(b)) for b in buckets), seed, stratified)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def subject_split(trials: Sequence[Trial], test_fraction: float = 0.1, seed: int = 0):
    """Hold out whole subjects.

    ``max(1, round(test_fraction * n_subjects))`` subjects (half rounds up)
    go to the test side; no subject appears on both sides.

    Returns ``(train, test, train_subjects, test_subjects)``.
    """
    if not 0 < test_fraction < 1:
        raise ConfigError(f"test fraction must be in (0, 1), got {test_fraction}")
    subjects = list(dict.fromkeys(t.subject for t in trials))
    if len(subjects) < 2:
        raise DataError(f"subject split needs at least 2 subjects, found {len(subjects)}")
    n_test = min(max(1, _round_half_up(test_fraction * len(subjects))), len(subjects) - 1)
    order = np.random.default_rng(seed).permutation(len(subjects))
    test_subjects = [subjects[i] for i in sorted(order[:n_test])]
    test_set = set(test_subjects)
    train_subjects = [s for s in subjects if s not in test_set]
    train = [t for t in trials if t.subject not in test_set]
    test = [t for t in trials if t.subject in test_set]
    return train, test, train_subjects, test_subjects


# ------------------------------------------------------------------ metrics

def confusion(predictions: Sequence[Hashable], truth: Sequence[Hashable], positive: Hashable,
              classes: Sequence[Hashable] | None = None) -> ConfusionCounts:
    predictions, truth = list(predictions), list(truth)
    if len(predictions) != len(truth):
        raise DimensionMismatchError(
            f"{len(predictions)} predictions but {len(truth)} true labels")
    known = set(classes) if classes is not None else set(truth) | set(predictions)
    if len(known) > 2:
        raise DataError(f"more than two classes present: {sorted(map(str, known))}")
    unknown = (set(truth) | set(predictions)) - known
    if unknown:
        raise DataError(f"unknown label(s): {sorted(map(str, unknown))}")
    tp = tn = fp = fn = 0
    for p, t in zip(predictions, truth):
        if t == positive:
            if p == positive:
                tp += 1
            else:
                fn += 1
        elif p == positive:
            fp += 1
        else:
            tn += 1
    return ConfusionCounts(tp, tn, fp, fn)


def _pct(num: int, den: int) -> float | None:
    return None if den == 0 else 100.0 * num / den


def metrics(c: ConfusionCounts, auc: float | None = None) -> MetricsReport:
    """Accuracy, sensitivity (TPR) and specificity (TNR) as percentages."""
    if c.total == 0:
        raise DataError("no evaluated samples")
    sens = _pct(c.tp, c.tp + c.fn)
    spec = _pct(c.tn, c.tn + c.fp)
    undefined = tuple(name for name, v in (("sensitivity", sens), ("specificity", spec))
                      if v is None)
    return MetricsReport(_pct(c.tp + c.tn, c.total), sens, spec, auc, undefined)


def roc_auc(scores: Sequence[float], truth: Sequence[Hashable], positive: Hashable):
    """ROC by sweeping every distinct score as a threshold (higher = positive).

    Returns ``(points, auc)`` where ``points`` is a list of ``(fpr, tpr)``
    from ``(0, 0)`` to ``(1, 1)``. Tied scores move diagonally, which gives
    tied positive/negative pairs half credit under the trapezoid rule.
    """
    s = np.asarray(scores, dtype=float)
    y = np.array([t == positive for t in truth], dtype=bool)
    if s.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"{s.shape[0]} scores but {y.shape[0]} labels")
    n_pos = int(y.sum())
    n_neg = int(y.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DataError("ROC needs both classes in the truth labels")
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    tp = np.cumsum(y)
    fp = np.cumsum(~y)
    # last index of each run of equal scores
    last = np.r_[np.nonzero(np.diff(s))[0], s.size - 1]
    tp = np.r_[0, tp[last]].astype(np.int64)
    fp = np.r_[0, fp[last]].astype(np.int64)
    twice_area = int(np.sum(np.diff(fp) * (tp[1:] + tp[:-1])))
    auc = twice_area / (2 * n_pos * n_neg)
    points = [(float(f) / n_neg, float(t) / n_pos) for f, t in zip(fp, tp)]
    return points, auc


# ------------------------------------------------------------------ scatter

def scatter_analysis(features, labels=None) -> ScatterAnalysis:
    """Within-, between- and mixture-class scatter with J1/J2 criteria.

    Scatter matrices use class priors ``n_c / N`` and population (1/n_c)
    covariances, so ``Sm`` equals the pooled covariance about the global
    mean. ``J2`` is ``None`` (flagged) when ``Sw`` is singular.
    """
    if labels is None:
        pairs = list(features)
        X = np.vstack([np.asarray(getattr(f, "features", f), dtype=float).reshape(-1)
                       for f, _ in pairs]) if pairs else np.empty((0, 0))
        y = [lab for _, lab in pairs]
    else:
        X = np.asarray(features, dtype=float)
        y = list(labels)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != len(y):
        raise DimensionMismatchError(f"{X.shape[0]} feature rows but {len(y)} labels")
    classes = list(dict.fromkeys(y))
    if len(classes) != 2:
        raise DataError(f"scatter analysis needs exactly 2 classes, found {len(classes)}")
    y = np.asarray(y, dtype=object)
    total = X.shape[0]
    k = X.shape[1]
    mu0 = X.mean(axis=0)
    Sw = np.zeros((k, k))
    Sb = np.zeros((k, k))
    for c in classes:
        Xc = X[y == c]
        if Xc.shape[0] < 2:
            raise DataError(f"class {c!r} has fewer than 2 samples")
        prior = Xc.shape[0] / total
        mu = Xc.mean(axis=0)
        D = Xc - mu
        Sw += prior * (D.T @ D) / Xc.shape[0]
        dm = (mu - mu0)[:, None]
        Sb += prior * (dm @ dm.T)
    Sm = Sb + Sw
    flags = []
    tr_w = float(np.trace(Sw))
    J1 = float(np.trace(Sm)) / tr_w if tr_w > 0 else None
    if J1 is None:
        flags.append("J1_undefined_trace_Sw_zero")
    sign_w, logdet_w = np.linalg.slogdet(Sw)
    sign_m, logdet_m = np.linalg.slogdet(Sm)
    det_w = float(sign_w * math.exp(logdet_w)) if sign_w != 0 else 0.0
    det_m = float(sign_m * math.exp(logdet_m)) if sign_m != 0 else 0.0
    eig_w = np.linalg.eigvalsh(Sw)
    if sign_w <= 0 or eig_w[0] <= 1e-12 * max(eig_w[-1], np.finfo(float).tiny):
        J2 = None
        flags.append("J2_undefined_Sw_singular")
    else:
        J2 = float(math.exp(logdet_m - logdet_w))
    return ScatterAnalysis(Sw, Sb, Sm, J1, J2, det_w, det_m, tuple(flags))


# ------------------------------------------------------------ end to end

def _mean_defined(values):
    vals = [v for v in values if v is not None]
    return sum(vals) / len(vals) if vals else None


def _config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def _dataset_fingerprint(trials: Sequence[Trial]) -> str:
    h = hashlib.sha256()
    for t in trials:
        h.update(f"{t.trial_id}|{t.label}|{t.subject}|".encode())
        h.update(np.ascontiguousarray(t.samples).tobytes())
    return h.hexdigest()


def _resolve_classes(trials: Sequence[Trial], positive):
    classes = tuple(dict.fromkeys(t.label for t in trials))
    if len(classes) != 2:
        raise DataError(f"expected exactly 2 classes, found {len(classes)}")
    if positive is None:
        positive = classes[1]
    elif positive not in classes:
        raise ConfigError(f"positive class {positive!r} is not one of {list(classes)}")
    return classes, positive


def _oriented_scores(model: classify.CMMDCModel, X: np.ndarray, positive) -> np.ndarray:
    # d1 - d2 grows toward the second class; flip when the first is positive
    s = classify.score_many(model, X)
    return s if positive == model.class_labels[1] else -s


def _fold_block(index, model, X_test, y_test, positive, classes, extra=None) -> tuple:
    preds = classify.predict_many(model, X_test)
    counts = confusion(preds, y_test, positive, classes)
    scores = _oriented_scores(model, X_test, positive)
    fold_auc = None
    if len(set(y_test)) == 2:
        fold_auc = roc_auc(scores, y_test, positive)[1]
    m = metrics(counts, fold_auc)
    block = {"fold": index, "n_test": len(y_test), "confusion": counts.to_json(),
             "metrics": m.to_json(), "model": model.to_json()}
    if extra:
        block.update(extra)
    return block, counts, m, scores


def _assemble(protocol, classes, positive, blocks, counts, reports, all_scores, all_truth,
              X, y, provenance) -> EvaluationReport:
    pooled = sum(counts[1:], counts[0])
    roc_points, auc = [], None
    if len(set(all_truth)) == 2:
        roc_points, auc = roc_auc(all_scores, all_truth, positive)
    aggregate = {
        "mean": {
            "accuracy": _mean_defined(r.accuracy for r in reports),
            "sensitivity": _mean_defined(r.sensitivity for r in reports),
            "specificity": _mean_defined(r.specificity for r in reports),
            "auc": _mean_defined(r.auc for r in reports),
        },
        "pooled_confusion": pooled.to_json(),
        "pooled": metrics(pooled, auc).to_json(),
    }
    scatter = None
    try:
        scatter = scatter_analysis(X, y)
    except DataError:
        pass
    return EvaluationReport(protocol, classes, positive, blocks, aggregate,
                            [list(p) for p in roc_points], auc, scatter, provenance)


def crossval(trials: Sequence[Trial], region: RegionSpec | None = None,
             k_features: int = DEFAULT_K, folds: int = DEFAULT_FOLDS, seed: int = 0,
             positive: Hashable | None = None, stratified: bool = True,
             epsilon: float = DEFAULT_EPSILON, source: str = "gram",
             threads: int | None = None, features: np.ndarray | None = None,
             extra_config: dict | None = None) -> EvaluationReport:
    """k-fold cross-validation of nuclear features with the CMMDC.

    Per fold the classifier is fitted on the other folds and scored on the
    held-out one. The aggregate block carries the unweighted mean of the
    per-fold metrics and the metrics of the pooled confusion counts; ROC and
    AUC are computed on the pooled held-out scores.

    *features* may carry a precomputed ``(len(trials), k)`` matrix;
    *extra_config* entries are recorded in the provenance and config hash.
    """
    trials = list(trials)
    classes, positive = _resolve_classes(trials, positive)
    if features is None:
        X = extract_many(trials, region, k_features, epsilon, source, threads)
    else:
        X = np.asarray(features, dtype=float)
        if X.shape != (len(trials), k_features):
            raise DimensionMismatchError(
                f"precomputed features have shape {X.shape}, expected {(len(trials), k_features)}")
    y = [t.label for t in trials]
    plan = kfold_split(y, folds, seed, stratified)
    yarr = np.asarray(y, dtype=object)
    blocks, counts, reports = [], [], []
    scores = np.empty(len(trials))
    for i in range(folds):
        train, test = plan.train_test(i)
        model = classify.fit(X[train], list(yarr[train]), class_order=classes)
        block, c, m, s = _fold_block(i, model, X[test], list(yarr[test]), positive, classes)
        scores[test] = s
        blocks.append(block)
        counts.append(c)
        reports.append(m)
    config = {
        "protocol": "kfold", "seed": seed, "folds": folds, "stratified": stratified,
        "region": None if region is None else region.to_json(), "k": k_features,
        "positive": positive, "epsilon": epsilon, "source": source,
        "dataset": _dataset_fingerprint(trials),
        **(extra_config or {}),
    }
    provenance = dict(config, config_hash=_config_hash(config), n_trials=len(trials))
    return _assemble("kfold", classes, positive, blocks, counts, reports, scores, y,
                     X, y, provenance)


def subject_holdout(trials: Sequence[Trial], region: RegionSpec | None = None,
                    k_features: int = DEFAULT_K, test_fraction: float = 0.1, seed: int = 0,
                    positive: Hashable | None = None, epsilon: float = DEFAULT_EPSILON,
                    source: str = "gram", threads: int | None = None,
                    extra_config: dict | None = None) -> EvaluationReport:
    """Train on the trials of ~90% of subjects, test on the remaining subjects."""
    trials = list(trials)
    classes, positive = _resolve_classes(trials, positive)
    train, test, train_subjects, test_subjects = subject_split(trials, test_fraction, seed)
    X_train = extract_many(train, region, k_features, epsilon, source, threads)
    X_test = extract_many(test, region, k_features, epsilon, source, threads)
    y_train = [t.label for t in train]
    y_test = [t.label for t in test]
    model = classify.fit(X_train, y_train, class_order=classes)
    extra = {"train_subjects": list(train_subjects), "test_subjects": list(test_subjects),
             "n_train": len(train)}
    block, c, m, s = _fold_block(0, model, X_test, y_test, positive, classes, extra)
    config = {
        "protocol": "subject_holdout", "seed": seed, "test_fraction": test_fraction,
        "region": None if region is None else region.to_json(), "k": k_features,
        "positive": positive, "epsilon": epsilon, "source": source,
        "dataset": _dataset_fingerprint(trials),
        **(extra_config or {}),
    }
    provenance = dict(config, config_hash=_config_hash(config), n_trials=len(trials))
    X_all = np.vstack([X_train, X_test])
    return _assemble("subject_holdout", classes, positive, [block], [c], [m], s, y_test,
                     X_all, y_train + y_test, provenance)
