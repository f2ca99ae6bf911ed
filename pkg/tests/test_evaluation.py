import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nucleeg import synthgen
from nucleeg.errors import ConfigError, DataError, DimensionMismatchError
from nucleeg.evaluation import (
    ConfusionCounts,
    confusion,
    crossval,
    kfold_split,
    metrics,
    roc_auc,
    scatter_analysis,
    subject_holdout,
    subject_split,
)
from nucleeg.signal_core import Trial

from oracles import pair_count_auc


# ---- kfold_split

def test_kfold_singletons():
    plan = kfold_split(list(range(10)), 10, seed=1, stratified=False)
    assert sorted(len(f) for f in plan.folds) == [1] * 10
    assert sorted(i for f in plan.folds for i in f) == list(range(10))


def test_kfold_single_class_stratified_singletons():
    plan = kfold_split(["a"] * 10, 10, seed=1)
    assert all(len(f) == 1 for f in plan.folds)


def test_kfold_stratified_counts():
    labels = ["x"] * 20 + ["y"] * 10
    plan = kfold_split(labels, 10, seed=4)
    for fold in plan.folds:
        assert sum(labels[i] == "x" for i in fold) == 2
        assert sum(labels[i] == "y" for i in fold) == 1


def test_kfold_deterministic():
    labels = ["a", "b"] * 37
    assert kfold_split(labels, 10, 3) == kfold_split(labels, 10, 3)
    assert kfold_split(labels, 10, 3).folds != kfold_split(labels, 10, 4).folds


def test_kfold_errors():
    with pytest.raises(ConfigError):
        kfold_split(["a"] * 20 + ["b"] * 5, 10)
    with pytest.raises(ConfigError):
        kfold_split(["a"] * 5, 1)
    with pytest.raises(ConfigError):
        kfold_split(["a"] * 5, 6, stratified=False)


@settings(max_examples=100)
@given(st.integers(2, 12), st.integers(0, 40), st.integers(0, 40), st.integers(0, 1000))
def test_kfold_partition_property(folds, extra_a, extra_b, seed):
    labels = ["a"] * (folds + extra_a) + ["b"] * (folds + extra_b)
    plan = kfold_split(labels, folds, seed)
    flat = [i for f in plan.folds for i in f]
    assert sorted(flat) == list(range(len(labels)))
    for lab in ("a", "b"):
        per = [sum(labels[i] == lab for i in f) for f in plan.folds]
        assert max(per) - min(per) <= 1
    sizes = [len(f) for f in plan.folds]
    assert max(sizes) - min(sizes) <= 1


# ---- subject_split

def _trials(n_subjects, per=2):
    x = np.ones((2, 2)) * np.array([1.0, 2.0])
    return [Trial(x, "AB"[j % 2], f"s{s:02d}", f"t{s}_{j}")
            for s in range(n_subjects) for j in range(per)]


def test_subject_split_34():
    train, test, tr_s, te_s = subject_split(_trials(34), 0.1, seed=0)
    assert len(te_s) == 3 and len(tr_s) == 31
    assert not set(tr_s) & set(te_s)
    assert {t.subject for t in test} == set(te_s)
    assert len(train) + len(test) == 68


def test_subject_split_10_and_determinism():
    a = subject_split(_trials(10), 0.1, seed=5)
    b = subject_split(_trials(10), 0.1, seed=5)
    assert len(a[3]) == 1 and a[3] == b[3]


def test_subject_split_errors():
    with pytest.raises(DataError):
        subject_split(_trials(1), 0.1)
    with pytest.raises(ConfigError):
        subject_split(_trials(5), 1.0)


@given(st.integers(2, 60), st.floats(0.01, 0.99), st.integers(0, 10_000))
def test_subject_split_disjoint(n, frac, seed):
    _, _, tr_s, te_s = subject_split(_trials(n, 1), frac, seed)
    assert not set(tr_s) & set(te_s)
    assert len(tr_s) >= 1 and len(te_s) >= 1


# ---- confusion / metrics

def test_confusion_all_correct_table1():
    truth = ["LA"] * 482 + ["HA"] * 551
    c = confusion(truth, truth, "LA")
    assert c == ConfusionCounts(tp=482, tn=551, fp=0, fn=0)
    m = metrics(c)
    assert (m.accuracy, m.sensitivity, m.specificity) == (100.0, 100.0, 100.0)


def test_confusion_flipped():
    truth = ["p"] * 7 + ["n"] * 5
    flipped = ["n" if t == "p" else "p" for t in truth]
    c = confusion(flipped, truth, "p")
    assert c == ConfusionCounts(tp=0, tn=0, fp=5, fn=7)


def test_confusion_and_metrics_20_samples():
    truth = ["p"] * 10 + ["n"] * 10
    preds = ["p"] * 8 + ["n"] * 2 + ["n"] * 9 + ["p"]
    c = confusion(preds, truth, "p")
    assert c == ConfusionCounts(tp=8, tn=9, fp=1, fn=2)
    m = metrics(c)
    assert (m.sensitivity, m.specificity, m.accuracy) == (80.0, 90.0, 85.0)


def test_metrics_undefined():
    m = metrics(ConfusionCounts(0, 5, 1, 0))
    assert m.sensitivity is None and "sensitivity" in m.undefined
    assert m.specificity == pytest.approx(500 / 6)
    with pytest.raises(DataError):
        metrics(ConfusionCounts(0, 0, 0, 0))


def test_confusion_errors():
    with pytest.raises(DimensionMismatchError):
        confusion(["a"], ["a", "b"], "a")
    with pytest.raises(DataError):
        confusion(["a", "c"], ["a", "b"], "a", classes=["a", "b"])


@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=50))
def test_accuracy_identity(pairs):
    preds = ["p" if a else "n" for a, _ in pairs]
    truth = ["p" if b else "n" for _, b in pairs]
    c = confusion(preds, truth, "p")
    assert c.total == len(pairs)
    assert metrics(c).accuracy * c.total == pytest.approx(100 * (c.tp + c.tn), abs=1e-9)


# ---- roc_auc

def test_auc_examples():
    assert roc_auc([3, 4, 1, 2], ["p", "p", "n", "n"], "p")[1] == 1.0
    assert roc_auc([1, 1, 1, 1], ["p", "n", "p", "n"], "p")[1] == 0.5
    pts, auc = roc_auc([0.9, 0.4, 0.5, 0.1], ["p", "p", "n", "n"], "p")
    assert auc == 0.75
    assert pts[0] == (0.0, 0.0) and pts[-1] == (1.0, 1.0)


def test_auc_single_class():
    with pytest.raises(DataError):
        roc_auc([1, 2], ["p", "p"], "p")


@settings(max_examples=200)
@given(st.lists(st.tuples(st.integers(-5, 5), st.booleans()), min_size=2, max_size=80))
def test_auc_matches_pair_counting(data):
    scores = [s / 3 for s, _ in data]
    truth = ["p" if b else "n" for _, b in data]
    if len(set(truth)) < 2:
        return
    _, auc = roc_auc(scores, truth, "p")
    assert abs(auc - pair_count_auc(scores, truth, "p")) <= 1e-12


# ---- scatter_analysis

def test_scatter_1d_derived():
    sa = scatter_analysis([0.0, 2.0, 4.0, 6.0], ["a", "a", "b", "b"])
    assert sa.Sw.tolist() == [[1.0]] and sa.Sb.tolist() == [[4.0]] and sa.Sm.tolist() == [[5.0]]
    assert abs(sa.J1 - 5) <= 1e-12 and abs(sa.J2 - 5) <= 1e-12


def test_scatter_equal_means():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((30, 3))
    a -= a.mean(axis=0)
    b = -a[:20] * 1.5
    b -= b.mean(axis=0)
    X = np.vstack([a, b])
    sa = scatter_analysis(X, ["a"] * 30 + ["b"] * 20)
    assert np.allclose(sa.Sb, 0, atol=1e-14)
    assert abs(sa.J1 - 1) <= 1e-9 and abs(sa.J2 - 1) <= 1e-9


def test_scatter_singular_within():
    X = np.array([[0.0, 1.0], [1.0, 1.0], [5.0, 1.0], [6.0, 1.0]])
    sa = scatter_analysis(X, ["a", "a", "b", "b"])
    assert sa.J2 is None and "J2_undefined_Sw_singular" in sa.flags
    assert sa.det_Sw == 0.0 and sa.J1 is not None


def test_scatter_errors():
    with pytest.raises(DataError):
        scatter_analysis([0.0, 1.0, 2.0], ["a", "b", "b"])
    with pytest.raises(DataError):
        scatter_analysis([0.0, 1.0, 2.0], ["a", "a", "a"])


@settings(max_examples=100)
@given(st.integers(1, 4), st.integers(2, 30), st.integers(2, 30), st.integers(0, 2**32 - 1))
def test_scatter_identities(k, n1, n2, seed):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.standard_normal((n1, k)) + rng.normal(0, 2, k),
                   rng.standard_normal((n2, k)) * rng.uniform(0.5, 2)])
    y = ["a"] * n1 + ["b"] * n2
    sa = scatter_analysis(X, y)
    scale = np.abs(sa.Sm).max()
    assert np.abs(sa.Sm - (sa.Sb + sa.Sw)).max() <= 1e-10 * scale
    assert np.abs(sa.Sm - np.cov(X.T, bias=True).reshape(k, k)).max() <= 1e-10 * scale
    assert sa.J1 >= 1 - 1e-9
    if sa.J2 is not None:
        assert sa.J2 >= 1 - 1e-9


def test_scatter_accepts_pairs():
    sa = scatter_analysis([((0.0,), "a"), ((2.0,), "a"), ((4.0,), "b"), ((6.0,), "b")])
    assert sa.J1 == pytest.approx(5.0)


# ---- crossval / subject_holdout

@pytest.fixture(scope="module")
def separable():
    trials, _ = synthgen.generate_dataset(
        synthgen.GeneratorConfig(trials_per_class=60, subjects=12, seed=11))
    return trials


def test_crossval_separable(separable):
    r = crossval(separable, k_features=2, folds=10, seed=1)
    assert r.aggregate["mean"]["accuracy"] == 100.0 and r.auc == 1.0
    assert len(r.folds) == 10
    assert sum(f["n_test"] for f in r.folds) == 120
    assert r.aggregate["pooled_confusion"]["tp"] == 60
    assert r.scatter.J1 > 1
    assert r.positive == "B" and r.class_labels == ("A", "B")


def test_crossval_deterministic(separable):
    a = crossval(separable, seed=3).dumps()
    assert a == crossval(separable, seed=3).dumps()
    doc = json.loads(a)
    assert len(doc["provenance"]["config_hash"]) == 64
    assert doc["roc"][0] == [0.0, 0.0] and doc["roc"][-1] == [1.0, 1.0]


def test_crossval_permuted_labels_near_chance():
    trials, _ = synthgen.generate_dataset(
        synthgen.GeneratorConfig(trials_per_class=150, subjects=10, seed=2))
    rng = np.random.default_rng(9)
    labels = rng.permutation([t.label for t in trials])
    shuffled = [Trial(t.samples, lab, t.subject, t.trial_id) for t, lab in zip(trials, labels)]
    acc = crossval(shuffled, seed=2).aggregate["mean"]["accuracy"]
    assert 40 <= acc <= 60


def test_crossval_positive_first_class(separable):
    r = crossval(separable, seed=1, positive="A")
    assert r.positive == "A" and r.auc == 1.0
    with pytest.raises(ConfigError):
        crossval(separable, positive="Z")


def test_subject_holdout(separable):
    r = subject_holdout(separable, test_fraction=0.1, seed=0)
    block = r.folds[0]
    assert not set(block["train_subjects"]) & set(block["test_subjects"])
    assert len(block["test_subjects"]) == 1
    assert r.aggregate["mean"]["accuracy"] == 100.0
