"""Class-means minimum-distance classifier (CMMDC).

Stores only the two class means. A query goes to the class whose mean is
nearer in Euclidean distance; exact ties go to the first class.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Iterable

import numpy as np

from .errors import ConfigError, DataError, DimensionMismatchError


@dataclass(frozen=True)
class CMMDCModel:
    class_labels: tuple
    means: tuple  # two read-only k-vectors, same order as class_labels

    def __post_init__(self):
        if len(self.class_labels) != 2 or self.class_labels[0] == self.class_labels[1]:
            raise ConfigError(f"need two distinct class labels, got {self.class_labels}")
        means = tuple(np.array(m, dtype=float) for m in self.means)
        if len(means) != 2 or means[0].shape != means[1].shape or means[0].ndim != 1:
            raise DimensionMismatchError("class means must be two vectors of equal length")
        if not all(np.all(np.isfinite(m)) for m in means):
            raise DataError("class means must be finite")
        for m in means:
            m.setflags(write=False)
        object.__setattr__(self, "class_labels", tuple(self.class_labels))
        object.__setattr__(self, "means", means)

    @property
    def k(self) -> int:
        return self.means[0].shape[0]

    def distances(self, x) -> tuple[float, float]:
        x = _as_vector(x)
        if x.shape[0] != self.k:
            raise DimensionMismatchError(f"query has {x.shape[0]} features, model expects {self.k}")
        return (float(np.linalg.norm(x - self.means[0])),
                float(np.linalg.norm(x - self.means[1])))

    def predict(self, x) -> Hashable:
        d1, d2 = self.distances(x)
        return self.class_labels[1] if d2 < d1 else self.class_labels[0]

    def score(self, x) -> float:
        """``d1 - d2``: positive leans to the second class, negative to the first."""
        d1, d2 = self.distances(x)
        return d1 - d2

    def to_json(self) -> dict:
        return {
            "class_labels": list(self.class_labels),
            "means": [m.tolist() for m in self.means],
            "k": self.k,
            "metric": "euclidean",
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CMMDCModel":
        if doc.get("metric", "euclidean") != "euclidean":
            raise ConfigError(f"unsupported metric {doc['metric']!r}")
        model = cls(tuple(doc["class_labels"]), tuple(doc["means"]))
        if "k" in doc and int(doc["k"]) != model.k:
            raise DimensionMismatchError(f"model declares k={doc['k']} but means have {model.k}")
        return model

    def save(self, path: Path | str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path: Path | str) -> "CMMDCModel":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _as_vector(x) -> np.ndarray:
    x = getattr(x, "features", x)
    return np.asarray(x, dtype=float).reshape(-1)


def fit(samples: Iterable[tuple], labels=None, class_order=None) -> CMMDCModel:
    """Fit from ``(features, label)`` pairs, or from ``fit(X, y)``.

    Class order follows first appearance of each label unless *class_order*
    pins it (cross-validation does, so ties break the same way in every fold).
    """
    if labels is None:
        pairs = list(samples)
        X = [_as_vector(f) for f, _ in pairs]
        y = [lab for _, lab in pairs]
    else:
        X = [_as_vector(f) for f in samples]
        y = list(labels)
        if len(X) != len(y):
            raise DimensionMismatchError(f"{len(X)} feature vectors but {len(y)} labels")
    if not X:
        raise DataError("cannot fit on an empty training set")
    dims = {x.shape[0] for x in X}
    if len(dims) != 1:
        raise DimensionMismatchError(f"mixed feature dimensions: {sorted(dims)}")
    order = list(dict.fromkeys(y))
    if len(order) != 2:
        raise DataError(f"training set must contain exactly 2 classes, found {len(order)}")
    if class_order is not None:
        if set(class_order) != set(order) or len(class_order) != 2:
            raise ConfigError(f"class_order {class_order} does not match labels {order}")
        order = list(class_order)
    X = np.vstack(X)
    y = np.asarray(y, dtype=object)
    means = tuple(X[y == c].mean(axis=0) for c in order)
    return CMMDCModel(tuple(order), means)


def predict_many(model: CMMDCModel, X) -> list:
    return [model.predict(x) for x in X]


def score_many(model: CMMDCModel, X) -> np.ndarray:
    return np.array([model.score(x) for x in X], dtype=float)
