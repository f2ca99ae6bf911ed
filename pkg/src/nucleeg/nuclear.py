"""Nuclear matrices and nuclear features.

For a normalized trial ``A`` (d x n) the nuclear matrix is the channel Gram
matrix ``N = A.T @ A``. Its singular values, largest first, are the trial's
nuclear features; by default the two largest are used.
"""
from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, DataError, DecompositionError, NotPSDError
from .signal_core import (
    DEFAULT_EPSILON,
    NormalizedTrial,
    RegionSpec,
    Trial,
    normalize,
    region_select,
)

DEFAULT_K = 2
SYMMETRY_RTOL = 1e-10
PSD_RTOL = 1e-9


@dataclass(frozen=True)
class NuclearMatrix:
    entries: np.ndarray
    source: str = ""

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class FeatureVector:
    features: np.ndarray

    @property
    def k(self) -> int:
        return len(self.features)


def nuclear_matrix(normalized: NormalizedTrial | np.ndarray) -> NuclearMatrix:
    """``N[i, j] = phi_i . phi_j`` over time samples, symmetrized exactly."""
    if isinstance(normalized, NormalizedTrial):
        a, source = normalized.phi, normalized.provenance
    else:
        a, source = np.asarray(normalized, dtype=float), ""
    n = a.T @ a
    n = 0.5 * (n + n.T)
    n.setflags(write=False)
    return NuclearMatrix(n, source)


def _check_symmetric(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {m.shape}")
    scale = max(np.max(np.abs(m)), np.finfo(float).tiny) if m.size else 1.0
    if np.max(np.abs(m - m.T), initial=0.0) > SYMMETRY_RTOL * scale:
        raise NotPSDError("matrix is not symmetric")


def singular_values(n: NuclearMatrix | np.ndarray) -> np.ndarray:
    """All singular values of a symmetric PSD matrix, descending.

    For such input the singular values are its eigenvalues, so a symmetric
    eigensolver is used. Round-off negatives down to ``-1e-9 * trace`` are
    clamped to zero; anything more negative means the input is not PSD.
    """
    m = n.entries if isinstance(n, NuclearMatrix) else np.asarray(n, dtype=float)
    _check_symmetric(m)
    try:
        w = np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(
            f"symmetric eigensolver (LAPACK syevd) did not converge: {exc}") from None
    w = w[::-1].copy()
    tol = PSD_RTOL * max(abs(np.trace(m)), np.max(np.abs(m), initial=0.0))
    if w.size and w[-1] < -tol:
        raise NotPSDError(f"matrix is not positive semidefinite (eigenvalue {w[-1]:.3g})")
    np.maximum(w, 0.0, out=w)
    return w


def matrix_singular_values(m: np.ndarray) -> np.ndarray:
    """Singular values of a general (rectangular) matrix, descending."""
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise ConfigError("matrix has non-finite entries")
    try:
        return np.linalg.svd(m, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"SVD (LAPACK gesdd) did not converge: {exc}") from None


def nuclear_norm(m: np.ndarray) -> float:
    """Sum of singular values."""
    return float(np.sum(matrix_singular_values(m)))


def features_from_normalized(normalized: NormalizedTrial, k: int = DEFAULT_K,
                             source: str = "gram") -> FeatureVector:
    """Top-*k* singular values of the nuclear matrix.

    ``source="signal"`` takes singular values of the normalized signal matrix
    itself instead (their squares are the Gram eigenvalues).
    """
    n_channels = normalized.phi.shape[1]
    if not 1 <= k <= n_channels:
        raise ConfigError(f"k must be in [1, {n_channels}], got {k}")
    if source == "gram":
        spectrum = singular_values(nuclear_matrix(normalized))
    elif source == "signal":
        spectrum = matrix_singular_values(normalized.phi)
    else:
        raise ConfigError(f"unknown feature source {source!r}")
    return FeatureVector(spectrum[:k].copy())


def spectrum(trial: Trial, region: RegionSpec | None = None,
             epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Full descending nuclear spectrum of a trial (optionally region-restricted)."""
    if region is not None:
        trial = region_select(trial, region)
    return singular_values(nuclear_matrix(normalize(trial, epsilon)))


def extract_features(trial: Trial, region: RegionSpec | None = None, k: int = DEFAULT_K,
                     epsilon: float = DEFAULT_EPSILON, source: str = "gram") -> FeatureVector:
    """region_select -> normalize -> nuclear_matrix -> singular_values -> first k."""
    if region is not None:
        if not 1 <= k <= len(region.channels):
            raise ConfigError(f"k must be in [1, {len(region.channels)}], got {k}")
        trial = region_select(trial, region)
    return features_from_normalized(normalize(trial, epsilon), k, source)


def thread_count(threads: int | None = None) -> int:
    """Worker count: explicit value, else ``NUCLEEG_THREADS``, else 1."""
    if threads is None:
        env = os.environ.get("NUCLEEG_THREADS", "").strip()
        if not env:
            return 1
        try:
            threads = int(env)
        except ValueError:
            raise ConfigError(f"NUCLEEG_THREADS must be an integer, got {env!r}") from None
    return max(1, int(threads))


def extract_many(trials: Sequence[Trial], region: RegionSpec | None = None, k: int = DEFAULT_K,
                 epsilon: float = DEFAULT_EPSILON, source: str = "gram",
                 threads: int | None = None) -> np.ndarray:
    """Feature matrix of shape ``(len(trials), k)``, rows in input order."""
    def one(t):
        return extract_features(t, region, k, epsilon, source).features

    workers = thread_count(threads)
    if workers > 1 and len(trials) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, trials))
    else:
        rows = [one(t) for t in trials]
    if not rows:
        return np.empty((0, k))
    return np.vstack(rows)


def write_feature_csv(path, trials: Sequence[Trial], X: np.ndarray, prefix: str = "f") -> None:
    """One row per trial: ``trial_id,label,subject,f1..fk``."""
    X = np.asarray(X, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial_id", "label", "subject"]
                   + [f"{prefix}{i + 1}" for i in range(X.shape[1] if X.ndim == 2 else 0)])
        for t, row in zip(trials, X):
            w.writerow([t.trial_id, t.label, t.subject] + [repr(float(v)) for v in row])


def read_feature_csv(path):
    """Returns ``(ids, labels, subjects, X)``; raises DataError on an empty file."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DataError(f"{path}: empty feature file")
    header, body = rows[0], rows[1:]
    if header[:3] != ["trial_id", "label", "subject"]:
        raise DataError(f"{path}: expected header trial_id,label,subject,f1..fk")
    if not body:
        raise DataError(f"{path}: feature file has no rows")
    k = len(header) - 3
    try:
        X = np.array([[float(v) for v in r[3:]] for r in body], dtype=float).reshape(len(body), k)
    except ValueError as exc:
        raise DataError(f"{path}: malformed feature row ({exc})") from None
    return [r[0] for r in body], [r[1] for r in body], [r[2] for r in body], X
