"""Trial data model, dataset ingestion, region selection, amplitude rejection
and cross-channel normalization.

A trial is a ``d x n`` matrix: rows are time samples, columns are channels.
Datasets on disk are a JSON manifest plus one headerless CSV per trial::

    {
      "channels": ["Fp1", "Fp2", ...],
      "regions": [{"name": "FRONT", "channel_indices": [0, 1, ...]}],
      "trials": [{"path": "trials/t0000.csv", "label": "LA", "subject": "s01"}],
      "samples_per_trial": 150
    }
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Hashable, Sequence

import numpy as np

from .errors import ConfigError, DataError, DimensionMismatchError, NonFiniteError

DEFAULT_REJECT_THRESHOLD = 90.0  # microvolts
DEFAULT_EPSILON = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Trial:
    """One event's multichannel recording.

    Attributes
    ----------
    samples : ndarray, shape (d, n)
        Rows are time samples, columns are channels.
    label : class tag
    subject : subject identifier
    trial_id : str
    """

    samples: np.ndarray
    label: Hashable
    subject: Hashable
    trial_id: str

    def __post_init__(self):
        samples = _frozen(self.samples)
        if samples.ndim != 2:
            raise DimensionMismatchError(
                f"trial {self.trial_id}: expected a 2-D matrix, got {samples.ndim}-D")
        d, n = samples.shape
        if d < 2 or n < 2:
            raise DimensionMismatchError(
                f"trial {self.trial_id}: need at least 2 samples and 2 channels, got {d}x{n}")
        if not np.all(np.isfinite(samples)):
            raise NonFiniteError(f"trial {self.trial_id}: non-finite value in samples")
        object.__setattr__(self, "samples", samples)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_channels(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class NormalizedTrial:
    """Cross-channel normalized trial.

    ``phi[t]`` is zero-mean with population variance 1 across channels, or
    all zeros where the source row had (numerically) no spread; ``degenerate``
    marks those rows.
    """

    phi: np.ndarray
    provenance: str
    degenerate: np.ndarray = field(default=None)

    def __post_init__(self):
        phi = _frozen(self.phi)
        object.__setattr__(self, "phi", phi)
        if self.degenerate is None:
            object.__setattr__(self, "degenerate", np.zeros(phi.shape[0], dtype=bool))

    @property
    def fully_nondegenerate(self) -> bool:
        return not bool(np.any(self.degenerate))


@dataclass(frozen=True)
class RegionSpec:
    name: str
    channels: tuple

    def __post_init__(self):
        chans = tuple(int(c) for c in self.channels)
        if not chans:
            raise ConfigError(f"region {self.name!r} has no channels")
        if len(set(chans)) != len(chans):
            raise ConfigError(f"region {self.name!r} lists a channel more than once")
        if min(chans) < 0:
            raise ConfigError(f"region {self.name!r} has a negative channel index")
        object.__setattr__(self, "channels", chans)

    @classmethod
    def all_channels(cls, n_channels: int) -> "RegionSpec":
        return cls("ALL", tuple(range(n_channels)))

    def to_json(self) -> dict:
        return {"name": self.name, "channel_indices": list(self.channels)}


# Nominal per-region channel counts for a 100-electrode cap. The real montage
# assignment is not published, so the preset lays the regions out as
# consecutive index blocks; the remaining 20 channels belong only to ALL.
REGION_COUNTS = {"TEMP": 8, "FRONT": 16, "CENT": 20, "PERI": 18, "OCCIP": 18}


def preset_regions(n_channels: int = 100) -> list[RegionSpec]:
    """Five named regions as consecutive blocks, plus ALL."""
    total = sum(REGION_COUNTS.values())
    if n_channels < total:
        raise ConfigError(f"preset layout needs at least {total} channels, got {n_channels}")
    regions, start = [], 0
    for name, count in REGION_COUNTS.items():
        regions.append(RegionSpec(name, tuple(range(start, start + count))))
        start += count
    regions.append(RegionSpec.all_channels(n_channels))
    return regions


@dataclass(frozen=True)
class DatasetManifest:
    channel_names: tuple
    regions: tuple
    trials: tuple  # of dicts: path, label, subject, trial_id
    samples_per_trial: int
    root: Path = Path(".")

    @property
    def labels(self) -> list:
        """Distinct labels in order of first appearance."""
        return list(dict.fromkeys(t["label"] for t in self.trials))

    def region(self, name: str) -> RegionSpec:
        for r in self.regions:
            if r.name == name:
                return r
        if name == "ALL":
            return RegionSpec.all_channels(len(self.channel_names))
        known = ", ".join(r.name for r in self.regions) or "none"
        raise ConfigError(f"unknown region {name!r} (manifest defines: {known})")

    def to_json(self) -> dict:
        return {
            "channels": list(self.channel_names),
            "regions": [r.to_json() for r in self.regions],
            "trials": [
                {"path": t["path"], "label": t["label"], "subject": t["subject"],
                 "trial_id": t["trial_id"]}
                for t in self.trials
            ],
            "samples_per_trial": self.samples_per_trial,
        }


def parse_manifest(doc: dict, root: Path | str = ".") -> DatasetManifest:
    try:
        channels = [str(c) for c in doc["channels"]]
        d = int(doc["samples_per_trial"])
        raw_trials = doc["trials"]
    except (KeyError, TypeError) as exc:
        raise DataError(f"manifest is missing a required field: {exc}") from None
    regions = []
    for r in doc.get("regions", []):
        spec = RegionSpec(str(r["name"]), tuple(r["channel_indices"]))
        if max(spec.channels) >= len(channels):
            raise ConfigError(
                f"region {spec.name!r} references channel {max(spec.channels)} "
                f"but the manifest has {len(channels)} channels")
        regions.append(spec)
    trials, seen = [], set()
    for entry in raw_trials:
        path = str(entry["path"])
        tid = str(entry.get("trial_id", Path(path).stem))
        if tid in seen:
            raise DataError(f"duplicate trial id {tid!r}")
        seen.add(tid)
        trials.append({"path": path, "label": str(entry["label"]),
                       "subject": str(entry["subject"]), "trial_id": tid})
    labels = set(t["label"] for t in trials)
    if len(labels) != 2:
        raise DataError(f"expected exactly 2 distinct labels, found {len(labels)}: {sorted(labels)}")
    return DatasetManifest(tuple(channels), tuple(regions), tuple(trials), d, Path(root))


def read_trial_csv(path: Path | str) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    return data


def write_trial_csv(path: Path | str, samples: np.ndarray) -> None:
    # 17 significant digits round-trips float64 exactly
    np.savetxt(path, samples, delimiter=",", fmt="%.17g")


def load_dataset(manifest_path: Path | str) -> tuple[DatasetManifest, list[Trial]]:
    """Read a manifest and all trial files it references, in manifest order.

    Raises
    ------
    FileNotFoundError
        Manifest or a trial file is missing.
    DimensionMismatchError
        A trial file's shape differs from ``samples_per_trial x len(channels)``.
    NonFiniteError
        A trial contains NaN or infinity.
    DataError
        Malformed manifest, or not exactly two distinct labels.
    """
    manifest_path = Path(manifest_path)
    with open(manifest_path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{manifest_path}: invalid JSON ({exc})") from None
    manifest = parse_manifest(doc, root=manifest_path.parent)
    n = len(manifest.channel_names)
    d = manifest.samples_per_trial
    trials = []
    for entry in manifest.trials:
        path = manifest.root / entry["path"]
        if not path.exists():
            raise FileNotFoundError(f"trial {entry['trial_id']}: file not found: {path}")
        try:
            samples = read_trial_csv(path)
        except ValueError as exc:
            raise DataError(f"trial {entry['trial_id']}: unparseable CSV ({exc})") from None
        if samples.shape != (d, n):
            raise DimensionMismatchError(
                f"trial {entry['trial_id']}: expected {d}x{n} (samples x channels), "
                f"found {samples.shape[0]}x{samples.shape[1]}")
        trials.append(Trial(samples, entry["label"], entry["subject"], entry["trial_id"]))
    return manifest, trials


def save_dataset(out_dir: Path | str, manifest: DatasetManifest, trials: Sequence[Trial]) -> Path:
    """Write trial CSVs and ``manifest.json`` under *out_dir*; returns the manifest path."""
    out_dir = Path(out_dir)
    by_id = {t.trial_id: t for t in trials}
    for entry in manifest.trials:
        path = out_dir / entry["path"]
        path.parent.mkdir(parents=True, exist_ok=True)
        write_trial_csv(path, by_id[entry["trial_id"]].samples)
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w") as fh:
        json.dump(manifest.to_json(), fh, indent=2)
        fh.write("\n")
    return manifest_path


def region_select(trial: Trial, region: RegionSpec) -> Trial:
    """Restrict *trial* to the region's columns, keeping their listed order."""
    if len(region.channels) < 2:
        raise ConfigError(f"region {region.name!r} must have at least 2 channels")
    bad = [c for c in region.channels if c >= trial.n_channels]
    if bad:
        raise ConfigError(
            f"region {region.name!r}: channel index {bad[0]} out of range "
            f"for a {trial.n_channels}-channel trial")
    return replace(trial, samples=trial.samples[:, list(region.channels)])


def amplitude_reject(trials: Sequence[Trial], threshold: float = DEFAULT_REJECT_THRESHOLD):
    """Split trials on peak absolute amplitude.

    A trial is rejected iff some ``|sample| > threshold``; a peak exactly at
    the threshold is kept.

    Returns
    -------
    kept : list of Trial
    rejected : list of str
        Trial ids, in input order.
    """
    if not threshold > 0:
        raise ConfigError(f"rejection threshold must be positive, got {threshold}")
    kept, rejected = [], []
    for t in trials:
        if np.max(np.abs(t.samples)) > threshold:
            rejected.append(t.trial_id)
        else:
            kept.append(t)
    return kept, rejected


def normalize_matrix(x: np.ndarray, epsilon: float = DEFAULT_EPSILON):
    """Per-row cross-channel standardization of a ``d x n`` array.

    Each row is centred on its channel mean and divided by the population
    standard deviation over channels. Rows whose standard deviation is below
    ``epsilon * max(1, max|row|)`` become all-zero.

    Returns ``(phi, degenerate_mask)``.
    """
    if not epsilon > 0:
        raise ConfigError(f"epsilon must be positive, got {epsilon}")
    x = np.asarray(x, dtype=float)
    y = x - x.mean(axis=1, keepdims=True)
    std = np.sqrt(np.mean(y * y, axis=1))
    scale = np.maximum(1.0, np.max(np.abs(x), axis=1))
    degenerate = std < epsilon * scale
    safe = np.where(degenerate, 1.0, std)
    phi = y / safe[:, None]
    phi[degenerate] = 0.0
    return phi, degenerate


def normalize(trial: Trial, epsilon: float = DEFAULT_EPSILON) -> NormalizedTrial:
    phi, degenerate = normalize_matrix(trial.samples, epsilon)
    return NormalizedTrial(phi, trial.trial_id, degenerate)
