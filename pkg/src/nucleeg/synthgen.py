"""Seeded synthetic two-class trials and blink-like artifact injection.

Each class c owns a channel-mixing matrix ``B_c`` (n x r_max) whose columns
beyond the class rank r_c are zero. A trial is ``Z @ B_c.T + noise`` with
standard-normal latent sources ``Z`` (d x r_max). The classes differ only
in correlation structure (how many latent sources drive the channels),
which is the part that survives cross-channel normalization. With
``separation < 1`` both mixing matrices are blended toward a shared full-rank
matrix; at 0 the classes are identically distributed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .signal_core import DatasetManifest, RegionSpec, Trial, preset_regions


@dataclass(frozen=True)
class GeneratorConfig:
    n_channels: int = 16
    d_samples: int = 150
    trials_per_class: int = 300
    subjects: int = 34
    separation: float = 1.0
    seed: int = 0
    class_factor_ranks: tuple = (2, 8)
    class_labels: tuple = ("A", "B")
    amplitude: float = 10.0  # per-channel signal std, microvolt scale
    noise: float = 0.05  # sensor noise std relative to amplitude

    def validate(self) -> None:
        if self.n_channels < 2 or self.d_samples < 2:
            raise ConfigError("need at least 2 channels and 2 samples per trial")
        if self.trials_per_class < 1:
            raise ConfigError("trials_per_class must be positive")
        if not 1 <= self.subjects <= 2 * self.trials_per_class:
            raise ConfigError(
                f"subjects must be in [1, {2 * self.trials_per_class}], got {self.subjects}")
        if not self.separation >= 0:
            raise ConfigError(f"separation must be >= 0, got {self.separation}")
        ranks = tuple(self.class_factor_ranks)
        if len(ranks) != 2 or not all(1 <= r <= self.n_channels for r in ranks):
            raise ConfigError(f"class ranks must be two integers in [1, {self.n_channels}]")
        if len(self.class_labels) != 2 or self.class_labels[0] == self.class_labels[1]:
            raise ConfigError("need two distinct class labels")
        if not self.amplitude > 0 or self.noise < 0:
            raise ConfigError("amplitude must be positive and noise non-negative")


@dataclass(frozen=True)
class ArtifactConfig:
    rate: float = 0.3
    amplitude: float = 90.0
    width: int = 20
    seed: int = 0
    channel_fraction: float = 0.25  # share of channels hit in an affected trial

    def validate(self, d_samples: int | None = None) -> None:
        if not 0 <= self.rate <= 1:
            raise ConfigError(f"artifact rate must be in [0, 1], got {self.rate}")
        if self.width < 1 or (d_samples is not None and self.width >= d_samples):
            raise ConfigError(f"artifact width must be in [1, d_samples), got {self.width}")
        if not 0 < self.channel_fraction <= 1:
            raise ConfigError("channel_fraction must be in (0, 1]")


def _mixing(rng: np.random.Generator, n: int, rank: int, r_max: int) -> np.ndarray:
    b = rng.standard_normal((n, r_max))
    b[:, rank:] = 0.0
    # unit expected variance per channel regardless of rank
    return b / math.sqrt(rank)


def generate_dataset(cfg: GeneratorConfig) -> tuple[list[Trial], DatasetManifest]:
    """Trials of class 0 then class 1; subject ``i % subjects`` for trial i."""
    cfg.validate()
    n, d = cfg.n_channels, cfg.d_samples
    ranks = tuple(int(r) for r in cfg.class_factor_ranks)
    r_max = max(ranks)
    rng = np.random.default_rng(cfg.seed)
    common = _mixing(rng, n, r_max, r_max)
    own = [_mixing(rng, n, r, r_max) for r in ranks]
    s = cfg.separation
    # s > 1 extrapolates past the class matrices
    mixing = [(1.0 - s) * common + s * b for b in own]
    width = len(str(2 * cfg.trials_per_class - 1))
    sub_width = len(str(cfg.subjects - 1))
    trials, entries = [], []
    for c, label in enumerate(cfg.class_labels):
        for _ in range(cfg.trials_per_class):
            idx = len(trials)
            z = rng.standard_normal((d, r_max))
            eps = rng.standard_normal((d, n)) * cfg.noise
            x = cfg.amplitude * (z @ mixing[c].T + eps)
            tid = f"t{idx:0{width}d}"
            subject = f"s{idx % cfg.subjects:0{sub_width}d}"
            trials.append(Trial(x, label, subject, tid))
            entries.append({"path": f"trials/{tid}.csv", "label": label,
                            "subject": subject, "trial_id": tid})
    regions = [RegionSpec.all_channels(n)]
    if n >= 100:
        regions = preset_regions(n)
    manifest = DatasetManifest(
        tuple(f"ch{i:02d}" for i in range(n)), tuple(regions), tuple(entries), d)
    return trials, manifest


def half_cosine(width: int) -> np.ndarray:
    """Unit-peak half-cosine pulse; the peak sits at index ``width // 2``."""
    j = np.arange(width)
    return np.cos(np.pi * (j - width // 2) / width)


def inject_artifacts(trials: Sequence[Trial], cfg: ArtifactConfig) -> list[Trial]:
    """Add a half-cosine pulse to ``round(rate * len(trials))`` seeded trials.

    Each affected trial gets the pulse at one seeded onset on a seeded subset
    of channels; every other sample, and every unaffected trial, is left
    bit-identical.
    """
    trials = list(trials)
    if not trials:
        return []
    d = trials[0].n_samples
    cfg.validate(d)
    n_hit = int(math.floor(cfg.rate * len(trials) + 0.5))
    if n_hit == 0:
        return trials
    rng = np.random.default_rng(cfg.seed)
    chosen = sorted(int(i) for i in rng.choice(len(trials), size=n_hit, replace=False))
    pulse = cfg.amplitude * half_cosine(cfg.width)
    out = list(trials)
    for i in chosen:
        t = trials[i]
        if t.n_samples <= cfg.width:
            raise ConfigError(f"trial {t.trial_id} is shorter than the artifact width")
        n_ch = max(1, int(math.floor(cfg.channel_fraction * t.n_channels + 0.5)))
        channels = np.sort(rng.choice(t.n_channels, size=n_ch, replace=False))
        onset = int(rng.integers(0, t.n_samples - cfg.width + 1))
        x = t.samples.copy()
        x[onset:onset + cfg.width, channels] += pulse[:, None]
        out[i] = replace(t, samples=x)
    return out


def artifact_mask(before: Trial, after: Trial) -> np.ndarray:
    """Boolean ``d x n`` mask of entries that differ between two versions of a trial."""
    return before.samples != after.samples
