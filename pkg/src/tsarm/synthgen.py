"""Synthetic trend + seasonality + residual datasets (groups A-D, suffixes 1-3).

A sample is ``w1 * T + (1 - w1) * S + w3 * R`` with a linear or power-law
trend ``T``, a trigonometric or Morlet seasonality ``S`` and Gaussian noise
``R``. Six classes per dataset come from two trend-slope ranges crossed with
three seasonal-shape ranges.
"""

import math
from dataclasses import asdict, dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import ConfigError
from .numerics import mean_power
from .series import LabeledDataset

MORLET_NORM = math.pi ** -0.25


class TrendKind(str, Enum):
    LINEAR = "linear"
    NONLINEAR = "nonlinear"


class SeasonKind(str, Enum):
    TRIG = "trig"
    MORLET = "morlet"


GROUPS = {
    "A": (TrendKind.LINEAR, SeasonKind.TRIG),
    "B": (TrendKind.LINEAR, SeasonKind.MORLET),
    "C": (TrendKind.NONLINEAR, SeasonKind.TRIG),
    "D": (TrendKind.NONLINEAR, SeasonKind.MORLET),
}
SUFFIX_W1 = {1: 0.1, 2: 0.5, 3: 0.9}

ALPHA_RANGES = ((0.1, 0.3), (-0.3, -0.1))
BETA_RANGES = {
    SeasonKind.TRIG: ((0.05, 0.15), (0.45, 0.55), (0.85, 0.95)),
    SeasonKind.MORLET: ((3.5, 4.5), (4.5, 5.5), (5.5, 6.5)),
}

DEFAULT_SEED = 20240521


@dataclass(frozen=True)
class DatasetId:
    group: str
    suffix: int

    def __post_init__(self):
        if self.group not in GROUPS:
            raise ConfigError(f"unknown dataset group {self.group!r}")
        if self.suffix not in SUFFIX_W1:
            raise ConfigError(f"dataset suffix must be 1, 2 or 3, got {self.suffix!r}")

    @classmethod
    def parse(cls, text):
        text = str(text).strip().upper()
        if len(text) != 2 or not text[1].isdigit():
            raise ConfigError(f"dataset id must look like 'A1', got {text!r}")
        return cls(text[0], int(text[1]))

    @classmethod
    def from_parts(cls, trend, season, w1):
        group = next(g for g, ts in GROUPS.items() if ts == (TrendKind(trend), SeasonKind(season)))
        suffix = next((s for s, w in SUFFIX_W1.items() if abs(w - w1) < 1e-12), None)
        if suffix is None:
            raise ConfigError(f"w1 must be one of 0.1, 0.5, 0.9, got {w1}")
        return cls(group, suffix)

    @property
    def trend(self):
        return GROUPS[self.group][0]

    @property
    def season(self):
        return GROUPS[self.group][1]

    @property
    def w1(self):
        return SUFFIX_W1[self.suffix]

    def __str__(self):
        return f"{self.group}{self.suffix}"


ALL_DATASET_IDS = tuple(DatasetId(g, s) for g in "ABCD" for s in (1, 2, 3))


@dataclass(frozen=True)
class ClassSpec:
    alpha_range: tuple
    beta_range: tuple
    label: int


def class_specs(season):
    """The six (alpha, beta) class boxes for a seasonality family."""
    season = SeasonKind(season)
    return [
        ClassSpec(ar, br, 3 * i + j)
        for i, ar in enumerate(ALPHA_RANGES)
        for j, br in enumerate(BETA_RANGES[season])
    ]


@dataclass
class SynthConfig:
    """Generation settings.

    ``w1`` is ``None`` to take the weight from the dataset suffix.
    ``normalize`` rescales each component family to unit average RMS before
    weighting so ``w1`` actually controls the trend/season balance;
    ``normalize=False`` gives the raw additive model.
    """

    sample_len: int = 100
    w1: float | None = None
    w3: float = 0.3
    samples_per_class: int = 1000
    seed: int = DEFAULT_SEED
    cycles_per_sample: float = 4.0
    phase_jitter: bool = False
    normalize: bool = True

    def __post_init__(self):
        if self.sample_len < 2:
            raise ConfigError("sample_len must be at least 2")
        if self.samples_per_class < 1:
            raise ConfigError("samples_per_class must be positive")
        if self.cycles_per_sample <= 0:
            raise ConfigError("cycles_per_sample must be positive")
        if self.w1 is not None and not 0.0 <= self.w1 <= 1.0:
            raise ConfigError("w1 must lie in [0, 1]")

    @property
    def lam(self):
        return 2.0 * math.pi * self.cycles_per_sample / self.sample_len

    @property
    def period(self):
        """Seasonal period in samples (also the Morlet tiling length)."""
        return max(2, int(round(self.sample_len / self.cycles_per_sample)))


def time_grid(length):
    return np.arange(1, length + 1, dtype=np.float64)


def gen_trend(kind, length, alpha):
    """``alpha * t`` (linear) or ``t ** alpha`` (nonlinear) on t = 1..length."""
    t = time_grid(length)
    if TrendKind(kind) is TrendKind.LINEAR:
        return alpha * t
    return t ** alpha


def gen_seasonality(kind, length, beta, lam=None, phi=0.0, period=None):
    """Seasonal component on t = 1..length.

    Trig: ``beta*sin(lam*t - phi) + (1-beta)*cos(lam*t - phi)``.
    Morlet: real part of ``pi**-0.25 * exp(i*beta*u) * exp(-u**2/2)``. With
    ``period=None`` u spans [-4, 4] once over the whole sample (one centred
    pulse); otherwise the pulse repeats every ``period`` samples.
    """
    if length < 2:
        raise ConfigError("seasonality needs at least 2 points")
    if SeasonKind(kind) is SeasonKind.TRIG:
        if lam is None:
            raise ConfigError("trig seasonality needs lam")
        arg = lam * time_grid(length) - phi
        return beta * np.sin(arg) + (1.0 - beta) * np.cos(arg)
    if period is None:
        u = np.linspace(-4.0, 4.0, length)
    else:
        if period < 2:
            raise ConfigError("Morlet period must be at least 2")
        u = -4.0 + 8.0 * (np.arange(length) % period) / (period - 1)
    return MORLET_NORM * np.cos(beta * u) * np.exp(-0.5 * u * u)


def _season_period(kind, cfg):
    return cfg.period if SeasonKind(kind) is SeasonKind.MORLET else None


@lru_cache(maxsize=64)
def _trend_ref(kind, length):
    mids = [sum(r) / 2 for r in ALPHA_RANGES]
    return math.sqrt(np.mean([mean_power(gen_trend(kind, length, a)) for a in mids]))


@lru_cache(maxsize=64)
def _season_ref(kind, length, lam, period):
    mids = [sum(r) / 2 for r in BETA_RANGES[SeasonKind(kind)]]
    return math.sqrt(np.mean([
        mean_power(gen_seasonality(kind, length, b, lam, 0.0, period)) for b in mids
    ]))


def component_scales(trend, season, cfg, length=None):
    """Divisors applied to T and S when ``cfg.normalize`` is set."""
    if not cfg.normalize:
        return 1.0, 1.0
    n = cfg.sample_len if length is None else length
    trend, season = TrendKind(trend), SeasonKind(season)
    return (_trend_ref(trend, n),
            _season_ref(season, n, cfg.lam, _season_period(season, cfg)))


def clean_signal(trend, season, cfg, alpha, beta, phi=0.0, w1=0.5, length=None):
    """Noise-free ``w1*T + (1-w1)*S`` for one parameter draw."""
    n = cfg.sample_len if length is None else length
    ts, ss = component_scales(trend, season, cfg, n)
    tr = gen_trend(trend, n, alpha) / ts
    se = gen_seasonality(season, n, beta, cfg.lam, phi, _season_period(season, cfg)) / ss
    return w1 * tr + (1.0 - w1) * se


def synthesize_sample(trend, season, cfg, alpha, beta, rng, phi=0.0, length=None):
    """One sample ``w1*T + (1-w1)*S + w3*R`` with ``R ~ N(0, 1)`` from ``rng``."""
    n = cfg.sample_len if length is None else length
    w1 = 0.5 if cfg.w1 is None else cfg.w1
    x = clean_signal(trend, season, cfg, alpha, beta, phi, w1, n)
    return x + cfg.w3 * rng.standard_normal(n)


def sample_rng(seed, dataset_id, label, index):
    """Independent stream for one sample, stable under any generation order."""
    did = DatasetId.parse(str(dataset_id))
    key = [int(seed) & (2**64 - 1), "ABCD".index(did.group), did.suffix, int(label), int(index)]
    return np.random.default_rng(np.random.SeedSequence(key))


def gen_dataset(dataset_id, cfg=None, neighbor_context=False):
    """Generate the six-class dataset ``dataset_id``.

    Parameters drawn per sample: alpha and beta uniformly inside the class
    box, phi uniformly in [0, 2*pi) for trig seasonality when
    ``cfg.phase_jitter`` is on. ``neighbor_context`` additionally renders each
    sample over twice the length (``X_long``) for the time-neighboring pair.
    """
    did = dataset_id if isinstance(dataset_id, DatasetId) else DatasetId.parse(dataset_id)
    cfg = SynthConfig() if cfg is None else cfg
    w1 = did.w1 if cfg.w1 is None else cfg.w1
    run_cfg = SynthConfig(**{**asdict(cfg), "w1": w1})
    n = cfg.sample_len
    gen_len = 2 * n if neighbor_context else n
    rows, labels, params = [], [], []
    for spec in class_specs(did.season):
        for i in range(cfg.samples_per_class):
            rng = sample_rng(cfg.seed, did, spec.label, i)
            alpha = rng.uniform(*spec.alpha_range)
            beta = rng.uniform(*spec.beta_range)
            phi = 0.0
            if cfg.phase_jitter and did.season is SeasonKind.TRIG:
                phi = rng.uniform(0.0, 2.0 * math.pi)
            rows.append(synthesize_sample(did.trend, did.season, run_cfg, alpha, beta, rng, phi, gen_len))
            labels.append(spec.label)
            params.append((alpha, beta, phi))
    X = np.stack(rows)
    meta = {
        "dataset_id": str(did),
        "seed": int(cfg.seed),
        "config": asdict(cfg),
        "w1": w1,
        "trend": did.trend.value,
        "season": did.season.value,
        "period": cfg.period,
    }
    ds = LabeledDataset(X[:, :n], np.asarray(labels), meta, X if neighbor_context else None)
    ds.params = np.asarray(params)
    return ds
