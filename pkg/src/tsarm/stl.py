"""Seasonal-trend decomposition by loess (STL) for samples and datasets.

Only the inner loop runs (no robustness iterations). Spans follow the
usual defaults: 7 points per cycle-subseries smoother, trend window the next
odd integer at or above ``1.5 * period / (1 - 1.5 / seasonal_span)``,
low-pass window the smallest odd integer above the period.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigError, ShapeError
from .numerics import as_series, mean_power
from .series import LabeledDataset


def _next_odd(v):
    v = int(math.ceil(v - 1e-12))
    return v if v % 2 else v + 1


@dataclass
class Decomposition:
    trend: np.ndarray
    seasonal: np.ndarray
    residual: np.ndarray
    period: int

    @property
    def input(self):
        return self.trend + self.seasonal + self.residual

    def to_csv(self, path, x=None):
        """Write columns t,input,trend,seasonal,residual (t starts at 0)."""
        x = self.input if x is None else np.asarray(x, dtype=np.float64)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "input", "trend", "seasonal", "residual"])
            for i in range(x.shape[0]):
                w.writerow([i] + [repr(float(v)) for v in
                                  (x[i], self.trend[i], self.seasonal[i], self.residual[i])])


def stl_spans(period, seasonal_span=7):
    """Return ``(seasonal, trend, lowpass)`` window lengths for ``period``."""
    ns = _next_odd(max(3, seasonal_span))
    nt = _next_odd(1.5 * period / (1.0 - 1.5 / ns))
    nl = _next_odd(period + 1)
    return ns, nt, nl


def stl_decompose(x, period, iterations=2, seasonal_span=7):
    """Split ``x`` into trend, seasonal and residual with STL.

    ``residual`` is defined as the remainder, so the three parts add back to
    ``x`` up to rounding.
    """
    x = as_series(x)
    period = int(period)
    if period < 2:
        raise ConfigError(f"period must be at least 2, got {period}")
    if x.shape[0] < 2 * period:
        raise ConfigError(f"series of length {x.shape[0]} is too short for period {period}")
    if iterations < 1:
        raise ConfigError("iterations must be positive")
    ns, nt, nl = stl_spans(period, seasonal_span)
    trend, seasonal = kernels.stl_inner(x, period, ns, nt, nl, 1, 1, 1, int(iterations))
    return Decomposition(trend, seasonal, x - trend - seasonal, period)


def default_periods(n):
    """Candidate periods N/2, N/4, N/8, N/16 (floored, unique, at least 2)."""
    out = []
    for d in (2, 4, 8, 16):
        p = n // d
        if p >= 2 and p not in out:
            out.append(p)
    return out


def fold_one_period(seasonal, period):
    """Average a seasonal series over its complete cycles."""
    seasonal = as_series(seasonal)
    cycles = seasonal.shape[0] // period
    if cycles < 1:
        raise ShapeError("series shorter than one period")
    return seasonal[:cycles * period].reshape(cycles, period).mean(axis=0)


@dataclass
class DatasetProfile:
    """Averaged STL components of a dataset at one period.

    ``mean_trend`` is the plain average. ``aligned_trend`` averages the
    per-class mean trends after orienting each one to rise with time, so
    classes with mirrored slopes do not cancel. ``trend_power`` and
    ``seasonal_power`` are averages of per-sample component powers.
    """

    period: int
    mean_trend: np.ndarray
    mean_seasonal_one_period: np.ndarray
    aligned_trend: np.ndarray
    trend_power: float
    seasonal_power: float
    n_samples: int
    periods_used: list = field(default_factory=list)

    def __post_init__(self):
        if not self.periods_used:
            self.periods_used = [self.period]

    def to_json(self):
        return {
            "period": self.period,
            "periods_used": list(self.periods_used),
            "n_samples": self.n_samples,
            "mean_trend": self.mean_trend.tolist(),
            "aligned_trend": self.aligned_trend.tolist(),
            "mean_seasonal_one_period": self.mean_seasonal_one_period.tolist(),
            "trend_power": self.trend_power,
            "seasonal_power": self.seasonal_power,
        }


def _as_dataset(ds):
    if isinstance(ds, LabeledDataset):
        return ds
    if isinstance(ds, np.ndarray) and ds.ndim == 2:
        return LabeledDataset(ds, np.zeros(ds.shape[0], dtype=np.int64))
    return LabeledDataset.from_samples(list(ds))


def _aligned(trends, labels):
    ramp = np.arange(1, trends.shape[1] + 1, dtype=np.float64)
    parts = []
    for c in np.unique(labels):
        m = trends[labels == c].mean(axis=0)
        parts.append(-m if np.dot(m, ramp) < 0 else m)
    return np.mean(parts, axis=0)


def dataset_profile(ds, periods=None, iterations=2, seasonal_span=7):
    """Profile a dataset at each period; returns one DatasetProfile per period."""
    ds = _as_dataset(ds)
    n = ds.length
    periods = default_periods(n) if periods is None else [int(p) for p in periods]
    if not periods:
        raise ConfigError(f"no valid candidate period for series length {n}")
    # Sort samples so the averages do not depend on input order.
    order = np.lexsort(ds.X.T[::-1])
    X, y = ds.X[order], ds.y[order]
    profiles = []
    for p in periods:
        trends = np.empty_like(X)
        seas = np.empty_like(X)
        for i, x in enumerate(X):
            d = stl_decompose(x, p, iterations, seasonal_span)
            trends[i] = d.trend
            seas[i] = d.seasonal
        profiles.append(DatasetProfile(
            period=p,
            mean_trend=trends.mean(axis=0),
            mean_seasonal_one_period=fold_one_period(seas.mean(axis=0), p),
            aligned_trend=_aligned(trends, y),
            trend_power=float(np.mean([mean_power(t) for t in trends])),
            seasonal_power=float(np.mean([mean_power(s) for s in seas])),
            n_samples=X.shape[0],
        ))
    return profiles
