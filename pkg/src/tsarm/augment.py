"""Eight time-series augmentations and positive-pair construction.

Every transform takes a 1-D series and an explicit ``numpy.random.Generator``
(ignored by the deterministic ones) and returns a new array of the same
length, except ``neighbor_pair`` which returns two halves.
"""

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError, ShapeError
from .numerics import as_series, dft, idft, resample_linear

# Method names as used in rankings; "no_pretrain" is the baseline slot.
AUGMENTATIONS = (
    "jittering", "scaling", "flipping", "permutation", "resizing",
    "time_masking", "freq_masking", "time_neighboring",
)
NO_PRETRAIN = "no_pretrain"
METHODS = AUGMENTATIONS + (NO_PRETRAIN,)

ALIASES = {
    "jitter": "jittering", "scale": "scaling", "flip": "flipping",
    "permute": "permutation", "resize": "resizing", "time_mask": "time_masking",
    "timemask": "time_masking", "freq_mask": "freq_masking", "freqmask": "freq_masking",
    "time_neighbor": "time_neighboring", "neighbor": "time_neighboring",
    "no_pretraining": NO_PRETRAIN, "none": NO_PRETRAIN,
}

DEFAULT_PARAMS = {
    "jittering": {"sigma": 0.1},
    "scaling": {"low": 0.5, "high": 1.5, "per_step": False},
    "flipping": {},
    "permutation": {"num_segments": 4},
    "resizing": {"crop_fraction": 0.5},
    "time_masking": {"mask_fraction": 0.2},
    "freq_masking": {"mask_fraction": 0.2},
    "time_neighboring": {},
}


def canonical_name(name):
    """Map a user-facing name or alias to its canonical method name."""
    key = str(name).strip().lower().replace("-", "_").replace(" ", "_")
    key = ALIASES.get(key, key)
    if key not in METHODS:
        raise ConfigError(f"unknown augmentation {name!r}; choose from {', '.join(METHODS)}")
    return key


def _fraction(value, name):
    if not 0.0 < value < 1.0:
        raise ConfigError(f"{name} must lie in (0, 1), got {value}")


def jitter(x, sigma, rng):
    """Add iid Gaussian noise with standard deviation ``sigma``."""
    x = as_series(x)
    if sigma <= 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    return x + rng.normal(0.0, sigma, x.shape[0])


def scale(x, scale_range, rng, per_step=False):
    """Multiply by a factor drawn from U[lo, hi] (one per sample or per step)."""
    x = as_series(x)
    lo, hi = scale_range
    if not 0.0 < lo <= hi:
        raise ConfigError(f"scale range must satisfy 0 < lo <= hi, got {scale_range}")
    s = rng.uniform(lo, hi, x.shape[0] if per_step else None)
    return x * s


def flip(x, rng=None):
    """Reverse the time axis."""
    return as_series(x)[::-1].copy()


def permute(x, num_segments, rng):
    """Cut into near-equal contiguous chunks and shuffle their order.

    Remainder samples go to the leading chunks.
    """
    x = as_series(x)
    if num_segments < 1 or num_segments > x.shape[0]:
        raise ConfigError(f"num_segments must be in 1..{x.shape[0]}, got {num_segments}")
    chunks = np.array_split(x, num_segments)
    order = rng.permutation(num_segments)
    return np.concatenate([chunks[i] for i in order])


def resize(x, crop_fraction, rng):
    """Crop a random window of ``floor(crop_fraction * N)`` points and stretch
    it back to ``N`` by linear interpolation.

    ``crop_fraction == 1`` keeps the whole series (identity).
    """
    x = as_series(x, min_len=2)
    if not 0.0 < crop_fraction <= 1.0:
        raise ConfigError(f"crop_fraction must lie in (0, 1], got {crop_fraction}")
    n = x.shape[0]
    w = int(math.floor(crop_fraction * n + 1e-9))
    if w < 2:
        raise ConfigError(f"crop window of {w} points is too short")
    start = int(rng.integers(0, n - w + 1))
    return resample_linear(x[start:start + w], n)


def time_mask(x, mask_fraction, rng):
    """Zero a random contiguous block of ``ceil(mask_fraction * N)`` points."""
    x = as_series(x)
    _fraction(mask_fraction, "mask_fraction")
    n = x.shape[0]
    m = min(n, max(1, int(math.ceil(mask_fraction * n - 1e-9))))
    start = int(rng.integers(0, n - m + 1))
    out = x.copy()
    out[start:start + m] = 0.0
    return out


def freq_bins(n):
    """Non-DC bins that can be masked: 1..floor(N/2) (Nyquist included)."""
    return np.arange(1, n // 2 + 1)


def freq_mask_bins(x, bins):
    """Zero the given positive-frequency bins and their conjugate partners."""
    x = as_series(x)
    n = x.shape[0]
    spec = dft(x)
    for k in bins:
        k = int(k)
        if not 1 <= k <= n // 2:
            raise ConfigError(f"bin {k} is not a maskable non-DC bin for N={n}")
        spec[k] = 0.0
        spec[n - k] = 0.0
    return idft(spec)


def freq_mask(x, mask_fraction, rng):
    """Zero ``ceil(mask_fraction * N/2)`` random conjugate bin pairs."""
    x = as_series(x)
    _fraction(mask_fraction, "mask_fraction")
    cand = freq_bins(x.shape[0])
    if cand.size == 0:
        return x.copy()
    m = min(cand.size, int(math.ceil(mask_fraction * x.shape[0] / 2 - 1e-9)))
    chosen = rng.choice(cand, size=m, replace=False)
    return freq_mask_bins(x, np.sort(chosen))


def neighbor_pair(long_series):
    """Split into first and second half; an odd trailing point is dropped."""
    x = as_series(long_series)
    if x.shape[0] < 4:
        raise ShapeError("time-neighboring needs at least 4 points")
    h = x.shape[0] // 2
    return x[:h].copy(), x[h:2 * h].copy()


@dataclass(frozen=True)
class Augmentation:
    """A named transform with its parameters, e.g. ``Augmentation("jittering")``."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        kind = canonical_name(self.kind)
        if kind == NO_PRETRAIN:
            raise ConfigError("no_pretrain is a baseline, not an augmentation")
        unknown = set(self.params) - set(DEFAULT_PARAMS[kind])
        if unknown:
            raise ConfigError(f"unknown parameters for {kind}: {sorted(unknown)}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", {**DEFAULT_PARAMS[kind], **self.params})

    def __hash__(self):
        return hash((self.kind, json.dumps(self.params, sort_keys=True)))

    def __call__(self, x, rng):
        p = self.params
        if self.kind == "jittering":
            return jitter(x, p["sigma"], rng)
        if self.kind == "scaling":
            return scale(x, (p["low"], p["high"]), rng, p["per_step"])
        if self.kind == "flipping":
            return flip(x)
        if self.kind == "permutation":
            return permute(x, p["num_segments"], rng)
        if self.kind == "resizing":
            return resize(x, p["crop_fraction"], rng)
        if self.kind == "time_masking":
            return time_mask(x, p["mask_fraction"], rng)
        if self.kind == "freq_masking":
            return freq_mask(x, p["mask_fraction"], rng)
        raise ConfigError("time_neighboring builds a pair; use make_pair or neighbor_pair")

    @property
    def deterministic(self):
        return self.kind in ("flipping", "time_neighboring")

    def to_json(self, seed=None):
        return {"kind": self.kind, "params": dict(self.params), "seed": seed}

    @classmethod
    def from_json(cls, obj):
        """Inverse of ``to_json``; returns ``(augmentation, seed)``."""
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ConfigError("augmentation config needs a 'kind' field")
        return cls(obj["kind"], dict(obj.get("params") or {})), obj.get("seed")


class PairMode(str, Enum):
    SINGLE = "single"
    DOUBLE = "double"


@dataclass
class ContrastivePair:
    view_a: np.ndarray
    view_b: np.ndarray
    mode: PairMode


def make_pair(x, mode, aug1, aug2=None, rng=None):
    """Positive pair for contrastive training.

    Single view: ``(x, aug1(x))``. Double view: ``(aug1(x), aug2(x))`` with
    two independent child streams, so the same stochastic augmentation
    still yields two different views. Time-neighboring ignores the mode
    and pairs the two halves of ``x``.
    """
    mode = PairMode(mode)
    rng = np.random.default_rng() if rng is None else rng
    x = as_series(x)
    if aug1.kind == "time_neighboring":
        a, b = neighbor_pair(x)
        return ContrastivePair(a, b, mode)
    if mode is PairMode.SINGLE:
        return ContrastivePair(x.copy(), aug1(x, rng), mode)
    if aug2 is None:
        raise ConfigError("double-view pairs need a second augmentation")
    if aug2.kind == "time_neighboring":
        raise ConfigError("time_neighboring cannot be the second view of a double-view pair")
    ra, rb = rng.spawn(2)
    return ContrastivePair(aug1(x, ra), aug2(x, rb), mode)
