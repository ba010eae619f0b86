"""Numeric kernels shared by the rest of the package.

Every function takes plain sequences or 1-D numpy arrays and returns new
arrays; inputs are never modified.
"""

import math

import numpy as np

from . import kernels
from .errors import ConfigError, DegenerateVector, NonFiniteError, ShapeError


def as_series(x, name="x", min_len=1):
    """Return ``x`` as a finite 1-D float64 array, validating its length."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_len:
        raise ShapeError(f"{name} needs at least {min_len} values, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains NaN or infinite values")
    return arr


def cosine_similarity(a, b):
    """Cosine of the angle between two equal-length vectors.

    Raises DegenerateVector when either vector is all zeros: returning 0
    would silently bias any score built on top of it.
    """
    a = as_series(a, "a")
    b = as_series(b, "b")
    if a.shape != b.shape:
        raise ShapeError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise DegenerateVector("cosine similarity of a zero vector is undefined")
    c = float(np.dot(a, b) / (na * nb))
    return min(1.0, max(-1.0, c))


def mean_power(x):
    """Mean squared value, (1/N) * sum(x_i**2)."""
    x = as_series(x)
    return float(np.dot(x, x) / x.shape[0])


def dft(x):
    """Discrete Fourier transform of a real series (complex array, length N)."""
    return np.fft.fft(as_series(x))


def idft(spectrum):
    """Inverse transform back to a real series.

    The imaginary residue of a conjugate-symmetric spectrum is rounding
    noise and is dropped.
    """
    s = np.asarray(spectrum, dtype=np.complex128)
    if s.ndim != 1 or s.shape[0] < 1:
        raise ShapeError("spectrum must be a non-empty 1-D array")
    return np.fft.ifft(s).real.copy()


def window_points(span, n):
    """Number of points in a loess window covering ``span`` of ``n`` samples."""
    return max(1, int(math.ceil(span * n - 1e-9)))


def loess_smooth(x, span, degree=1):
    """Locally weighted polynomial smoother with tricube weights.

    Each output point is the value at that index of a degree-``degree``
    polynomial fitted by weighted least squares to the nearest
    ``ceil(span * N)`` samples.

    Parameters
    ----------
    x : array_like
        Evenly spaced series.
    span : float
        Fraction of the series inside each local window, in (0, 1].
    degree : {0, 1, 2}
        Local polynomial degree.
    """
    x = as_series(x)
    if degree not in (0, 1, 2):
        raise ConfigError(f"degree must be 0, 1 or 2, got {degree}")
    if not 0.0 < span <= 1.0:
        raise ConfigError(f"span must lie in (0, 1], got {span}")
    n = x.shape[0]
    if span * n < degree + 1 - 1e-9:
        raise ConfigError(
            f"window of {span * n:.3g} points is too small for degree {degree}"
        )
    return kernels.loess_grid(x, window_points(span, n), degree)


def resample_linear(x, new_len):
    """Linearly interpolate ``x`` onto ``new_len`` evenly spaced points.

    Both endpoints are preserved exactly.
    """
    x = as_series(x, min_len=2)
    if int(new_len) != new_len or new_len < 2:
        raise ShapeError(f"new_len must be an integer >= 2, got {new_len}")
    new_len = int(new_len)
    n = x.shape[0]
    if new_len == n:
        return x.copy()
    grid = np.linspace(0.0, n - 1.0, new_len)
    return np.interp(grid, np.arange(n, dtype=np.float64), x)
