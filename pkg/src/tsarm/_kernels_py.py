"""Pure-Python/numpy twin of ``_kernels.pyx``.

Used when the compiled extension is unavailable or ``TSARM_PURE_PYTHON=1``.
Keep the control flow identical to the Cython source.
"""

import numpy as np


def _weights(xs, left, right, h):
    pos = np.arange(left, right + 1, dtype=np.float64)
    r = np.abs(pos - xs)
    w = np.zeros_like(pos)
    inside = r <= 0.999 * h
    near = r <= 0.001 * h
    w[inside] = (1.0 - (r[inside] / h) ** 3) ** 3
    w[near] = 1.0
    return pos, w


def _solve3(m, b):
    # Partial pivoting with the compiled kernel's singularity threshold.
    m = m.copy()
    b = b.copy()
    scale = np.abs(m).max()
    if scale == 0.0:
        return None
    for k in range(3):
        p = k + int(np.argmax(np.abs(m[k:, k])))
        if abs(m[p, k]) <= 1e-13 * scale:
            return None
        if p != k:
            m[[k, p]] = m[[p, k]]
            b[[k, p]] = b[[p, k]]
        for i in range(k + 1, 3):
            t = m[i, k] / m[k, k]
            m[i, k:] -= t * m[k, k:]
            b[i] -= t * b[k]
    out = np.zeros(3)
    for i in range(2, -1, -1):
        out[i] = (b[i] - m[i, i + 1:] @ out[i + 1:]) / m[i, i]
    return out


def _est(y, n, q, degree, xs, left, right):
    span = float(n - 1)
    h = max(xs - left, right - xs)
    if q > n:
        h += float((q - n) // 2)
    pos, w = _weights(xs, left, right, h)
    count = int(np.count_nonzero(w > 0.0))
    widen = 0
    while count < degree + 1 and count < right - left + 1 and widen < 4:
        h += 1.0
        pos, w = _weights(xs, left, right, h)
        count = int(np.count_nonzero(w > 0.0))
        widen += 1
    total = w.sum()
    if total <= 0.0:
        return 0.0, False
    w = w / total
    seg = y[left:right + 1]
    if degree == 2 and h > 0.0 and count >= 3:
        z = (pos - xs) / h
        v = np.vander(z, 3, increasing=True)
        m = v.T @ (w[:, None] * v)
        rhs = v.T @ (w * seg)
        coef = _solve3(m, rhs)
        if coef is not None:
            return float(coef[0]), True
    if degree >= 1 and h > 0.0:
        a = float(np.dot(w, pos))
        b = xs - a
        c = float(np.dot(w, (pos - a) ** 2))
        if np.sqrt(c) > 0.001 * span:
            b /= c
            w = w * (b * (pos - a) + 1.0)
    return float(np.dot(w, seg)), True


def _ess(y, q, degree):
    n = y.shape[0]
    out = np.empty(n, dtype=np.float64)
    if n < 2:
        out[:] = y
        return out
    if q >= n:
        for i in range(n):
            v, ok = _est(y, n, q, degree, float(i), 0, n - 1)
            out[i] = v if ok else y[i]
        return out
    nsh = (q + 1) // 2
    left, right = 0, q - 1
    for i in range(n):
        if i >= nsh and right != n - 1:
            left += 1
            right += 1
        v, ok = _est(y, n, q, degree, float(i), left, right)
        out[i] = v if ok else y[i]
    return out


def _moving_average(x, length):
    c = np.cumsum(np.concatenate(([0.0], x)))
    return (c[length:] - c[:-length]) / length


def loess_at(y, xs, q, degree, left, right):
    y = np.ascontiguousarray(y, dtype=np.float64)
    return _est(y, y.shape[0], q, degree, float(xs), left, right)


def loess_grid(y, q, degree):
    return _ess(np.ascontiguousarray(y, dtype=np.float64), q, degree)


def stl_inner(y, period, seasonal_span, trend_span, lowpass_span,
              seasonal_deg, trend_deg, lowpass_deg, iterations):
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = y.shape[0]
    p = period
    trend = np.zeros(n)
    season = np.zeros(n)
    cyc = np.empty(n + 2 * p)
    for _ in range(iterations):
        detr = y - trend
        for j in range(p):
            sub = detr[j::p]
            k = sub.shape[0]
            subs = _ess(sub, seasonal_span, seasonal_deg)
            right = min(seasonal_span, k)
            v, ok = _est(sub, k, seasonal_span, seasonal_deg, -1.0, 0, right - 1)
            cyc[j] = v if ok else subs[0]
            cyc[p + j:(k + 1) * p + j:p] = subs
            left = max(k - seasonal_span, 0)
            v, ok = _est(sub, k, seasonal_span, seasonal_deg, float(k), left, k - 1)
            cyc[(k + 1) * p + j] = v if ok else subs[k - 1]
        low = _moving_average(_moving_average(_moving_average(cyc, p), p), 3)
        low = _ess(low, lowpass_span, lowpass_deg)
        season = cyc[p:p + n] - low
        trend = _ess(y - season, trend_span, trend_deg)
    return trend, season
