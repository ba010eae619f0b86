# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled loess and STL inner-loop kernels.

Positions are 0-based sample indices. ``_kernels_py`` mirrors every function
here line for line; the two must agree to rounding error.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


cdef inline double _tricube(double r, double h) noexcept nogil:
    cdef double u = r / h
    u = 1.0 - u * u * u
    return u * u * u


cdef int _weights(const double[:] y, Py_ssize_t n, Py_ssize_t q, double xs,
                  Py_ssize_t left, Py_ssize_t right, double h,
                  double[:] w, double* total) noexcept nogil:
    cdef double h9 = 0.999 * h
    cdef double h1 = 0.001 * h
    cdef double r
    cdef Py_ssize_t j
    cdef int count = 0
    total[0] = 0.0
    for j in range(left, right + 1):
        r = fabs(<double>j - xs)
        if r <= h9:
            if r <= h1:
                w[j] = 1.0
            else:
                w[j] = _tricube(r, h)
            total[0] += w[j]
            if w[j] > 0.0:
                count += 1
        else:
            w[j] = 0.0
    return count


cdef int _solve3(double* m, double* b, double* out) noexcept nogil:
    # Gaussian elimination with partial pivoting on a 3x3 system (row-major).
    cdef int i, j, k, p
    cdef double t, piv, scale = 0.0
    for i in range(9):
        if fabs(m[i]) > scale:
            scale = fabs(m[i])
    if scale == 0.0:
        return 0
    for k in range(3):
        p = k
        for i in range(k + 1, 3):
            if fabs(m[i * 3 + k]) > fabs(m[p * 3 + k]):
                p = i
        if fabs(m[p * 3 + k]) <= 1e-13 * scale:
            return 0
        if p != k:
            for j in range(3):
                t = m[k * 3 + j]
                m[k * 3 + j] = m[p * 3 + j]
                m[p * 3 + j] = t
            t = b[k]
            b[k] = b[p]
            b[p] = t
        piv = m[k * 3 + k]
        for i in range(k + 1, 3):
            t = m[i * 3 + k] / piv
            for j in range(k, 3):
                m[i * 3 + j] -= t * m[k * 3 + j]
            b[i] -= t * b[k]
    for i in range(2, -1, -1):
        t = b[i]
        for j in range(i + 1, 3):
            t -= m[i * 3 + j] * out[j]
        out[i] = t / m[i * 3 + i]
    return 1


cdef int _est(const double[:] y, Py_ssize_t n, Py_ssize_t q, int degree,
              double xs, Py_ssize_t left, Py_ssize_t right,
              double[:] w, double* ys) noexcept nogil:
    cdef double span = <double>(n - 1)
    cdef double h = xs - left
    cdef double a, b, c, total, z, zz
    cdef double m[9]
    cdef double rhs[3]
    cdef double coef[3]
    cdef Py_ssize_t j
    cdef int count, widen
    if right - xs > h:
        h = right - xs
    if q > n:
        h += <double>((q - n) // 2)
    count = _weights(y, n, q, xs, left, right, h, w, &total)
    # Tiny windows can leave fewer weighted points than coefficients;
    # widen the bandwidth a sample at a time until the fit is determined.
    widen = 0
    while count < degree + 1 and count < right - left + 1 and widen < 4:
        h += 1.0
        count = _weights(y, n, q, xs, left, right, h, w, &total)
        widen += 1
    if total <= 0.0:
        return 0
    for j in range(left, right + 1):
        w[j] /= total
    if degree == 2 and h > 0.0 and count >= 3:
        for j in range(9):
            m[j] = 0.0
        rhs[0] = 0.0
        rhs[1] = 0.0
        rhs[2] = 0.0
        for j in range(left, right + 1):
            if w[j] == 0.0:
                continue
            z = (<double>j - xs) / h
            zz = z * z
            m[0] += w[j]
            m[1] += w[j] * z
            m[2] += w[j] * zz
            m[5] += w[j] * zz * z
            m[8] += w[j] * zz * zz
            rhs[0] += w[j] * y[j]
            rhs[1] += w[j] * z * y[j]
            rhs[2] += w[j] * zz * y[j]
        m[3] = m[1]
        m[4] = m[2]
        m[6] = m[2]
        m[7] = m[5]
        if _solve3(m, rhs, coef):
            ys[0] = coef[0]
            return 1
    if degree >= 1 and h > 0.0:
        a = 0.0
        for j in range(left, right + 1):
            a += w[j] * j
        b = xs - a
        c = 0.0
        for j in range(left, right + 1):
            c += w[j] * (j - a) * (j - a)
        if sqrt(c) > 0.001 * span:
            b /= c
            for j in range(left, right + 1):
                w[j] = w[j] * (b * (j - a) + 1.0)
    a = 0.0
    for j in range(left, right + 1):
        a += w[j] * y[j]
    ys[0] = a
    return 1


cdef void _ess(const double[:] y, Py_ssize_t n, Py_ssize_t q, int degree,
               double[:] out, double[:] w) noexcept nogil:
    cdef Py_ssize_t i, left, right, nsh
    cdef double v
    if n < 2:
        if n == 1:
            out[0] = y[0]
        return
    if q >= n:
        for i in range(n):
            if _est(y, n, q, degree, <double>i, 0, n - 1, w, &v):
                out[i] = v
            else:
                out[i] = y[i]
        return
    nsh = (q + 1) // 2
    left = 0
    right = q - 1
    for i in range(n):
        if i >= nsh and right != n - 1:
            left += 1
            right += 1
        if _est(y, n, q, degree, <double>i, left, right, w, &v):
            out[i] = v
        else:
            out[i] = y[i]


cdef void _moving_average(const double[:] x, Py_ssize_t n, Py_ssize_t length,
                          double[:] out) noexcept nogil:
    cdef Py_ssize_t newn = n - length + 1
    cdef double flen = <double>length
    cdef double v = 0.0
    cdef Py_ssize_t i
    for i in range(length):
        v += x[i]
    out[0] = v / flen
    for i in range(1, newn):
        v = v - x[i - 1] + x[i + length - 1]
        out[i] = v / flen


def loess_at(double[:] y, double xs, Py_ssize_t q, int degree,
             Py_ssize_t left, Py_ssize_t right):
    """Local polynomial fit of ``y`` over ``[left, right]`` evaluated at ``xs``.

    Returns ``(value, ok)``; ``ok`` is False when no point carries weight.
    """
    cdef Py_ssize_t n = y.shape[0]
    cdef double[:] w = np.zeros(n, dtype=np.float64)
    cdef double v = 0.0
    cdef int ok
    with nogil:
        ok = _est(y, n, q, degree, xs, left, right, w, &v)
    return v, bool(ok)


def loess_grid(double[:] y, Py_ssize_t q, int degree):
    """Smooth ``y`` at every index with a sliding ``q``-point tricube window."""
    cdef Py_ssize_t n = y.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[:] o = out
    cdef double[:] w = np.zeros(max(n, 1), dtype=np.float64)
    with nogil:
        _ess(y, n, q, degree, o, w)
    return out


def stl_inner(double[:] y, Py_ssize_t period, Py_ssize_t seasonal_span,
              Py_ssize_t trend_span, Py_ssize_t lowpass_span,
              int seasonal_deg, int trend_deg, int lowpass_deg,
              int iterations):
    """Run the non-robust STL inner loop; returns ``(trend, seasonal)``."""
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t np_ = period
    cdef Py_ssize_t ext = n + 2 * np_
    cdef Py_ssize_t it, i, j, k, m, right, left
    cdef double v
    cdef int ok

    trend_arr = np.zeros(n, dtype=np.float64)
    season_arr = np.zeros(n, dtype=np.float64)
    cdef double[:] trend = trend_arr
    cdef double[:] season = season_arr
    cdef double[:] detr = np.empty(n, dtype=np.float64)
    cdef double[:] cyc = np.empty(ext, dtype=np.float64)
    cdef double[:] ma1 = np.empty(ext, dtype=np.float64)
    cdef double[:] ma2 = np.empty(ext, dtype=np.float64)
    cdef double[:] low = np.empty(n, dtype=np.float64)
    cdef double[:] sub = np.empty(n // np_ + 2, dtype=np.float64)
    cdef double[:] subs = np.empty(n // np_ + 2, dtype=np.float64)
    cdef double[:] w = np.zeros(ext, dtype=np.float64)

    with nogil:
        for it in range(iterations):
            for i in range(n):
                detr[i] = y[i] - trend[i]
            # cycle-subseries smoothing, extended one period at each end
            for j in range(np_):
                k = (n - j - 1) // np_ + 1
                for i in range(k):
                    sub[i] = detr[j + i * np_]
                _ess(sub, k, seasonal_span, seasonal_deg, subs, w)
                right = seasonal_span if seasonal_span < k else k
                ok = _est(sub, k, seasonal_span, seasonal_deg, -1.0, 0, right - 1, w, &v)
                cyc[j] = v if ok else subs[0]
                for m in range(k):
                    cyc[(m + 1) * np_ + j] = subs[m]
                left = k - seasonal_span if k - seasonal_span > 0 else 0
                ok = _est(sub, k, seasonal_span, seasonal_deg, <double>k, left, k - 1, w, &v)
                cyc[(k + 1) * np_ + j] = v if ok else subs[k - 1]
            # low-pass filter of the cycle-subseries
            _moving_average(cyc, ext, np_, ma1)
            _moving_average(ma1, ext - np_ + 1, np_, ma2)
            _moving_average(ma2, ext - 2 * np_ + 2, 3, ma1)
            _ess(ma1, n, lowpass_span, lowpass_deg, low, w)
            for i in range(n):
                season[i] = cyc[np_ + i] - low[i]
                detr[i] = y[i] - season[i]
            _ess(detr, n, trend_span, trend_deg, trend, w)
    return trend_arr, season_arr
