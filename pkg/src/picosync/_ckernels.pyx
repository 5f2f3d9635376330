# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for lag-windowed matched filtering and QLS peaks."""
import numpy as np

from libc.math cimport sqrt


def xcorr_mag(const double complex[::1] rx, const double complex[::1] ref,
              Py_ssize_t lag_lo, Py_ssize_t lag_hi):
    cdef Py_ssize_t n_ref = ref.shape[0]
    cdef Py_ssize_t n_lag = lag_hi - lag_lo
    cdef Py_ssize_t n_rx = n_lag + n_ref - 1
    cdef Py_ssize_t k, m
    out = np.empty(n_lag, dtype=np.float64)
    cdef double[::1] o = out

    # split planes so the inner loop is plain double arithmetic
    seg = np.asarray(rx[lag_lo:lag_lo + n_rx])
    cdef double[::1] xr = np.ascontiguousarray(seg.real)
    cdef double[::1] xi = np.ascontiguousarray(seg.imag)
    cdef double[::1] hr = np.ascontiguousarray(np.asarray(ref).real)
    cdef double[::1] hi = np.ascontiguousarray(np.asarray(ref).imag)

    # two lags per pass share the reference loads
    cdef double r0, i0, r1, i1, br, bi
    k = 0
    while k + 1 < n_lag:
        r0 = i0 = r1 = i1 = 0.0
        for m in range(n_ref):
            br = hr[m]
            bi = hi[m]
            r0 += xr[k + m] * br + xi[k + m] * bi
            i0 += xi[k + m] * br - xr[k + m] * bi
            r1 += xr[k + 1 + m] * br + xi[k + 1 + m] * bi
            i1 += xi[k + 1 + m] * br - xr[k + 1 + m] * bi
        o[k] = sqrt(r0 * r0 + i0 * i0)
        o[k + 1] = sqrt(r1 * r1 + i1 * i1)
        k += 2
    if k < n_lag:
        r0 = i0 = 0.0
        for m in range(n_ref):
            r0 += xr[k + m] * hr[m] + xi[k + m] * hi[m]
            i0 += xi[k + m] * hr[m] - xr[k + m] * hi[m]
        o[k] = sqrt(r0 * r0 + i0 * i0)
    return out


def argmax_range(const double[::1] metric, Py_ssize_t lo, Py_ssize_t hi):
    cdef Py_ssize_t i, best = lo
    cdef double v = metric[lo]
    for i in range(lo + 1, hi):
        if metric[i] > v:
            v = metric[i]
            best = i
    return best


def qls_offset(double a, double b, double c):
    cdef double den = a - 2.0 * b + c
    if den == 0.0:
        return float("nan")
    return 0.5 * (a - c) / den
