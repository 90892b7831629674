# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: lag products of the instantaneous autocorrelation and
first-prominent-peak ridge picking."""
import numpy as np
cimport numpy as cnp
from libc.math cimport NAN, INFINITY

cnp.import_array()


def lag_products(z, lag_weights):
    cdef const double complex[::1] zv = np.ascontiguousarray(z, dtype=np.complex128)
    cdef const double[::1] w = np.ascontiguousarray(lag_weights, dtype=np.float64)
    cdef Py_ssize_t n = zv.shape[0]
    cdef Py_ssize_t big_m = w.shape[0] - 1
    out_arr = np.zeros((n, big_m + 1), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t i, m, reach
    cdef double complex a, b
    with nogil:
        for i in range(n):
            reach = i if i < n - 1 - i else n - 1 - i
            if reach > big_m:
                reach = big_m
            for m in range(reach + 1):
                a = zv[i + m]
                b = zv[i - m]
                out[i, m] = w[m] * (a.real * b.real + a.imag * b.imag
                                    + 1j * (a.imag * b.real - a.real * b.imag))
    return out_arr


def first_prominent_peaks(values, Py_ssize_t k_lo, Py_ssize_t k_hi, double ratio):
    cdef const double[:, ::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t rows = v.shape[0]
    cdef Py_ssize_t width = v.shape[1]
    out_arr = np.full(rows, np.nan)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t r, k
    cdef double bmax, thresh, a, b, c, left, right, den, delta
    if k_lo < 0:
        k_lo = 0
    if k_hi > width - 1:
        k_hi = width - 1
    if k_hi < k_lo:
        return out_arr
    with nogil:
        for r in range(rows):
            bmax = -INFINITY
            for k in range(k_lo, k_hi + 1):
                if v[r, k] > bmax:
                    bmax = v[r, k]
            if not bmax > 0:
                continue
            thresh = ratio * bmax
            for k in range(k_lo, k_hi + 1):
                b = v[r, k]
                if b <= 0 or b < thresh:
                    continue
                left = v[r, k - 1] if k > 0 else -INFINITY
                right = v[r, k + 1] if k < width - 1 else -INFINITY
                if b >= left and b > right:
                    a = left if k > 0 else b
                    c = right if k < width - 1 else b
                    den = a - 2 * b + c
                    delta = 0.5 * (a - c) / den if den < 0 else 0.0
                    if delta > 0.5:
                        delta = 0.5
                    elif delta < -0.5:
                        delta = -0.5
                    out[r] = k + delta
                    break
    return out_arr
