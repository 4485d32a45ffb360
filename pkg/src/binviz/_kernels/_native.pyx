# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot per-sample kernels.

Mirrors ``pure.py`` operation-for-operation. Integer kernels are
bit-identical to the fallback; ``entropy_series`` shares the same
lookup tables and differs at most by summation order (<= a few ulp).
"""

from libc.math cimport log2

import numpy as np

from binviz._kernels.pure import PTERM_TABLE

_PTERM = np.ascontiguousarray(PTERM_TABLE, dtype=np.float64)


def entropy_series(buf):
    """Normalized sliding-window Shannon entropy, one value per byte."""
    data = np.ascontiguousarray(buf, dtype=np.uint8)
    cdef Py_ssize_t n = data.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    if n == 0:
        return out_arr
    cdef const unsigned char[::1] b = data
    cdef double[::1] out = out_arr
    cdef const double[::1] pterm = _PTERM
    cdef int counts[256]
    cdef Py_ssize_t i, v, c, t
    cdef Py_ssize_t full = n - 255 if n > 255 else 0
    cdef double s, h, p, x
    for v in range(256):
        counts[v] = 0
    t = n if n < 256 else 256
    for i in range(t):
        counts[b[i]] += 1
    for i in range(n):
        if i < full:
            # full window: fresh table scan, independent of history
            s = 0.0
            for v in range(256):
                s += pterm[counts[v]]
            x = (-s) / 8.0
        else:
            # shrinking tail window: direct per-term entropy
            t = n - i
            h = 0.0
            for v in range(256):
                c = counts[v]
                if c > 0:
                    p = c / (<double> t)
                    h -= p * log2(p)
            x = h / 8.0
        if x < 0.0:
            x = 0.0
        elif x > 1.0:
            x = 1.0
        out[i] = x
        counts[b[i]] -= 1
        if i + 256 < n:
            counts[b[i + 256]] += 1
    return out_arr


def bigram_counts(data):
    """256x256 counts of consecutive byte pairs: acc[second, first] += 1."""
    arr = np.ascontiguousarray(data, dtype=np.uint8)
    cdef Py_ssize_t n = arr.shape[0]
    if n < 2:
        raise ValueError("bigram counting needs at least 2 bytes")
    cdef const unsigned char[::1] b = arr
    acc_arr = np.zeros(65536, dtype=np.int64)
    cdef long long[::1] acc = acc_arr
    cdef Py_ssize_t i
    for i in range(n - 1):
        acc[(<Py_ssize_t> b[i + 1]) * 256 + b[i]] += 1
    return acc_arr.reshape(256, 256)


def glcm_counts(quantized, drow, dcol, levels):
    """Directed co-occurrence counts of a quantized gray plane."""
    q_arr = np.ascontiguousarray(quantized, dtype=np.int64)
    cdef Py_ssize_t h = q_arr.shape[0]
    cdef Py_ssize_t w = q_arr.shape[1]
    cdef Py_ssize_t dr = drow
    cdef Py_ssize_t dc = dcol
    cdef Py_ssize_t g = levels
    cdef Py_ssize_t r0 = -dr if dr < 0 else 0
    cdef Py_ssize_t r1 = h - dr if dr > 0 else h
    cdef Py_ssize_t c0 = -dc if dc < 0 else 0
    cdef Py_ssize_t c1 = w - dc if dc > 0 else w
    if r0 >= r1 or c0 >= c1:
        raise ValueError("plane smaller than the offset reach")
    cdef const long long[:, ::1] q = q_arr
    acc_arr = np.zeros(g * g, dtype=np.int64)
    cdef long long[::1] acc = acc_arr
    cdef Py_ssize_t r, c
    for r in range(r0, r1):
        for c in range(c0, c1):
            acc[q[r, c] * g + q[r + dr, c + dc]] += 1
    return acc_arr.reshape(g, g)


def hilbert_coords(order, count):
    """(row, col) int64 arrays for Hilbert indices 0..count-1 on a 2^order grid."""
    cdef Py_ssize_t n = count
    cdef Py_ssize_t side = 1 << order
    rows_arr = np.empty(n, dtype=np.int64)
    cols_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] rows = rows_arr
    cdef long long[::1] cols = cols_arr
    cdef Py_ssize_t i, t, s, x, y, rx, ry, tmp
    for i in range(n):
        t = i
        x = 0
        y = 0
        s = 1
        while s < side:
            rx = 1 & (t >> 1)
            ry = 1 & (t ^ rx)
            if ry == 0:
                if rx == 1:
                    x = s - 1 - x
                    y = s - 1 - y
                tmp = x
                x = y
                y = tmp
            x += s * rx
            y += s * ry
            t >>= 2
            s <<= 1
        rows[i] = y
        cols[i] = x
    return rows_arr, cols_arr
