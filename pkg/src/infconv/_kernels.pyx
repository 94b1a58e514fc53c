# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled line kernels.  Signatures mirror ``infconv._fallback``."""
import numpy as np

from libc.math cimport INFINITY, isinf


def lower_envelope(const double[:, ::1] heights, const double[::1] pos, const double[::1] query, double t):
    """min_q heights[l, q] + (query[j] - pos[q])**2 / (2 t), per line ``l``.

    ``pos`` and ``query`` must be strictly increasing.  ``+inf`` heights are
    skipped; a line with no finite height yields ``+inf`` everywhere.
    """
    cdef Py_ssize_t nlines = heights.shape[0], n = heights.shape[1], m = query.shape[0]
    out_arr = np.empty((nlines, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t[::1] v = np.empty(n, dtype=np.intp)
    cdef double[::1] z = np.empty(n + 1, dtype=np.float64)
    cdef Py_ssize_t line, q, k, j, p
    cdef double s, hq, two_t = 2.0 * t, d
    with nogil:
        for line in range(nlines):
            k = -1
            for q in range(n):
                hq = heights[line, q]
                if isinf(hq):
                    continue
                if k < 0:
                    k = 0
                    v[0] = q
                    z[0] = -INFINITY
                    z[1] = INFINITY
                    continue
                while True:
                    p = v[k]
                    s = 0.5 * (pos[q] + pos[p]) + t * (hq - heights[line, p]) / (pos[q] - pos[p])
                    if s <= z[k]:
                        k -= 1
                    else:
                        break
                k += 1
                v[k] = q
                z[k] = s
                z[k + 1] = INFINITY
            if k < 0:
                for j in range(m):
                    out[line, j] = INFINITY
                continue
            k = 0
            for j in range(m):
                while z[k + 1] < query[j]:
                    k += 1
                p = v[k]
                d = query[j] - pos[p]
                out[line, j] = heights[line, p] + d * d / two_t
    return out_arr


def symmetrize_lines(const double[:, ::1] values, double h):
    """Line-wise min_k (f[i+k] + f[n-1-i+k]) / 2 + (k h)**2 / 2 over in-range shifts."""
    cdef Py_ssize_t nlines = values.shape[0], n = values.shape[1]
    out_arr = np.empty((nlines, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t line, i, r, k, kmax
    cdef double best, c, u
    with nogil:
        for line in range(nlines):
            for i in range(n):
                r = n - 1 - i
                kmax = i if i < r else r
                best = INFINITY
                for k in range(-kmax, kmax + 1):
                    u = k * h
                    c = 0.5 * (values[line, i + k] + values[line, r + k]) + 0.5 * u * u
                    if c < best:
                        best = c
                out[line, i] = best
    return out_arr
