# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: exact squared EDT and polar Box-Muller draws."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt, INFINITY

cnp.import_array()

cdef cnp.int64_t _INF = 1 << 62


cdef void _lower_envelope(const cnp.int64_t* f, cnp.int64_t* d, Py_ssize_t n,
                          Py_ssize_t* v, double* z) noexcept nogil:
    cdef Py_ssize_t q, k = 0, first = -1
    cdef double s
    for q in range(n):
        if f[q] < _INF:
            first = q
            break
    if first < 0:
        for q in range(n):
            d[q] = _INF
        return
    v[0] = first
    z[0] = -INFINITY
    z[1] = INFINITY
    for q in range(first + 1, n):
        if f[q] >= _INF:
            continue
        while True:
            s = (<double>(f[q] + q * q) - <double>(f[v[k]] + v[k] * v[k])) / (2.0 * (q - v[k]))
            if s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = INFINITY
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        d[q] = (q - v[k]) * (q - v[k]) + f[v[k]]


def edt_sq(const cnp.uint8_t[:, ::1] mask):
    """Squared Euclidean distance to the nearest nonzero pixel, int64.

    Rows without any reachable nonzero pixel hold 2**62; callers handle the
    empty-mask case before calling.
    """
    cdef Py_ssize_t h = mask.shape[0], w = mask.shape[1]
    cdef Py_ssize_t x, y, n = max(h, w)
    cdef cnp.int64_t last
    g_arr = np.empty((h, w), dtype=np.int64)
    out_arr = np.empty((h, w), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] g = g_arr
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef cnp.int64_t[::1] col = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] res = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t[::1] v = np.empty(n + 1, dtype=np.intp)
    cdef double[::1] z = np.empty(n + 2, dtype=np.float64)

    with nogil:
        # column pass: 1D distance along y
        for x in range(w):
            last = -1
            for y in range(h):
                if mask[y, x]:
                    last = y
                g[y, x] = (y - last) if last >= 0 else _INF
            last = -1
            for y in range(h - 1, -1, -1):
                if mask[y, x]:
                    last = y
                if last >= 0 and last - y < g[y, x]:
                    g[y, x] = last - y
            for y in range(h):
                if g[y, x] < _INF:
                    g[y, x] = g[y, x] * g[y, x]
        # row pass: lower envelope of parabolas
        for y in range(h):
            _lower_envelope(&g[y, 0], &out[y, 0], w, &v[0], &z[0])
    return out_arr


def polar_normals(const cnp.uint64_t[::1] raw, double[::1] out, Py_ssize_t start):
    """Fill ``out[start:]`` with standard normals from a raw 64-bit stream.

    Returns ``(next_start, words_consumed)``.
    """
    cdef Py_ssize_t i = start, j = 0, n = out.shape[0], m = raw.shape[0]
    cdef double u1, u2, s, fac
    cdef double scale = 1.0 / 9007199254740992.0
    with nogil:
        while i < n and j + 1 < m:
            u1 = 2.0 * (<double>(raw[j] >> 11) * scale) - 1.0
            u2 = 2.0 * (<double>(raw[j + 1] >> 11) * scale) - 1.0
            j += 2
            s = u1 * u1 + u2 * u2
            if s >= 1.0 or s == 0.0:
                continue
            fac = sqrt(-2.0 * log(s) / s)
            out[i] = u1 * fac
            i += 1
            if i < n:
                out[i] = u2 * fac
                i += 1
    return i, j
