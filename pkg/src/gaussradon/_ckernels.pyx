# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the loops in ``_kernels_py``."""

import numpy as np

from ._kernels_py import level_scales


def schauder_synthesize(coeffs, int levels):
    cdef const double[:, ::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef Py_ssize_t size = (<Py_ssize_t>1) << levels
    if c.shape[1] != size:
        raise ValueError(f"expected (m, {size}) coefficients, got {np.shape(coeffs)}")
    cdef Py_ssize_t m = c.shape[0]
    out = np.zeros((m, size + 1))
    cdef double[:, ::1] x = out
    cdef double[::1] sc = level_scales(levels)
    cdef Py_ssize_t r
    with nogil:
        for r in range(m):
            _synth_row(&c[r, 0], &x[r, 0], &sc[0] if levels > 0 else NULL, levels, size)
    return out


cdef inline void _synth_row(const double* c, double* x, const double* sc,
                            int levels, Py_ssize_t size) noexcept nogil:
    cdef Py_ssize_t j, k, nk, span, half, left
    cdef double s
    x[0] = 0.0
    x[size] = c[0]
    for j in range(levels):
        nk = (<Py_ssize_t>1) << j
        span = size >> j
        half = span >> 1
        s = sc[j]
        for k in range(nk):
            left = k * span
            x[left + half] = 0.5 * (x[left] + x[left + span]) + s * c[nk + k]


def schauder_analyze(paths, int levels):
    cdef const double[:, ::1] x = np.ascontiguousarray(paths, dtype=np.float64)
    cdef Py_ssize_t size = (<Py_ssize_t>1) << levels
    if x.shape[1] != size + 1:
        raise ValueError(f"expected (m, {size + 1}) path values, got {np.shape(paths)}")
    cdef Py_ssize_t m = x.shape[0]
    out = np.empty((m, size))
    cdef double[:, ::1] c = out
    cdef double[::1] inv = 1.0 / level_scales(levels)
    cdef Py_ssize_t r, j, k, nk, span, half, left
    with nogil:
        for r in range(m):
            c[r, 0] = x[r, size]
            for j in range(levels):
                nk = (<Py_ssize_t>1) << j
                span = size >> j
                half = span >> 1
                for k in range(nk):
                    left = k * span
                    c[r, nk + k] = (x[r, left + half] - 0.5 * (x[r, left] + x[r, left + span])) * inv[j]
    return out


def row_sup_abs(values):
    cdef const double[:, ::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t m = v.shape[0], n = v.shape[1], r, i
    out = np.zeros(m)
    cdef double[::1] o = out
    cdef double best, a
    with nogil:
        for r in range(m):
            best = 0.0
            for i in range(n):
                a = v[r, i]
                if a < 0:
                    a = -a
                if a > best:
                    best = a
            o[r] = best
    return out


def schauder_sup(coeffs, int levels):
    cdef const double[:, ::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef Py_ssize_t size = (<Py_ssize_t>1) << levels
    if c.shape[1] != size:
        raise ValueError(f"expected (m, {size}) coefficients, got {np.shape(coeffs)}")
    cdef Py_ssize_t m = c.shape[0], r, i
    out = np.zeros(m)
    cdef double[::1] o = out
    buf = np.zeros(size + 1)
    cdef double[::1] x = buf
    cdef double[::1] sc = level_scales(levels)
    cdef double best, a
    with nogil:
        for r in range(m):
            _synth_row(&c[r, 0], &x[0], &sc[0] if levels > 0 else NULL, levels, size)
            best = 0.0
            for i in range(size + 1):
                a = x[i]
                if a < 0:
                    a = -a
                if a > best:
                    best = a
            o[r] = best
    return out


def weighted_sq_norm(values, weights):
    cdef const double[:, ::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t m = v.shape[0], n = v.shape[1], r, i
    if w.shape[0] != n:
        raise ValueError("weights length does not match")
    out = np.zeros(m)
    cdef double[::1] o = out
    cdef double acc
    with nogil:
        for r in range(m):
            acc = 0.0
            for i in range(n):
                acc = acc + v[r, i] * v[r, i] * w[i]
            o[r] = acc
    return out
