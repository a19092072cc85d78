# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled jet kernels.

Mirrors `py_backend` function-for-function: same signatures, same
accumulation order, operating on C-contiguous complex128 (batch, s+1)
arrays.  See that module for the recurrence derivations.
"""

import numpy as np

NAME = "compiled"

ctypedef double complex cplx


def mul_trunc(const cplx[:, ::1] a, const cplx[:, ::1] b):
    cdef Py_ssize_t batch = a.shape[0]
    cdef Py_ssize_t width = a.shape[1]
    out_arr = np.empty((batch, width), dtype=np.complex128)
    cdef cplx[:, ::1] out = out_arr
    cdef Py_ssize_t i, r, j
    cdef cplx acc
    for i in range(batch):
        for r in range(width):
            acc = 0
            for j in range(r + 1):
                acc = acc + a[i, j] * b[i, r - j]
            out[i, r] = acc
    return out_arr


def reciprocal_series(const cplx[:, ::1] u, const cplx[::1] v0):
    cdef Py_ssize_t batch = u.shape[0]
    cdef Py_ssize_t width = u.shape[1]
    v_arr = np.empty((batch, width), dtype=np.complex128)
    cdef cplx[:, ::1] v = v_arr
    cdef Py_ssize_t i, r, j
    cdef cplx acc
    for i in range(batch):
        v[i, 0] = v0[i]
        for r in range(1, width):
            acc = 0
            for j in range(1, r + 1):
                acc = acc + u[i, j] * v[i, r - j]
            v[i, r] = -acc * v[i, 0]
    return v_arr


def sqrt_series(const cplx[:, ::1] u, const cplx[::1] v0):
    cdef Py_ssize_t batch = u.shape[0]
    cdef Py_ssize_t width = u.shape[1]
    v_arr = np.empty((batch, width), dtype=np.complex128)
    cdef cplx[:, ::1] v = v_arr
    cdef Py_ssize_t i, r, j
    cdef cplx acc
    for i in range(batch):
        v[i, 0] = v0[i]
        for r in range(1, width):
            acc = 0
            for j in range(1, r):
                acc = acc + v[i, j] * v[i, r - j]
            v[i, r] = (u[i, r] - acc) / (2.0 * v[i, 0])
    return v_arr


def exp_series(const cplx[:, ::1] u, const cplx[::1] v0):
    cdef Py_ssize_t batch = u.shape[0]
    cdef Py_ssize_t width = u.shape[1]
    v_arr = np.empty((batch, width), dtype=np.complex128)
    cdef cplx[:, ::1] v = v_arr
    cdef Py_ssize_t i, r, j
    cdef cplx acc
    for i in range(batch):
        v[i, 0] = v0[i]
        for r in range(1, width):
            acc = 0
            for j in range(1, r + 1):
                acc = acc + (<double> j) * u[i, j] * v[i, r - j]
            v[i, r] = acc / (<double> r)
    return v_arr


def log_series(const cplx[:, ::1] u, const cplx[::1] v0):
    cdef Py_ssize_t batch = u.shape[0]
    cdef Py_ssize_t width = u.shape[1]
    v_arr = np.empty((batch, width), dtype=np.complex128)
    cdef cplx[:, ::1] v = v_arr
    cdef Py_ssize_t i, r, j
    cdef cplx acc
    for i in range(batch):
        v[i, 0] = v0[i]
        for r in range(1, width):
            acc = 0
            for j in range(1, r):
                acc = acc + (<double> (r - j)) * u[i, j] * v[i, r - j]
            v[i, r] = ((<double> r) * u[i, r] - acc) / ((<double> r) * u[i, 0])
    return v_arr


def tanh_series(const cplx[:, ::1] u, const cplx[::1] v0):
    cdef Py_ssize_t batch = u.shape[0]
    cdef Py_ssize_t width = u.shape[1]
    v_arr = np.empty((batch, width), dtype=np.complex128)
    w_arr = np.empty((batch, width), dtype=np.complex128)
    cdef cplx[:, ::1] v = v_arr
    cdef cplx[:, ::1] w = w_arr
    cdef Py_ssize_t i, r, j
    cdef cplx acc
    for i in range(batch):
        v[i, 0] = v0[i]
        w[i, 0] = 1.0 - v[i, 0] * v[i, 0]
        for r in range(1, width):
            acc = 0
            for j in range(1, r + 1):
                acc = acc + (<double> j) * u[i, j] * w[i, r - j]
            v[i, r] = acc / (<double> r)
            acc = 0
            for j in range(r + 1):
                acc = acc + v[i, j] * v[i, r - j]
            w[i, r] = -acc
    return v_arr


cdef double _TWO_OVER_SQRT_PI = 1.1283791670955126


def erf_series(const cplx[:, ::1] u, const cplx[::1] v0, const cplx[::1] g0):
    t_arr = mul_trunc(u, u)
    np.negative(t_arr, out=t_arr)
    g_arr = exp_series(t_arr, g0)
    cdef Py_ssize_t batch = u.shape[0]
    cdef Py_ssize_t width = u.shape[1]
    v_arr = np.empty((batch, width), dtype=np.complex128)
    cdef cplx[:, ::1] v = v_arr
    cdef cplx[:, ::1] g = g_arr
    cdef Py_ssize_t i, r, j
    cdef cplx acc
    for i in range(batch):
        v[i, 0] = v0[i]
        for r in range(1, width):
            acc = 0
            for j in range(1, r + 1):
                acc = acc + (<double> j) * u[i, j] * g[i, r - j]
            v[i, r] = _TWO_OVER_SQRT_PI * acc / (<double> r)
    return v_arr
