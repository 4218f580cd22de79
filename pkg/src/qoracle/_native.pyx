# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the dense simulator and the Walsh-Hadamard transform."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()

ctypedef double complex cplx


def apply_h(cplx[::1] psi, int q):
    cdef Py_ssize_t n = psi.shape[0], i, j
    cdef Py_ssize_t bit = (<Py_ssize_t>1) << q
    cdef double s = 1.0 / sqrt(2.0)
    cdef cplx a, b
    with nogil:
        for i in range(n):
            if i & bit:
                continue
            j = i | bit
            a = psi[i]
            b = psi[j]
            psi[i] = (a + b) * s
            psi[j] = (a - b) * s


def apply_x(cplx[::1] psi, int q):
    cdef Py_ssize_t n = psi.shape[0], i, j
    cdef Py_ssize_t bit = (<Py_ssize_t>1) << q
    cdef cplx a
    with nogil:
        for i in range(n):
            if i & bit:
                continue
            j = i | bit
            a = psi[i]
            psi[i] = psi[j]
            psi[j] = a


def apply_rz(cplx[::1] psi, int q, double theta):
    cdef Py_ssize_t n = psi.shape[0], i
    cdef Py_ssize_t bit = (<Py_ssize_t>1) << q
    cdef cplx p0 = cos(theta / 2) - 1j * sin(theta / 2)
    cdef cplx p1 = cos(theta / 2) + 1j * sin(theta / 2)
    with nogil:
        for i in range(n):
            if i & bit:
                psi[i] = psi[i] * p1
            else:
                psi[i] = psi[i] * p0


def apply_mcx(cplx[::1] psi, long long ctrl_mask, int t):
    # i = (i + 1) | m walks the supersets of m in increasing order
    cdef Py_ssize_t n = psi.shape[0], i, j
    cdef Py_ssize_t bit = (<Py_ssize_t>1) << t
    cdef Py_ssize_t m = <Py_ssize_t>ctrl_mask | bit
    cdef cplx a
    with nogil:
        i = m
        while i < n:
            j = i ^ bit
            a = psi[i]
            psi[i] = psi[j]
            psi[j] = a
            i = (i + 1) | m


def apply_cx(cplx[::1] psi, int c, int t):
    apply_mcx(psi, (<long long>1) << c, t)


def apply_mcz(cplx[::1] psi, long long mask):
    cdef Py_ssize_t n = psi.shape[0], i
    cdef Py_ssize_t m = <Py_ssize_t>mask
    with nogil:
        i = m
        while i < n:
            psi[i] = -psi[i]
            i = (i + 1) | m


def apply_diagonal(cplx[::1] psi, qubits, phases):
    cdef cplx[::1] ph = np.ascontiguousarray(phases, dtype=np.complex128)
    cdef long long[::1] qs = np.ascontiguousarray(qubits, dtype=np.int64)
    cdef Py_ssize_t n = psi.shape[0], i, key, j, k = qs.shape[0]
    with nogil:
        for i in range(n):
            key = 0
            for j in range(k):
                key |= ((i >> qs[j]) & 1) << j
            psi[i] = psi[i] * ph[key]


def fwht(double[::1] a):
    cdef Py_ssize_t n = a.shape[0], h = 1, i, j
    cdef double x, y
    with nogil:
        while h < n:
            i = 0
            while i < n:
                for j in range(i, i + h):
                    x = a[j]
                    y = a[j + h]
                    a[j] = x + y
                    a[j + h] = x - y
                i += 2 * h
            h *= 2
    return np.asarray(a)


def marginal(double[::1] probs, qubits):
    cdef long long[::1] qs = np.ascontiguousarray(qubits, dtype=np.int64)
    cdef Py_ssize_t k = qs.shape[0], n = probs.shape[0], i, j, key
    out_arr = np.zeros((<Py_ssize_t>1) << k, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            key = 0
            for j in range(k):
                key |= ((i >> qs[j]) & 1) << j
            out[key] += probs[i]
    return out_arr
