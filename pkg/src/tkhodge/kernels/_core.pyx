# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled fiberwise kernels (float64 only).

Same contracts as tkhodge.kernels._backend_np; see that module for the
reference semantics.  Index tables are compiled in rather than imported so
the hot loops stay flat.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

# lex pair table: PAIRS[r][0], PAIRS[r][1]
cdef int PA[6]
cdef int PB[6]
PA[0] = 0; PB[0] = 1
PA[1] = 0; PB[1] = 2
PA[2] = 0; PB[2] = 3
PA[3] = 1; PB[3] = 2
PA[4] = 1; PB[4] = 3
PA[5] = 2; PB[5] = 3

# lex triple table
cdef int TA[4]
cdef int TB[4]
cdef int TC[4]
TA[0] = 0; TB[0] = 1; TC[0] = 2
TA[1] = 0; TB[1] = 1; TC[1] = 3
TA[2] = 0; TB[2] = 2; TC[2] = 3
TA[3] = 1; TB[3] = 2; TC[3] = 3

# wedge_pair2 sign table over complementary pairs: (i, j, sign)
cdef int WI[6]
cdef int WJ[6]
cdef double WS[6]
WI[0] = 0; WJ[0] = 5; WS[0] = 1.0
WI[1] = 1; WJ[1] = 4; WS[1] = -1.0
WI[2] = 2; WJ[2] = 3; WS[2] = 1.0
WI[3] = 3; WJ[3] = 2; WS[3] = 1.0
WI[4] = 4; WJ[4] = 1; WS[4] = -1.0
WI[5] = 5; WJ[5] = 0; WS[5] = 1.0


def batch_matvec(double[:, :, ::1] mats, double[:, ::1] vecs):
    cdef Py_ssize_t n = mats.shape[0]
    cdef Py_ssize_t r = mats.shape[1]
    cdef Py_ssize_t c = mats.shape[2]
    out_arr = np.empty((n, r), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, a, b
    cdef double acc
    for i in range(n):
        for a in range(r):
            acc = 0.0
            for b in range(c):
                acc += mats[i, a, b] * vecs[i, b]
            out[i, a] = acc
    return out_arr


def batch_matvec_t(double[:, :, ::1] mats, double[:, ::1] vecs):
    cdef Py_ssize_t n = mats.shape[0]
    cdef Py_ssize_t r = mats.shape[1]
    cdef Py_ssize_t c = mats.shape[2]
    out_arr = np.zeros((n, c), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, a, b
    cdef double v
    for i in range(n):
        for a in range(r):
            v = vecs[i, a]
            for b in range(c):
                out[i, b] += mats[i, a, b] * v
    return out_arr


def wedge_pair2(double[:, ::1] a, double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0]
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, t
    cdef double acc
    for i in range(n):
        acc = 0.0
        for t in range(6):
            acc += WS[t] * a[i, WI[t]] * b[i, WJ[t]]
        out[i] = acc
    return out_arr


def weighted_block_dot(double[::1] w, double[:, :, ::1] gram,
                       double[:, ::1] a, double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t r = a.shape[1]
    cdef Py_ssize_t i, p, q
    cdef double total = 0.0, acc
    for i in range(n):
        acc = 0.0
        for p in range(r):
            for q in range(r):
                acc += a[i, p] * gram[i, p, q] * b[i, q]
        total += w[i] * acc
    return total


def compound2(double[:, :, ::1] mats):
    cdef Py_ssize_t n = mats.shape[0]
    out_arr = np.empty((n, 6, 6), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t i, r, c
    cdef int a, b, p, q
    for i in range(n):
        for r in range(6):
            a = PA[r]; b = PB[r]
            for c in range(6):
                p = PA[c]; q = PB[c]
                out[i, r, c] = mats[i, a, p] * mats[i, b, q] - mats[i, a, q] * mats[i, b, p]
    return out_arr


cdef inline double _det3(double[:, :, ::1] m, Py_ssize_t i,
                         int a, int b, int c, int p, int q, int r) nogil:
    return (m[i, a, p] * (m[i, b, q] * m[i, c, r] - m[i, b, r] * m[i, c, q])
            - m[i, a, q] * (m[i, b, p] * m[i, c, r] - m[i, b, r] * m[i, c, p])
            + m[i, a, r] * (m[i, b, p] * m[i, c, q] - m[i, b, q] * m[i, c, p]))


def compound3(double[:, :, ::1] mats):
    cdef Py_ssize_t n = mats.shape[0]
    out_arr = np.empty((n, 4, 4), dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t i, r, c
    for i in range(n):
        for r in range(4):
            for c in range(4):
                out[i, r, c] = _det3(mats, i, TA[r], TB[r], TC[r], TA[c], TB[c], TC[c])
    return out_arr
