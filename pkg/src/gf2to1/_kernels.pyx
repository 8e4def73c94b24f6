# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same API as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint32_t, uint64_t, int64_t

cnp.import_array()


cdef inline uint64_t _mulmod(uint64_t a, uint64_t b, uint64_t modulus, int n) nogil:
    cdef uint64_t r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if (a >> n) & 1:
            a ^= modulus
    return r


def mulmod(uint64_t a, uint64_t b, uint64_t modulus, int n):
    return _mulmod(a, b, modulus, n)


def build_exp_table(int n, uint64_t modulus, uint64_t g):
    cdef Py_ssize_t order = (1 << n) - 1
    cdef cnp.ndarray[uint32_t, ndim=1] exp = np.empty(order, dtype=np.uint32)
    cdef uint32_t[:] ev = exp
    cdef uint64_t x = 1
    cdef Py_ssize_t i
    with nogil:
        for i in range(order):
            ev[i] = <uint32_t>x
            x = _mulmod(x, g, modulus, n)
    return exp


def linear_table(images, int n):
    cdef Py_ssize_t q = 1 << n
    cdef cnp.ndarray[uint32_t, ndim=1] table = np.zeros(q, dtype=np.uint32)
    cdef uint32_t[:] tv = table
    cdef uint32_t[:] img = np.asarray(images, dtype=np.uint32)
    cdef Py_ssize_t i, j, lo
    with nogil:
        for i in range(n):
            lo = 1 << i
            for j in range(lo):
                tv[lo + j] = tv[j] ^ img[i]
    return table


def term_accumulate(uint32_t[:] out, uint32_t[:] x, uint32_t[:] u, uint64_t c,
                    object r, object e, uint32_t[:] exp, int64_t[:] log):
    if c == 0:
        return
    cdef int64_t order = exp.shape[0]
    cdef int use_r = 1 if r else 0
    cdef int use_e = 1 if e else 0
    cdef int64_t rr = <int64_t>(r % order)
    cdef int64_t ee = <int64_t>(e % order)
    cdef int64_t lc = log[c]
    cdef Py_ssize_t i, m = out.shape[0]
    cdef int64_t acc, lv
    with nogil:
        for i in range(m):
            acc = lc
            if use_r:
                lv = log[x[i]]
                if lv < 0:
                    continue
                acc += lv * rr
            if use_e:
                lv = log[u[i]]
                if lv < 0:
                    continue
                acc += (lv * ee) % order
            out[i] ^= exp[acc % order]


def value_counts(uint32_t[:] values, Py_ssize_t q):
    cdef cnp.ndarray[int64_t, ndim=1] counts = np.zeros(q, dtype=np.int64)
    cdef int64_t[:] cv = counts
    cdef Py_ssize_t i
    with nogil:
        for i in range(values.shape[0]):
            cv[values[i]] += 1
    return counts


def partners(uint32_t[:] values):
    cdef Py_ssize_t m = values.shape[0]
    cdef cnp.ndarray[int64_t, ndim=1] out = np.full(m, -1, dtype=np.int64)
    if m == 0:
        return out
    cdef int64_t[:] ov = out
    cdef int64_t[:] order = np.argsort(np.asarray(values), kind="stable").astype(np.int64)
    cdef Py_ssize_t s = 0, t
    with nogil:
        while s < m:
            t = s + 1
            while t < m and values[order[t]] == values[order[s]]:
                t += 1
            if t - s == 2:
                ov[order[s]] = order[s + 1]
                ov[order[s + 1]] = order[s]
            s = t
    return out
