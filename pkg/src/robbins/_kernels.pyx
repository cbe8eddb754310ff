# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Monte Carlo kernels.

Must stay bit-identical to ``_kernels_py``: same RNG, same operation order in
every threshold formula.  Build without -ffast-math and without FP contraction.
"""

import numpy as np

from libc.math cimport sqrt
from libc.stdint cimport int32_t, uint64_t
from libc.stdlib cimport free, malloc

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0

cdef enum Kind:
    MEMORYLESS = 0
    EXACT3 = 1
    EXACT4 = 2


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline uint64_t stream_key(uint64_t seed, uint64_t stream) noexcept nogil:
    return mix64(mix64(seed) + (stream + 1) * GOLDEN)


cdef inline void fill(uint64_t key, double* out, int n) noexcept nogil:
    cdef int i
    for i in range(n):
        out[i] = (mix64(key + <uint64_t>(i + 1) * GOLDEN) >> 11) * INV_2_53


def uniform_block(uint64_t seed, uint64_t stream0, Py_ssize_t m, int n):
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] view = out
    cdef Py_ssize_t t
    with nogil:
        for t in range(m):
            fill(stream_key(seed, stream0 + <uint64_t>t), &view[t, 0], n)
    return out


cdef inline double dmax(double a, double b) noexcept nogil:
    return a if a >= b else b


cdef inline double dmin(double a, double b) noexcept nogil:
    return a if a <= b else b


cdef inline double g4(double x1, double x2, double h) noexcept nogil:
    return (1.5 + h * h - h + (2.0 - x1 - x2) * (1.0 - h)
            + dmax(h - x1, 0.0) + dmax(h - x2, 0.0))


cdef inline double h3(double x1, double x2) noexcept nogil:
    cdef double lo = dmin(x1, x2)
    cdef double hi = dmax(x1, x2)
    cdef double s = x1 + x2
    cdef double cand[7]
    cand[0] = lo
    cand[1] = hi
    cand[2] = dmin(dmax((3.0 - s) / 2.0, 0.0), lo)
    cand[3] = dmin(dmax((2.0 - s) / 2.0, lo), hi)
    cand[4] = dmin(dmax((1.0 - s) / 2.0, hi), 1.0)
    cand[5] = 0.0
    cand[6] = 1.0
    cdef double best_h = cand[0]
    cdef double best_v = g4(x1, x2, best_h)
    cdef double v
    cdef int i
    for i in range(1, 7):
        v = g4(x1, x2, cand[i])
        if v < best_v or (v == best_v and cand[i] < best_h):
            best_h = cand[i]
            best_v = v
    return best_h


cdef inline double h2(double x, const double* b) noexcept nogil:
    if x <= b[0]:
        return (5.0 - x - sqrt(x * x + 6.0 * x + 13.0)) / 4.0
    if x <= b[1]:
        return sqrt(8.0 * x + 54.0) - x - 7.0
    if x <= b[2]:
        return x + 0.0
    if x <= b[3]:
        return -(4.0 * x * x - 6.0 * x + 5.0) / (2.0 * (x - 4.0))
    if x <= b[4]:
        return sqrt(12.0 * x + 42.0) - 6.0 - x
    return 1.5 - (x + sqrt(x * x - 4.0 * x + 16.0)) / 4.0


cdef inline double threshold(int kind, const double* p, const double* x, int k) noexcept nogil:
    # k is the 1-based step; x[0..k-2] is the history
    cdef double x1
    if kind == MEMORYLESS:
        return p[k - 1]
    if kind == EXACT3:
        if k == 1:
            return p[0]
        if k == 2:
            x1 = x[0]
            if x1 < p[0]:
                return (1.0 - x1) / 2.0
            if x1 <= 2.0 / 3.0:
                return x1
            return 1.0 - x1 / 2.0
        return 1.0
    # EXACT4: p = (h1, beta_1, ..., beta_5)
    if k == 1:
        return p[0]
    if k == 2:
        return h2(x[0], p + 1)
    if k == 3:
        return h3(x[0], x[1])
    return 1.0


def simulate(str kind, const double[::1] params, int n, uint64_t seed, uint64_t stream0, Py_ssize_t m):
    """Ranks obtained by a known policy on trials stream0 .. stream0 + m - 1."""
    cdef int code
    if kind == "memoryless":
        code = MEMORYLESS
        if params.shape[0] != n:
            raise ValueError("memoryless kernel needs one threshold per step")
    elif kind == "exact3":
        code = EXACT3
        if n != 3:
            raise ValueError("exact3 kernel has horizon 3")
    elif kind == "exact4":
        code = EXACT4
        if n != 4 or params.shape[0] != 6:
            raise ValueError("exact4 kernel has horizon 4 and 6 parameters")
    else:
        raise ValueError(f"unknown kernel {kind!r}")

    ranks = np.empty(m, dtype=np.int32)
    cdef int32_t[::1] out = ranks
    cdef const double* p = &params[0]
    cdef double* x = <double*> malloc(n * sizeof(double))
    if x == NULL:
        raise MemoryError()
    cdef Py_ssize_t t
    cdef int k, i, sel, r
    cdef double xs
    try:
        with nogil:
            for t in range(m):
                fill(stream_key(seed, stream0 + <uint64_t>t), x, n)
                sel = n - 1
                for k in range(1, n):
                    if x[k - 1] <= threshold(code, p, x, k):
                        sel = k - 1
                        break
                xs = x[sel]
                r = 1
                for i in range(n):
                    if i != sel and x[i] <= xs:
                        r += 1
                out[t] = r
    finally:
        free(x)
    return ranks
