# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled direct-convolution kernel.

Accumulation order is row-major over the first operand, matching
``_pykernel`` exactly so both backends return bit-identical masses.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def direct_dense(const cnp.int64_t[::1] fi, const double[::1] fp,
                 const cnp.int64_t[::1] gi, const double[::1] gp,
                 cnp.int64_t lo, Py_ssize_t span):
    cdef Py_ssize_t nf = fi.shape[0], ng = gi.shape[0]
    cdef Py_ssize_t a, b, pos
    cdef double pa
    out_arr = np.zeros(span, dtype=np.float64)
    hit_arr = np.zeros(span, dtype=np.bool_)
    cdef double[::1] out = out_arr
    cdef cnp.npy_bool[::1] hit = hit_arr
    with nogil:
        for a in range(nf):
            pa = fp[a]
            pos = fi[a] - lo
            for b in range(ng):
                out[pos + gi[b]] += pa * gp[b]
                hit[pos + gi[b]] = 1
    return out_arr, hit_arr
