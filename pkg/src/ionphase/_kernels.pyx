# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for photon thinning and TDC folding.

Signatures mirror ``_kernels_py``; the two must stay interchangeable.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, floor

cnp.import_array()


cdef inline double _fold(double t, double period, double inv_period) noexcept nogil:
    # floor-based reduction; libm fmod is exact but slow at t/period ~ 1e8
    cdef double tf = t - floor(t * inv_period) * period
    if tf < 0.0:
        tf += period
    elif tf >= period:
        tf -= period
    return tf


cdef inline Py_ssize_t _bin(double tf, double bin_width, Py_ssize_t nbins) noexcept nogil:
    cdef Py_ssize_t k = <Py_ssize_t>(tf / bin_width)
    if k >= nbins:
        k = nbins - 1
    return k


def fold_counts(const double[::1] times, double period, Py_ssize_t nbins, cnp.int64_t[::1] counts):
    cdef Py_ssize_t i, n = times.shape[0]
    cdef double bin_width = period / nbins
    cdef double inv_period = 1.0 / period
    with nogil:
        for i in range(n):
            counts[_bin(_fold(times[i], period, inv_period), bin_width, nbins)] += 1


def thin_mask(const double[::1] times, const double[::1] uniforms, double omega, double phase,
              double visibility, double background, double period):
    cdef Py_ssize_t i, n = times.shape[0]
    cdef double envelope = 1.0 + visibility + background
    out = np.empty(n, dtype=np.bool_)
    cdef cnp.npy_bool[::1] mask = out
    cdef double rate
    cdef double inv_period = 1.0 / period
    with nogil:
        for i in range(n):
            rate = 1.0 + visibility * cos(omega * _fold(times[i], period, inv_period) + phase) + background
            mask[i] = uniforms[i] * envelope < rate
    return out


def thin_fold(const double[::1] times, const double[::1] uniforms, double omega, double phase,
              double visibility, double background, double period, Py_ssize_t nbins,
              cnp.int64_t[::1] counts):
    cdef Py_ssize_t i, n = times.shape[0], accepted = 0
    cdef double envelope = 1.0 + visibility + background
    cdef double bin_width = period / nbins
    cdef double inv_period = 1.0 / period
    cdef double tf, rate
    with nogil:
        for i in range(n):
            tf = _fold(times[i], period, inv_period)
            rate = 1.0 + visibility * cos(omega * tf + phase) + background
            if uniforms[i] * envelope < rate:
                counts[_bin(tf, bin_width, nbins)] += 1
                accepted += 1
    return accepted
