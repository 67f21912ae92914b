# cython: boundscheck=False, wraparound=False, cdivision=True
"""End-site probability kernel.

A(t) = sum_k exp(-i lam_k t) c_k with real spectral weights c_k, so
|A(t)|^2 = (sum_k c_k cos(lam_k t))^2 + (sum_k c_k sin(lam_k t))^2.
This is the innermost loop of every sweep and detuning optimization.
"""

from libc.math cimport cos, sin

import numpy as np


def end_probability(double[::1] eigvals, double[::1] coef, double t):
    """|A_end(t)|^2 for a single time."""
    cdef Py_ssize_t k, n = eigvals.shape[0]
    cdef double re = 0.0, im = 0.0, ph
    for k in range(n):
        ph = eigvals[k] * t
        re += coef[k] * cos(ph)
        im += coef[k] * sin(ph)
    return re * re + im * im


def end_probability_curve(double[::1] eigvals, double[::1] coef,
                          double[::1] times):
    """|A_end(t)|^2 on a grid of times."""
    cdef Py_ssize_t i, k
    cdef Py_ssize_t n = eigvals.shape[0], nt = times.shape[0]
    cdef double re, im, ph, t
    out = np.empty(nt)
    cdef double[::1] out_v = out
    for i in range(nt):
        t = times[i]
        re = 0.0
        im = 0.0
        for k in range(n):
            ph = eigvals[k] * t
            re += coef[k] * cos(ph)
            im += coef[k] * sin(ph)
        out_v[i] = re * re + im * im
    return out
