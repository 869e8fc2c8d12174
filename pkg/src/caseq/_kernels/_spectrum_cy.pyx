# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled spectrum kernel: per-grid-point sinc sum over the subcarriers."""

import numpy as np

from cython.parallel cimport prange
from libc.math cimport cos, sin, M_PI


cdef double _point_power(double f, const double complex* amps,
                         const double* sub_freqs, Py_ssize_t ns,
                         double pulse_t) noexcept nogil:
    cdef Py_ssize_t n
    cdef double v, phase, sinc, d_re, d_im, a_re, a_im
    cdef double acc_re = 0.0
    cdef double acc_im = 0.0
    for n in range(ns):
        v = (f - sub_freqs[n]) * pulse_t
        phase = M_PI * v
        if v == 0.0:
            sinc = pulse_t
        else:
            sinc = pulse_t * sin(phase) / phase
        # D = sinc * exp(-1j * phase)
        d_re = sinc * cos(phase)
        d_im = -sinc * sin(phase)
        a_re = amps[n].real
        a_im = amps[n].imag
        acc_re += a_re * d_re - a_im * d_im
        acc_im += a_re * d_im + a_im * d_re
    return acc_re * acc_re + acc_im * acc_im


def spectrum_power(double[::1] freqs, double complex[::1] amps,
                   double[::1] sub_freqs, double pulse_t, int num_threads=1):
    """|sum_n amps[n] * D(f - sub_freqs[n])|^2 on the frequency grid.

    Matches caseq._kernels._spectrum_np.spectrum_power; parallel over grid
    points, each evaluated independently, so the result does not depend on
    num_threads.
    """
    cdef Py_ssize_t nf = freqs.shape[0]
    cdef Py_ssize_t ns = sub_freqs.shape[0]
    out_arr = np.empty(nf, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i
    if num_threads < 1:
        num_threads = 1
    if num_threads == 1:
        for i in range(nf):
            out[i] = _point_power(freqs[i], &amps[0], &sub_freqs[0], ns, pulse_t)
    else:
        for i in prange(nf, nogil=True, num_threads=num_threads, schedule="static"):
            out[i] = _point_power(freqs[i], &amps[0], &sub_freqs[0], ns, pulse_t)
    return out_arr
