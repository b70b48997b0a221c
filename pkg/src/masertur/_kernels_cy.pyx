# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch kernels: scalar C loops over samples.

Mirror of _kernels_py with the same splitmix64 stream layout and the same
floating-point operation order (built without FMA contraction so the two
backends track each other to rounding; the uniforms agree bitwise).
"""

import numpy as np

from libc.math cimport log1p
from libc.stdint cimport uint64_t

cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15U
cdef uint64_t _MIX1 = 0xBF58476D1CE4E5B9U
cdef uint64_t _MIX2 = 0x94D049BB133111EBU
cdef int _STRIDE = 8
cdef double _TO_UNIT = 1.0 / 9007199254740992.0  # 2**-53


cdef inline uint64_t _finalize(uint64_t z) nogil:
    z ^= z >> 30
    z *= _MIX1
    z ^= z >> 27
    z *= _MIX2
    z ^= z >> 31
    return z


def uniform_streams(seed, start, count, nstreams):
    """Uniforms in [0, 1) for samples [start, start+count), shape (nstreams, count)."""
    if not 0 < nstreams <= _STRIDE:
        raise ValueError(f"nstreams must be in 1..{_STRIDE}")
    out = np.empty((nstreams, count))
    cdef double[:, ::1] view = out
    cdef uint64_t seed64 = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)
    cdef uint64_t first = <uint64_t>start
    cdef Py_ssize_t n = count, streams = nstreams
    cdef Py_ssize_t i, k
    cdef uint64_t counter
    with nogil:
        for k in range(streams):
            for i in range(n):
                counter = (first + <uint64_t>i) * <uint64_t>_STRIDE + <uint64_t>k
                view[k, i] = <double>(
                    _finalize(seed64 + (counter + 1) * _GOLDEN) >> 11
                ) * _TO_UNIT
    return out


def batch_uncertainty(double[::1] gu, double[::1] gl, double[::1] nu,
                      double[::1] nl, double[::1] eps, double[::1] dlt):
    """Uncertainty figures for arrays of valid parameter points.

    Returns (mean_q, mean_cl, q, q_cl, q_pop, advantage); same contract
    and operation order as the numpy fallback.
    """
    cdef Py_ssize_t n = gu.shape[0]
    if (gl.shape[0] != n or nu.shape[0] != n or nl.shape[0] != n
            or eps.shape[0] != n or dlt.shape[0] != n):
        raise ValueError("parameter arrays must have equal length")
    mean_q = np.empty(n)
    mean_cl = np.empty(n)
    q = np.empty(n)
    q_cl = np.empty(n)
    q_pop = np.empty(n)
    advantage = np.empty(n)
    cdef double[::1] v_mean_q = mean_q, v_mean_cl = mean_cl, v_q = q
    cdef double[::1] v_q_cl = q_cl, v_q_pop = q_pop, v_adv = advantage
    cdef Py_ssize_t i
    cdef double gamma_big, ssq, gamma_c, a_pop, gg, c1, a1
    cdef double fano_pop, c_cl, c_diff, ln_ratio, sigma, qp, qc, adv
    with nogil:
        for i in range(n):
            gamma_big = 0.5 * (gu[i] * nu[i] + gl[i] * nl[i])
            ssq = dlt[i] * dlt[i] + gamma_big * gamma_big
            gamma_c = 2.0 * eps[i] * eps[i] * gamma_big / ssq
            a_pop = 3.0 * nl[i] * nu[i] + nl[i] + nu[i]
            gg = gu[i] * gl[i]
            c1 = 2.0 * gamma_c * (3.0 * gamma_big + gl[i] + gu[i]) + gg * a_pop
            a1 = (gg * ssq * a_pop
                  + 4.0 * eps[i] * eps[i] * gamma_big * (3.0 * gamma_big + gl[i] + gu[i]))
            v_mean_q[i] = 2.0 * eps[i] * eps[i] * gg * (nl[i] - nu[i]) * gamma_big / a1
            v_mean_cl[i] = gamma_c * gg * (nl[i] - nu[i]) / c1
            fano_pop = (2.0 * nl[i] * nu[i] + nl[i] + nu[i]) / (nl[i] - nu[i])
            c_cl = (2.0 * gamma_c + 4.0 * gamma_big + gl[i] + gu[i]) / c1
            c_diff = ((gamma_big * gamma_big - dlt[i] * dlt[i]) / ssq) \
                * (gg / gamma_big) * (a_pop / c1)
            ln_ratio = log1p((nl[i] - nu[i]) / (nu[i] * (nl[i] + 1.0)))
            sigma = ln_ratio * v_mean_cl[i]
            qp = ln_ratio * fano_pop
            qc = qp + (-2.0 * sigma * c_cl)
            adv = -2.0 * sigma * c_diff
            v_q_pop[i] = qp
            v_q_cl[i] = qc
            v_adv[i] = adv
            v_q[i] = qc + adv
    return mean_q, mean_cl, q, q_cl, q_pop, advantage
