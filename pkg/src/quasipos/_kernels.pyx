# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled inner loops: direct nonuniform Fourier sums and stencil derivatives."""

from libc.math cimport sin, cos

import numpy as np


cdef int RESYNC = 64


def fourier_sum(const double[::1] src, const double complex[::1] coeff,
                const double[::1] dst, double sign, bint uniform_dst):
    """out[i] = sum_j coeff[j] * exp(sign * 1j * dst[i] * src[j])."""
    cdef Py_ssize_t n = src.shape[0]
    cdef Py_ssize_t m = dst.shape[0]
    out_arr = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double ang, step_ang, d0, dd
    cdef double complex z, step, c
    if m == 0 or n == 0:
        return out_arr
    if uniform_dst and m > 1:
        d0 = dst[0]
        dd = (dst[m - 1] - dst[0]) / (m - 1)
        for j in range(n):
            c = coeff[j]
            if c == 0:
                continue
            step_ang = sign * dd * src[j]
            step = cos(step_ang) + 1j * sin(step_ang)
            for i in range(m):
                if i % RESYNC == 0:
                    ang = sign * (d0 + i * dd) * src[j]
                    z = cos(ang) + 1j * sin(ang)
                out[i] = out[i] + c * z
                z = z * step
    else:
        for i in range(m):
            for j in range(n):
                ang = sign * dst[i] * src[j]
                out[i] = out[i] + coeff[j] * (cos(ang) + 1j * sin(ang))
    return out_arr


def stencil_derivative(const double complex[::1] values, const double[::1] central,
                       const double[:, ::1] left, double h, bint dirichlet):
    """First derivative on a uniform grid.

    ``central`` holds the 2r+1 centred weights; ``left[i]`` the one-sided
    weights (over the first ``left.shape[1]`` points) for row i < r.  The right edge uses the
    mirrored, sign-flipped left weights.  With ``dirichlet`` the centred
    stencil is used everywhere and values outside the grid are zero.
    """
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t w = central.shape[0]
    cdef Py_ssize_t r = (w - 1) // 2
    cdef Py_ssize_t wl = left.shape[1]
    out_arr = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t i, k, idx
    cdef double complex acc
    for i in range(n):
        acc = 0
        if dirichlet or (i >= r and i < n - r):
            for k in range(w):
                idx = i + k - r
                if idx >= 0 and idx < n:
                    acc = acc + central[k] * values[idx]
        elif i < r:
            for k in range(wl):
                acc = acc + left[i, k] * values[k]
        else:
            for k in range(wl):
                acc = acc - left[n - 1 - i, k] * values[n - 1 - k]
        out[i] = acc / h
    return out_arr
