# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for step functions on the circle and the line."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, atan, atan2, fabs, M_PI

cnp.import_array()

cdef double TWO_PI = 2.0 * M_PI


def jump_fourier_sums(const double[::1] theta, const double[::1] jumps,
                      Py_ssize_t kmin, Py_ssize_t kmax):
    """S_k = sum_j jumps[j] * exp(-i k theta[j]) for kmin <= k <= kmax."""
    cdef Py_ssize_t m = theta.shape[0]
    cdef Py_ssize_t nk = kmax - kmin + 1
    out = np.zeros(nk, dtype=np.complex128)
    cdef double complex[::1] res = out
    cdef Py_ssize_t j, k
    cdef double complex step, cur
    cdef double a
    for j in range(m):
        if jumps[j] == 0.0:
            continue
        a = theta[j]
        step = cos(a) - 1j * sin(a)
        cur = jumps[j] * (cos(kmin * a) - 1j * sin(kmin * a))
        for k in range(nk):
            # reseed periodically to keep the recurrence drift at roundoff level
            if k % 64 == 0 and k > 0:
                cur = jumps[j] * (cos((kmin + k) * a) - 1j * sin((kmin + k) * a))
            res[k] += cur
            cur = cur * step
    return out


def laurent_jump_sum(const double[::1] theta, const double[::1] jumps,
                     const double complex[::1] coeffs, Py_ssize_t low):
    """sum_j jumps[j] * p(exp(i theta[j])) with p = sum_m coeffs[m] z**(low + m)."""
    cdef Py_ssize_t m = theta.shape[0]
    cdef Py_ssize_t nc = coeffs.shape[0]
    cdef Py_ssize_t j, c
    cdef double complex z, acc, total = 0.0
    cdef double a
    for j in range(m):
        if jumps[j] == 0.0:
            continue
        a = theta[j]
        z = cos(a) + 1j * sin(a)
        acc = 0.0
        for c in range(nc - 1, -1, -1):
            acc = acc * z + coeffs[c]
        # z**low on the unit circle
        acc = acc * (cos(low * a) + 1j * sin(low * a))
        total += jumps[j] * acc
    return total


def rational_jump_sum(const double[::1] t, const double[::1] jumps,
                      const double complex[::1] poles, const long[::1] orders,
                      const double complex[::1] coeffs):
    """sum_j jumps[j] * f(t[j]) with f(x) = sum_k coeffs[k] / (x - poles[k])**orders[k]."""
    cdef Py_ssize_t m = t.shape[0]
    cdef Py_ssize_t nt = poles.shape[0]
    cdef Py_ssize_t j, k, r
    cdef double complex total = 0.0, val, base, pw
    for j in range(m):
        if jumps[j] == 0.0:
            continue
        val = 0.0
        for k in range(nt):
            base = 1.0 / (t[j] - poles[k])
            pw = base
            for r in range(1, orders[k]):
                pw = pw * base
            val += coeffs[k] * pw
        total += jumps[j] * val
    return total


def merge_sorted_phases(const double[::1] theta, const double[::1] jumps, double tol):
    """Merge cyclically adjacent phases closer than tol, summing their jumps.

    Input must be sorted ascending in [0, 2*pi). Zero net jumps are dropped.
    """
    cdef Py_ssize_t m = theta.shape[0]
    out_t = np.empty(m, dtype=np.float64)
    out_j = np.empty(m, dtype=np.float64)
    cdef double[::1] ot = out_t
    cdef double[::1] oj = out_j
    cdef Py_ssize_t i, n = 0
    cdef double anchor
    if m == 0:
        return out_t[:0], out_j[:0]
    anchor = theta[0]
    ot[0] = theta[0]
    oj[0] = jumps[0]
    n = 1
    for i in range(1, m):
        if theta[i] - anchor < tol:
            oj[n - 1] += jumps[i]
        else:
            ot[n] = theta[i]
            oj[n] = jumps[i]
            anchor = theta[i]
            n += 1
    # wrap-around: the last cluster may touch the first one across 2*pi
    if n > 1 and ot[0] + TWO_PI - ot[n - 1] < tol:
        oj[0] += oj[n - 1]
        n -= 1
    cdef Py_ssize_t keep = 0
    for i in range(n):
        if oj[i] != 0.0:
            ot[keep] = ot[i]
            oj[keep] = oj[i]
            keep += 1
    return out_t[:keep].copy(), out_j[:keep].copy()


def unwrap_phase(const double complex[::1] values):
    """Continuous argument along the samples, started on the principal branch.

    Returns (unwrapped, max_abs_step). The closing step back to the first
    sample is included in max_abs_step.
    """
    cdef Py_ssize_t g = values.shape[0]
    out = np.empty(g, dtype=np.float64)
    cdef double[::1] res = out
    cdef Py_ssize_t i
    cdef double step, worst = 0.0
    cdef double complex r
    if g == 0:
        return out, 0.0
    res[0] = atan2(values[0].imag, values[0].real)
    for i in range(1, g + 1):
        r = values[i % g] * values[i - 1].conjugate()
        step = atan2(r.imag, r.real)
        if fabs(step) > worst:
            worst = fabs(step)
        if i < g:
            res[i] = res[i - 1] + step
    return out, worst


def arctan_weighted_l1(const double[::1] t, const double[::1] values):
    """integral of |xi| / (1 + t^2) for a line step function with m + 1 values."""
    cdef Py_ssize_t m = t.shape[0]
    cdef Py_ssize_t i
    cdef double total
    if m == 0:
        return fabs(values[0]) * M_PI
    total = fabs(values[0]) * (atan(t[0]) + 0.5 * M_PI)
    for i in range(m - 1):
        total += fabs(values[i + 1]) * (atan(t[i + 1]) - atan(t[i]))
    total += fabs(values[m]) * (0.5 * M_PI - atan(t[m - 1]))
    return total


def truncated_l1(const double[::1] t, const double[::1] values, double radius):
    """integral over [-radius, radius] of |xi| for a line step function."""
    cdef Py_ssize_t m = t.shape[0]
    cdef Py_ssize_t i
    cdef double total = 0.0, lo, hi
    lo = -radius
    for i in range(m + 1):
        hi = t[i] if i < m else radius
        if hi > radius:
            hi = radius
        if hi > lo:
            total += fabs(values[i]) * (hi - lo)
        if i < m and t[i] > lo:
            lo = t[i]
        if lo >= radius:
            break
    return total
