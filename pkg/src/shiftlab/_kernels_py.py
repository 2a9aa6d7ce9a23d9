"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Signatures and results match the compiled module; the compiled one is
preferred at import time when it is available.
"""

import numpy as np


def jump_fourier_sums(theta, jumps, kmin, kmax):
    theta = np.asarray(theta, dtype=float)
    jumps = np.asarray(jumps, dtype=float)
    k = np.arange(kmin, kmax + 1)
    if theta.size == 0:
        return np.zeros(k.size, dtype=complex)
    return np.exp(-1j * np.outer(k, theta)) @ jumps


def laurent_jump_sum(theta, jumps, coeffs, low):
    theta = np.asarray(theta, dtype=float)
    jumps = np.asarray(jumps, dtype=float)
    if theta.size == 0:
        return 0j
    z = np.exp(1j * theta)
    acc = np.zeros_like(z)
    for c in np.asarray(coeffs, dtype=complex)[::-1]:
        acc = acc * z + c
    acc = acc * np.exp(1j * low * theta)
    return complex(np.dot(jumps, acc))


def rational_jump_sum(t, jumps, poles, orders, coeffs):
    t = np.asarray(t, dtype=float)
    jumps = np.asarray(jumps, dtype=float)
    if t.size == 0:
        return 0j
    val = np.zeros(t.size, dtype=complex)
    for z, m, c in zip(poles, orders, coeffs):
        val += c / (t - z) ** int(m)
    return complex(np.dot(jumps, val))


def merge_sorted_phases(theta, jumps, tol):
    theta = np.asarray(theta, dtype=float)
    jumps = np.asarray(jumps, dtype=float)
    if theta.size == 0:
        return theta.copy(), jumps.copy()
    out_t = [theta[0]]
    out_j = [jumps[0]]
    anchor = theta[0]
    for a, j in zip(theta[1:], jumps[1:]):
        if a - anchor < tol:
            out_j[-1] += j
        else:
            out_t.append(a)
            out_j.append(j)
            anchor = a
    if len(out_t) > 1 and out_t[0] + 2 * np.pi - out_t[-1] < tol:
        out_j[0] += out_j.pop()
        out_t.pop()
    out_t = np.array(out_t)
    out_j = np.array(out_j)
    keep = out_j != 0.0
    return out_t[keep], out_j[keep]


def unwrap_phase(values):
    values = np.asarray(values, dtype=complex)
    if values.size == 0:
        return np.empty(0), 0.0
    ratios = values[np.r_[1:values.size, 0]] * np.conj(values)
    steps = np.angle(ratios)
    out = np.angle(values[0]) + np.concatenate(([0.0], np.cumsum(steps[:-1])))
    return out, float(np.max(np.abs(steps)))


def arctan_weighted_l1(t, values):
    t = np.asarray(t, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    edges = np.concatenate(([-np.pi / 2], np.arctan(t), [np.pi / 2]))
    return float(np.dot(values, np.diff(edges)))


def truncated_l1(t, values, radius):
    t = np.asarray(t, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    edges = np.clip(np.concatenate(([-radius], t, [radius])), -radius, radius)
    return float(np.dot(values, np.diff(edges)))
