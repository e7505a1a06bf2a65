"""Hot enumeration kernels.

Every kernel exists twice with the same signature: a loop version compiled
by numba (``*_nb``) and a vectorized numpy version (``*_np``).  The module
level names without suffix point at the backend chosen in
:mod:`noisecorr._accel`.  Both versions sum in a fixed order, so repeated
calls on one backend are bit-identical; the two backends may differ in the
last few ulps.

Packed function tables: ``k`` flat complex arrays concatenated into
``values`` with ``offsets[i]:offsets[i+1]`` holding function ``i``, whose
every coordinate has alphabet ``qs[i]``.  A point ``(x_1..x_n)`` sits at
flat position ``sum_j x_j * qs[i]**(n-1-j)``.
"""
from __future__ import annotations

import itertools

import numpy as np

from ._accel import USE_NUMBA, njit

CHUNK = 1 << 16


# -- brute-force noisy inner product -----------------------------------------

@njit
def nip_bruteforce_nb(values, offsets, qs, support, masses, n):
    m, k = support.shape
    pidx = np.zeros((n + 1, k), np.int64)
    pw = np.ones(n + 1)
    digits = np.zeros(n, np.int64)
    total = 0j
    start = 0
    while True:
        for lvl in range(start, n):
            s = digits[lvl]
            for i in range(k):
                pidx[lvl + 1, i] = pidx[lvl, i] * qs[i] + support[s, i]
            pw[lvl + 1] = pw[lvl] * masses[s]
        prod = 1.0 + 0j
        for i in range(k):
            prod *= values[offsets[i] + pidx[n, i]]
        total += pw[n] * prod
        start = n - 1
        while start >= 0:
            digits[start] += 1
            if digits[start] < m:
                break
            digits[start] = 0
            start -= 1
        if start < 0:
            break
    return total


def nip_bruteforce_np(values, offsets, qs, support, masses, n):
    m, k = support.shape
    total = 0j
    count = m ** n
    place = m ** np.arange(n - 1, -1, -1, dtype=np.int64)
    for lo in range(0, count, CHUNK):
        t = np.arange(lo, min(lo + CHUNK, count), dtype=np.int64)
        digits = (t[:, None] // place) % m
        w = np.prod(masses[digits], axis=1)
        prod = np.ones(len(t), dtype=complex)
        for i in range(k):
            strides = qs[i] ** np.arange(n - 1, -1, -1, dtype=np.int64)
            flat = support[digits, i] @ strides if n else np.zeros(len(t), np.int64)
            prod *= values[offsets[i] + flat]
        total += np.sum(w * prod)
    return total


# -- sparse coefficient expansion ---------------------------------------------

@njit
def nip_sparse_nb(idx, vals, offsets, qs, mflat, zmask, zoff, n):
    k = qs.shape[0]
    pos = np.empty(k, np.int64)
    pref = np.zeros((k + 1, n), np.int64)
    cp = np.ones(k + 1, np.complex128)
    total = 0j
    level = 0
    pos[0] = offsets[0]
    while level >= 0:
        if pos[level] >= offsets[level + 1]:
            level -= 1
            if level >= 0:
                pos[level] += 1
            continue
        e = pos[level]
        base = zoff[level]
        alive = True
        for j in range(n):
            v = pref[level, j] * qs[level] + idx[e, j]
            pref[level + 1, j] = v
            if zmask[base + v]:
                alive = False
                break
        if not alive:
            pos[level] += 1
            continue
        cp[level + 1] = cp[level] * vals[e]
        if level == k - 1:
            term = cp[k]
            for j in range(n):
                term *= mflat[pref[k, j]]
            total += term
            pos[level] += 1
        else:
            level += 1
            pos[level] = offsets[level]
    return total


def nip_sparse_np(idx, vals, offsets, qs, mflat, zmask, zoff, n):
    k = len(qs)
    idx_l = [idx[offsets[i]:offsets[i + 1]] for i in range(k)]
    val_l = [vals[offsets[i]:offsets[i + 1]] for i in range(k)]
    z_l = [zmask[zoff[i]:zoff[i + 1]] for i in range(k)]

    def expand(level, pref, cp):
        if level == k:
            return np.sum(cp * np.prod(mflat[pref], axis=1))
        entries, coeffs = idx_l[level], val_l[level]
        if len(coeffs) == 0:
            return 0j
        total = 0j
        per = max(1, CHUNK // len(coeffs))
        for lo in range(0, len(cp), per):
            nxt = pref[lo:lo + per, None, :] * qs[level] + entries[None, :, :]
            keep = ~z_l[level][nxt].any(axis=2)
            ti, ei = np.nonzero(keep)
            if ti.size:
                total += expand(level + 1, nxt[ti, ei], cp[lo:lo + per][ti] * coeffs[ei])
        return total

    return expand(0, np.zeros((1, n), np.int64), np.ones(1, complex))


# -- Gowers cube enumeration --------------------------------------------------

@njit
def gowers_direct_nb(vals, add, d):
    N = vals.shape[0]
    count = N ** (d + 1)
    pts = np.zeros(d + 1, np.int64)
    total = 0j
    for t in range(count):
        r = t
        for lvl in range(d, -1, -1):
            pts[lvl] = r % N
            r //= N
        prod = 1.0 + 0j
        for s in range(1 << d):
            v = pts[0]
            size = 0
            for i in range(d):
                if (s >> i) & 1:
                    size += 1
                else:
                    v = add[v, pts[i + 1]]
            z = vals[v]
            if size % 2 == 0:
                z = np.conj(z)
            prod *= z
        total += prod
    return total / count


def gowers_direct_np(vals, add, d):
    N = vals.shape[0]
    x = np.arange(N)[:, None]
    last = np.arange(N)[None, :]
    total = 0j
    for head in itertools.product(range(N), repeat=d - 1):
        dirs = list(head) + [last]
        prod = np.ones((N, N), dtype=complex)
        for s in range(1 << d):
            v = x
            for i in range(d):
                if not (s >> i) & 1:
                    v = add[v, dirs[i]]
            z = vals[v]
            if bin(s).count("1") % 2 == 0:
                z = np.conj(z)
            prod = prod * z
        total += prod.sum()
    return total / N ** (d + 1)


@njit
def u2_power_nb(vals, add):
    N = vals.shape[0]
    acc = 0.0
    for y in range(N):
        inner = 0j
        for x in range(N):
            inner += vals[add[x, y]] * np.conj(vals[x])
        inner /= N
        acc += inner.real ** 2 + inner.imag ** 2
    return acc / N


def u2_power_np(vals, add):
    inner = np.conj(vals) @ vals[add] / len(vals)
    return float(np.mean(np.abs(inner) ** 2))


# -- Monte-Carlo sample evaluation -------------------------------------------

@njit
def sample_products_nb(values, offsets, qs, support, choices):
    S, n = choices.shape
    k = qs.shape[0]
    out = np.empty(S, np.complex128)
    for t in range(S):
        prod = 1.0 + 0j
        for i in range(k):
            flat = 0
            for j in range(n):
                flat = flat * qs[i] + support[choices[t, j], i]
            prod *= values[offsets[i] + flat]
        out[t] = prod
    return out


def sample_products_np(values, offsets, qs, support, choices):
    S, n = choices.shape
    out = np.ones(S, dtype=complex)
    for i in range(len(qs)):
        strides = qs[i] ** np.arange(n - 1, -1, -1, dtype=np.int64)
        flat = support[choices, i] @ strides if n else np.zeros(S, np.int64)
        out *= values[offsets[i] + flat]
    return out


if USE_NUMBA:
    nip_bruteforce_kernel = nip_bruteforce_nb
    nip_sparse_kernel = nip_sparse_nb
    gowers_direct_kernel = gowers_direct_nb
    u2_power_kernel = u2_power_nb
    sample_products_kernel = sample_products_nb
else:
    nip_bruteforce_kernel = nip_bruteforce_np
    nip_sparse_kernel = nip_sparse_np
    gowers_direct_kernel = gowers_direct_np
    u2_power_kernel = u2_power_np
    sample_products_kernel = sample_products_np
