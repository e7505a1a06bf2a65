"""Gowers uniformity norms of functions on Z_p^n.

Four routes compute ``||f||_{U^d}^{2^d}``: direct enumeration of the cube
average, the derivative recursion, the noisy inner product of the ``2^d``
conjugated copies over the cube distribution, and (d = 2 only) the sum of
fourth powers of standard Fourier coefficients.

Conjugation convention: the copy at cube vertex ``S`` is conjugated when
``|S|`` is even, i.e. ``C^{|S|+1}`` with ``C`` applied that many times.  The
vertex ``S`` evaluates ``f`` at ``X + sum_{i not in S} Y_i``.  The opposite
parity gives the complex conjugate of the same (real) average, so both
conventions yield the same norm.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .bounds import BoundCertificate
from .correlation import nip_bruteforce
from .fourier import DenseFunction, FourierRepresentation
from .spaces import ap_distribution, cube_subsets, gowers_cube_distribution, is_prime

ENUM_CAP = 10 ** 8
ADD_TABLE_CAP = 4096


class RouteRefused(ValueError):
    """The requested route would exceed its enumeration cap."""


class Route(str, enum.Enum):
    DIRECT = "direct"
    RECURSIVE = "recursive"
    CUBE_NIP = "cube_nip"
    U2_CLOSED_FORM = "u2_closed_form"


@dataclass(frozen=True)
class GowersResult:
    d: int
    value: float
    raw: complex
    route: Route


def _result(d: int, raw: complex, route: Route) -> GowersResult:
    raw = complex(raw)
    return GowersResult(d, abs(raw) ** (1.0 / 2 ** d), raw, route)


def _prime_alphabet(f: DenseFunction) -> int:
    if f.n == 0:
        raise ValueError("Gowers norms need n >= 1")
    p = f.sizes[0]
    if any(s != p for s in f.sizes) or not is_prime(p):
        raise ValueError(f"expected a function on Z_p^n, got alphabet {f.sizes}")
    return p


def addition_table(p: int, n: int) -> np.ndarray:
    """``add[a, b]`` = code of ``digits(a) + digits(b) mod p`` (C-order codes)."""
    N = p ** n
    if N > ADD_TABLE_CAP:
        raise RouteRefused(f"group of order {N} exceeds addition-table cap {ADD_TABLE_CAP}")
    if p == 2:
        codes = np.arange(N)
        return np.bitwise_xor.outer(codes, codes).astype(np.int64)
    digits = np.array(np.unravel_index(np.arange(N), (p,) * n)).T
    summed = (digits[:, None, :] + digits[None, :, :]) % p
    return np.ravel_multi_index(tuple(np.moveaxis(summed, -1, 0)), (p,) * n).astype(np.int64)


def gowers_direct(f: DenseFunction, d: int, cap: int = ENUM_CAP) -> GowersResult:
    p = _prime_alphabet(f)
    if d < 1:
        raise ValueError("d must be at least 1")
    N = p ** f.n
    if N ** (d + 1) > cap:
        raise RouteRefused(f"{N}^{d + 1} cube points exceed cap {cap}")
    raw = kernels.gowers_direct_kernel(f.values.ravel(), addition_table(p, f.n), d)
    return _result(d, raw, Route.DIRECT)


def _recursive_power(vals: np.ndarray, add: np.ndarray, d: int) -> complex:
    if d == 1:
        return abs(vals.mean()) ** 2
    if d == 2:
        return kernels.u2_power_kernel(vals, add)
    conj = np.conj(vals)
    total = 0j
    for y in range(len(vals)):
        total += _recursive_power(vals[add[:, y]] * conj, add, d - 1)
    return total / len(vals)


def gowers_recursive(f: DenseFunction, d: int, cap: int = ENUM_CAP) -> GowersResult:
    """``E_Y ||f_Y||_{U^{d-1}}^{2^{d-1}}`` with ``f_Y(X) = f(X+Y) conj(f(X))``."""
    p = _prime_alphabet(f)
    if d < 1:
        raise ValueError("d must be at least 1")
    N = p ** f.n
    if N ** max(d, 1) > cap:
        raise RouteRefused(f"{N}^{d} evaluations exceed cap {cap}")
    vals = np.ascontiguousarray(f.values.ravel())
    add = addition_table(p, f.n) if d >= 2 else None
    return _result(d, _recursive_power(vals, add, d), Route.RECURSIVE)


def gowers_via_cube_nip(f: DenseFunction, d: int, cap: int = ENUM_CAP) -> GowersResult:
    p = _prime_alphabet(f)
    mu = gowers_cube_distribution(p, d)
    conj = DenseFunction(f.sizes, np.conj(f.values))
    copies = [conj if len(s) % 2 == 0 else f for s in cube_subsets(d)]
    raw = nip_bruteforce(copies, mu, cap=cap).value
    return _result(d, raw, Route.CUBE_NIP)


def u2_closed_form(fhat: FourierRepresentation) -> GowersResult:
    """``(sum |fhat|^4)^(1/4)``; valid for coefficients in the standard basis."""
    raw = sum(abs(c) ** 4 for c in fhat.coeffs.values())
    return _result(2, raw, Route.U2_CLOSED_FORM)


def gowers_norm(f: DenseFunction, d: int, cap: int = ENUM_CAP) -> GowersResult:
    """Direct route when it fits under ``cap``, the recursion otherwise."""
    try:
        return gowers_direct(f, d, cap)
    except RouteRefused:
        return gowers_recursive(f, d, cap)


def check_gowers_inequality(fs: Sequence[DenseFunction], p: int,
                            tol: float = 1e-9) -> BoundCertificate:
    """``|E[prod f_i(iX + Y)]| <= min_i ||f_i||_{U^{k-1}}`` for 1-bounded ``f_i``."""
    k = len(fs)
    for f in fs:
        if f.sizes and f.sizes[0] != p:
            raise ValueError(f"functions must live on Z_{p}^n")
        if np.max(np.abs(f.values)) > 1 + 1e-9:
            raise ValueError("functions must be bounded by 1")
    mu = ap_distribution(p, k)
    lhs = abs(nip_bruteforce(list(fs), mu).value)
    rhs = min(gowers_norm(f, k - 1).value for f in fs)
    return BoundCertificate.build("gowers_ap", lhs, rhs, tol=tol)
