"""Noisy inner products ``E[prod_i f_i(X_i)]`` over i.i.d. columns drawn from a
joint law, computed by exhaustive enumeration, by sparse Fourier expansion
against the column moment tensor, or by Monte-Carlo sampling.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .fourier import DenseFunction, FourierRepresentation, OrthonormalBasis
from .spaces import JointDistribution, marginal

MOMENT_CAP = 10 ** 6
#: Moments at or below this magnitude are stored as exact zeros.
MOMENT_SNAP = 1e-13
BRUTEFORCE_CAP = 10 ** 8
RNG_NAME = "numpy.random.PCG64"


class Method(str, enum.Enum):
    BRUTEFORCE = "bruteforce"
    FOURIER = "fourier"
    MONTECARLO = "montecarlo"


@dataclass(frozen=True)
class NipResult:
    value: complex
    method: Method
    stderr: float | None = None

    def __abs__(self):
        return abs(self.value)


@dataclass(frozen=True, eq=False)
class ColumnMomentTensor:
    """``M[a_1..a_k] = E_mu[prod_i chi_{i,a_i}(x_i)]`` for one column."""

    sizes: tuple
    table: np.ndarray

    @property
    def k(self) -> int:
        return len(self.sizes)

    def __getitem__(self, digits) -> complex:
        return complex(self.table[tuple(digits)])

    def zero_prefix_masks(self) -> list[np.ndarray]:
        """For each prefix length l = 1..k, which prefixes have every
        completion equal to zero."""
        zero = self.table == 0
        masks = []
        for lvl in range(1, self.k + 1):
            rows = int(np.prod(self.sizes[:lvl]))
            masks.append(zero.reshape(rows, -1).all(axis=1))
        return masks


def column_moments(mu: JointDistribution, bases: Sequence[OrthonormalBasis],
                   cap: int = MOMENT_CAP) -> ColumnMomentTensor:
    if len(bases) != mu.k:
        raise ValueError(f"need one basis per component ({mu.k}), got {len(bases)}")
    sizes = mu.sizes
    if tuple(b.q for b in bases) != sizes:
        raise ValueError(f"basis sizes {[b.q for b in bases]} do not match {sizes}")
    total = int(np.prod(sizes))
    if total > cap:
        raise ValueError(f"moment tensor of {total} entries exceeds cap {cap}")
    table = np.zeros(sizes, dtype=complex)
    for row, m in zip(mu.support, mu.mass):
        outer = np.array(m, dtype=complex)
        for b, a in zip(bases, row):
            outer = np.multiply.outer(outer, b.table[:, a])
        table += outer
    table[np.abs(table) <= MOMENT_SNAP] = 0
    table.setflags(write=False)
    return ColumnMomentTensor(sizes, table)


def _check_dense(fs: Sequence[DenseFunction], mu: JointDistribution) -> int:
    if not fs:
        raise ValueError("need at least one function")
    if len(fs) != mu.k:
        raise ValueError(f"{len(fs)} functions for a {mu.k}-component law")
    n = fs[0].n
    for f, q in zip(fs, mu.sizes):
        if f.n != n:
            raise ValueError("functions disagree on n")
        if any(s != q for s in f.sizes):
            raise ValueError(f"function alphabet {f.sizes} does not match component size {q}")
    return n


def _pack(fs: Sequence[DenseFunction]):
    flat = [np.ascontiguousarray(f.values).ravel() for f in fs]
    offsets = np.zeros(len(flat) + 1, np.int64)
    offsets[1:] = np.cumsum([len(v) for v in flat])
    return np.concatenate(flat), offsets


def nip_bruteforce(fs: Sequence[DenseFunction], mu: JointDistribution,
                   cap: int = BRUTEFORCE_CAP) -> NipResult:
    """Exact sum over all ``|support|^n`` column assignments."""
    n = _check_dense(fs, mu)
    if len(mu) ** n > cap:
        raise ValueError(f"{len(mu)}^{n} assignments exceed cap {cap}")
    values, offsets = _pack(fs)
    qs = np.array(mu.sizes, np.int64)
    total = kernels.nip_bruteforce_kernel(values, offsets, qs, mu.support, mu.mass, n)
    return NipResult(complex(total), Method.BRUTEFORCE)


def _check_sparse(fhats: Sequence[FourierRepresentation], sizes) -> int:
    if not fhats:
        raise ValueError("need at least one function")
    if len(fhats) != len(sizes):
        raise ValueError(f"{len(fhats)} functions for a {len(sizes)}-component law")
    n = fhats[0].n
    for f, q in zip(fhats, sizes):
        if f.n != n:
            raise ValueError("functions disagree on n")
        if any(s != q for s in f.sizes):
            raise ValueError(f"function alphabet {f.sizes} does not match component size {q}")
    return n


def nip_fourier(fhats: Sequence[FourierRepresentation], M: ColumnMomentTensor) -> NipResult:
    """Sum of ``prod_i fhat_i(sigma_i) * prod_j M[sigma_1j..sigma_kj]`` over the
    sparse cross-product of stored coefficients.

    A partial tuple is abandoned as soon as some coordinate's prefix of
    digits admits only zero moments; under pairwise independence this kills
    every column pattern of weight 1 or 2 early.
    """
    n = _check_sparse(fhats, M.sizes)
    idx_parts, val_parts = [], []
    for f in fhats:
        keys = list(f.coeffs)
        idx_parts.append(np.array(keys, np.int64).reshape(len(keys), n))
        val_parts.append(np.array([f.coeffs[s] for s in keys], complex))
    offsets = np.zeros(len(fhats) + 1, np.int64)
    offsets[1:] = np.cumsum([len(v) for v in val_parts])
    masks = M.zero_prefix_masks()
    zoff = np.zeros(len(masks) + 1, np.int64)
    zoff[1:] = np.cumsum([len(z) for z in masks])
    total = kernels.nip_sparse_kernel(
        np.concatenate(idx_parts), np.concatenate(val_parts), offsets,
        np.array(M.sizes, np.int64), np.ascontiguousarray(M.table).ravel(),
        np.concatenate(masks), zoff, n)
    return NipResult(complex(total), Method.FOURIER)


def dense_mean(f: DenseFunction, mu: JointDistribution, i: int) -> complex:
    """``E[f]`` under the i.i.d. product of the i-th marginal."""
    w = marginal(mu, i).mass
    vals = f.values
    for _ in range(f.n):
        vals = np.tensordot(vals, w, axes=([0], [0]))
    return complex(vals)


def noise_correlation(fs, mu: JointDistribution,
                      bases: Sequence[OrthonormalBasis] | None = None) -> complex:
    """Noisy inner product minus the product of means.

    Dense functions go through :func:`nip_bruteforce`; Fourier
    representations need ``bases`` and go through :func:`nip_fourier`.
    """
    if all(isinstance(f, FourierRepresentation) for f in fs):
        if bases is None:
            raise ValueError("Fourier inputs need bases")
        value = nip_fourier(fs, column_moments(mu, bases)).value
        means = [f.mean for f in fs]
    else:
        value = nip_bruteforce(fs, mu).value
        means = [dense_mean(f, mu, i) for i, f in enumerate(fs)]
    return value - complex(np.prod(means))


def nip_montecarlo(fs: Sequence[DenseFunction], mu: JointDistribution,
                   samples: int, seed: int) -> NipResult:
    """Average of ``prod_i f_i(X_i)`` over ``samples`` independent matrices.

    Columns are drawn with :data:`RNG_NAME` seeded by ``seed``.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    n = _check_dense(fs, mu)
    rng = np.random.Generator(np.random.PCG64(seed))
    choices = rng.choice(len(mu), size=(samples, n), p=mu.mass)
    values, offsets = _pack(fs)
    prods = kernels.sample_products_kernel(
        values, offsets, np.array(mu.sizes, np.int64), mu.support, choices.astype(np.int64))
    mean = complex(np.mean(prods))
    stderr = float(np.std(prods, ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return NipResult(mean, Method.MONTECARLO, stderr)
