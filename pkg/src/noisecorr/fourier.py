"""Orthonormal bases and sparse multi-index Fourier transforms on product spaces.

Conventions:

* a basis is a ``(q, q)`` table with ``table[a, x] = chi_a(x)`` and
  ``chi_0 == 1``;
* a multi-index is a plain tuple of ints, one digit per coordinate;
* dense functions hold an ``n``-dimensional array whose C-order ravel is the
  lexicographic order of points of ``Omega^n``.
"""
from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .spaces import Distribution, FiniteSpace, JointDistribution, marginal, min_atom_alpha

DROP_TOL = 1e-12
BASIS_TOL = 1e-10

#: Degree of the zero function; compares below every integer and behaves as
#: minus infinity in degree arithmetic.
BOTTOM = -math.inf


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    space: FiniteSpace
    measure: Distribution
    table: np.ndarray
    kind: str = "gram_schmidt"

    def __post_init__(self):
        table = np.array(self.table, dtype=complex)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        q = self.space.size
        if table.shape != (q, q):
            raise ValueError(f"basis table must be {q}x{q}")

    @property
    def q(self) -> int:
        return self.space.size

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.table.imag == 0))

    def gram(self) -> np.ndarray:
        w = self.measure.mass
        return (self.table * w) @ self.table.conj().T

    def check(self, tol: float = BASIS_TOL) -> None:
        if np.max(np.abs(self.table[0] - 1)) > tol:
            raise ValueError("chi_0 is not identically 1")
        if np.max(np.abs(self.gram() - np.eye(self.q))) > tol:
            raise ValueError("basis is not orthonormal")


def gram_schmidt_basis(space: FiniteSpace, nu: Distribution,
                       tol: float = BASIS_TOL) -> OrthonormalBasis:
    """Real orthonormal basis of L^2(nu) starting from the constant function.

    Zero-mass atoms are stripped first, so the basis lives on the support of
    ``nu``.  After the constant, atom indicators are orthonormalized in atom
    order (dependent ones skipped); each function is signed so its last
    nonzero value is positive.
    """
    keep = [a for a in range(space.size) if nu.mass[a] > 0]
    if len(keep) != space.size:
        space = FiniteSpace(tuple(space.atoms[a] for a in keep))
        nu = Distribution(space, nu.mass[keep] / nu.mass[keep].sum())
    q = space.size
    w = nu.mass
    funcs = [np.ones(q)]
    for a in range(q):
        if len(funcs) == q:
            break
        v = np.zeros(q)
        v[a] = 1.0
        for u in funcs:
            v = v - np.sum(w * v * u) * u
        norm = math.sqrt(np.sum(w * v * v))
        if norm <= tol:
            continue
        v = v / norm
        nz = np.flatnonzero(np.abs(v) > tol)
        if v[nz[-1]] < 0:
            v = -v
        funcs.append(v)
    return OrthonormalBasis(space, nu, np.array(funcs), kind="gram_schmidt")


def standard_fourier_basis(q: int, space: FiniteSpace | None = None) -> OrthonormalBasis:
    """Characters ``chi_y(x) = exp(2 pi i x y / q)`` under the uniform measure.

    Atoms of ``space`` are identified with Z_q through their order.
    """
    space = space if space is not None else FiniteSpace.range(q)
    if space.size != q:
        raise ValueError("space size does not match q")
    x = np.arange(q)
    table = np.exp(2j * np.pi * np.outer(x, x) / q)
    if q <= 2:
        table = table.real.round()  # exact +-1 characters
    return OrthonormalBasis(space, Distribution.uniform(space), table, kind="standard")


def default_basis(nu: Distribution, real: bool = False) -> OrthonormalBasis:
    """Standard characters for uniform measures, Gram-Schmidt otherwise.

    ``real=True`` forces Gram-Schmidt, giving a real basis even for uniform
    measures.
    """
    if nu.is_uniform() and not real:
        return standard_fourier_basis(nu.space.size, nu.space)
    return gram_schmidt_basis(nu.space, nu)


def default_bases(mu: JointDistribution, real: bool = False) -> list[OrthonormalBasis]:
    return [default_basis(marginal(mu, i), real) for i in range(mu.k)]


# -- multi-indices -----------------------------------------------------------

def support(sigma: Sequence[int]) -> frozenset:
    return frozenset(j for j, s in enumerate(sigma) if s > 0)


def weight(sigma: Sequence[int]) -> int:
    return sum(1 for s in sigma if s > 0)


# -- function containers -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class DenseFunction:
    """Complex values on ``Omega_1 x ... x Omega_n``, shape ``sizes``."""

    sizes: tuple
    values: np.ndarray

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        values = np.array(self.values, dtype=complex).reshape(sizes)
        values.setflags(write=False)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return len(self.sizes)

    @classmethod
    def from_callable(cls, sizes: Sequence[int], func) -> "DenseFunction":
        """Tabulate ``func(point_tuple)`` over all points in lexicographic order."""
        sizes = tuple(sizes)
        vals = np.array([func(pt) for pt in np.ndindex(*sizes)], dtype=complex)
        return cls(sizes, vals.reshape(sizes))

    def __mul__(self, c):
        return DenseFunction(self.sizes, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class FourierRepresentation:
    """Sparse map from multi-index to coefficient."""

    sizes: tuple
    coeffs: Mapping = field(default_factory=dict)

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        clean = {}
        for sigma, c in self.coeffs.items():
            sigma = tuple(int(s) for s in sigma)
            if len(sigma) != len(sizes) or any(not 0 <= s < q for s, q in zip(sigma, sizes)):
                raise ValueError(f"multi-index {sigma} out of range for sizes {sizes}")
            clean[sigma] = complex(c)
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @property
    def n(self) -> int:
        return len(self.sizes)

    @classmethod
    def constant(cls, sizes: Sequence[int], c: complex = 1.0) -> "FourierRepresentation":
        sizes = tuple(sizes)
        return cls(sizes, {(0,) * len(sizes): c} if c != 0 else {})

    @classmethod
    def character(cls, sizes: Sequence[int], sigma: Sequence[int],
                  c: complex = 1.0) -> "FourierRepresentation":
        return cls(tuple(sizes), {tuple(sigma): c})

    def __getitem__(self, sigma) -> complex:
        return self.coeffs.get(tuple(sigma), 0j)

    def __len__(self):
        return len(self.coeffs)

    def items(self):
        return self.coeffs.items()

    @property
    def mean(self) -> complex:
        return self[(0,) * self.n]

    def norm2(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def scaled(self, c: complex) -> "FourierRepresentation":
        return FourierRepresentation(self.sizes, {s: v * c for s, v in self.items()})

    def centered(self) -> "FourierRepresentation":
        """The function minus its mean."""
        zero = (0,) * self.n
        return FourierRepresentation(self.sizes, {s: v for s, v in self.items() if s != zero})

    def to_dense_coeffs(self) -> np.ndarray:
        arr = np.zeros(self.sizes, dtype=complex)
        for sigma, c in self.items():
            arr[sigma] = c
        return arr

    @classmethod
    def from_dense_coeffs(cls, arr: np.ndarray, drop_tol: float = DROP_TOL) -> "FourierRepresentation":
        arr = np.asarray(arr, dtype=complex)
        idx = np.argwhere(np.abs(arr) > drop_tol)
        return cls(arr.shape, {tuple(int(v) for v in i): arr[tuple(i)] for i in idx})


def _broadcast_bases(bases, n: int) -> list[OrthonormalBasis]:
    if isinstance(bases, OrthonormalBasis):
        return [bases] * n
    bases = list(bases)
    if len(bases) != n:
        raise ValueError(f"need {n} bases, got {len(bases)}")
    return bases


def _apply_axes(arr: np.ndarray, mats: Sequence[np.ndarray]) -> np.ndarray:
    """Contract ``mats[j]`` (shape ``(out, in)``) against axis ``j`` of ``arr``."""
    for j, mat in enumerate(mats):
        arr = np.moveaxis(np.tensordot(mat, arr, axes=([1], [j])), 0, j)
    return arr


def transform(f: DenseFunction, bases, drop_tol: float = DROP_TOL) -> FourierRepresentation:
    """Coefficients ``E[f * conj(chi_sigma)]`` under the product of basis measures."""
    bases = _broadcast_bases(bases, f.n)
    if tuple(b.q for b in bases) != f.sizes:
        raise ValueError(f"bases sizes {[b.q for b in bases]} do not match {f.sizes}")
    mats = [b.table.conj() * b.measure.mass for b in bases]
    return FourierRepresentation.from_dense_coeffs(_apply_axes(f.values, mats), drop_tol)


def inverse_transform(fhat: FourierRepresentation, bases) -> DenseFunction:
    bases = _broadcast_bases(bases, fhat.n)
    if tuple(b.q for b in bases) != fhat.sizes:
        raise ValueError(f"bases sizes {[b.q for b in bases]} do not match {fhat.sizes}")
    mats = [b.table.T for b in bases]
    return DenseFunction(fhat.sizes, _apply_axes(fhat.to_dense_coeffs(), mats))


def character_table(sizes: Sequence[int], sigma: Sequence[int], bases) -> DenseFunction:
    """Dense table of the tensor character ``chi_sigma``."""
    return inverse_transform(FourierRepresentation.character(sizes, sigma), bases)


def degree(fhat: FourierRepresentation) -> int | float:
    """Largest stored weight, or :data:`BOTTOM` for the zero function."""
    if not fhat.coeffs:
        return BOTTOM
    return max(weight(s) for s in fhat.coeffs)


_RELATIONS = {
    "<=": operator.le, "<": operator.lt, "==": operator.eq, "=": operator.eq,
    ">": operator.gt, ">=": operator.ge,
}


def truncate(fhat: FourierRepresentation, mode: str, d: int) -> FourierRepresentation:
    """Keep coefficients whose weight ``w`` satisfies ``w <mode> d``."""
    try:
        rel = _RELATIONS[mode]
    except KeyError:
        raise ValueError(f"unknown truncation mode {mode!r}") from None
    return FourierRepresentation(fhat.sizes, {s: c for s, c in fhat.items() if rel(weight(s), d)})


def sup_coefficient(fhat: FourierRepresentation, include_zero: bool = True) -> float:
    zero = (0,) * fhat.n
    mags = [abs(c) for s, c in fhat.items() if include_zero or s != zero]
    return max(mags, default=0.0)


def lp_norm(f: DenseFunction, p: float, measure) -> float:
    """``E[|f|^p]^(1/p)`` under the product measure; ``p=inf`` gives the max
    over points of positive probability.

    ``measure`` is one :class:`Distribution` (used on every coordinate) or a
    sequence of ``n`` of them.
    """
    if isinstance(measure, Distribution):
        measure = [measure] * f.n
    weights = np.ones(())
    for nu in measure:
        weights = np.multiply.outer(weights, nu.mass)
    absf = np.abs(f.values)
    if math.isinf(p):
        return float(absf[weights > 0].max())
    return float(np.sum(weights * absf ** p) ** (1.0 / p))


def chi_inf_bound(bases: Sequence[OrthonormalBasis], sigma: Sequence[int]) -> float:
    """``alpha^(-|sigma|/2)`` with ``alpha`` the smallest atom mass among the bases."""
    alpha = min(min_atom_alpha(b.measure) for b in bases)
    return alpha ** (-weight(sigma) / 2)
