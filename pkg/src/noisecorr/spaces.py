"""Finite probability spaces and joint column distributions.

A :class:`JointDistribution` is the law of one column of the k x n random
matrix whose rows are fed to ``f_1, ..., f_k``.  It is stored sparsely over
its support; atoms are referred to by their index in the component space.

All indices (components, coordinates, subset members) are 0-based.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

MASS_TOL = 1e-6
INDEPENDENCE_TOL = 1e-9


@dataclass(frozen=True)
class FiniteSpace:
    atoms: tuple

    def __post_init__(self):
        atoms = tuple(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("a finite space needs at least one atom")
        if len(set(atoms)) != len(atoms):
            raise ValueError(f"atoms are not distinct: {atoms!r}")

    @classmethod
    def range(cls, q: int) -> "FiniteSpace":
        return cls(tuple(range(q)))

    @property
    def size(self) -> int:
        return len(self.atoms)

    def index(self, atom: Hashable) -> int:
        return self.atoms.index(atom)


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Distribution:
    space: FiniteSpace
    mass: np.ndarray

    def __post_init__(self):
        mass = _frozen(self.mass, float)
        object.__setattr__(self, "mass", mass)
        if mass.shape != (self.space.size,):
            raise ValueError("one mass per atom required")
        if np.any(mass < 0):
            raise ValueError("negative mass")
        if abs(mass.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {mass.sum()!r}, not 1")

    @classmethod
    def uniform(cls, space: FiniteSpace) -> "Distribution":
        return cls(space, np.full(space.size, 1.0 / space.size))

    def is_uniform(self, tol: float = INDEPENDENCE_TOL) -> bool:
        return bool(np.all(np.abs(self.mass - 1.0 / self.space.size) <= tol))


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Sparse law on ``Omega_1 x ... x Omega_k``.

    ``support`` is an ``(m, k)`` integer array of atom indices and ``mass``
    the matching probabilities.
    """

    spaces: tuple
    support: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        spaces = tuple(self.spaces)
        object.__setattr__(self, "spaces", spaces)
        support = _frozen(self.support, np.int64)
        mass = _frozen(self.mass, float)
        if support.ndim != 2 or support.shape[1] != len(spaces):
            raise ValueError("support must have one column per component space")
        if mass.shape != (support.shape[0],):
            raise ValueError("one mass per support tuple required")
        if np.any(mass < 0):
            raise ValueError("negative mass")
        if abs(mass.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {mass.sum()!r}, not 1")
        sizes = np.array([s.size for s in spaces])
        if support.size and (np.any(support < 0) or np.any(support >= sizes)):
            raise ValueError("support atom outside its component space")
        if len({tuple(r) for r in support.tolist()}) != len(support):
            raise ValueError("support tuples are not distinct")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "mass", mass)

    @classmethod
    def from_mapping(cls, spaces: Sequence[FiniteSpace],
                     table: Mapping[tuple, float] | Iterable[tuple[tuple, float]],
                     by_label: bool = False) -> "JointDistribution":
        """Build from ``{atom_tuple: mass}`` pairs, merging repeated tuples.

        Tuples are atom indices unless ``by_label`` is set.  Zero-mass
        entries are dropped; support order is first appearance.
        """
        items = table.items() if isinstance(table, Mapping) else table
        merged: dict[tuple, float] = {}
        for atoms, m in items:
            if by_label:
                atoms = tuple(sp.index(a) for sp, a in zip(spaces, atoms))
            key = tuple(int(a) for a in atoms)
            merged[key] = merged.get(key, 0.0) + float(m)
        keys = [key for key, m in merged.items() if m > 0]
        support = np.array(keys, dtype=np.int64).reshape(len(keys), len(spaces))
        return cls(tuple(spaces), support, np.array([merged[key] for key in keys]))

    @property
    def k(self) -> int:
        return len(self.spaces)

    @property
    def sizes(self) -> tuple:
        return tuple(s.size for s in self.spaces)

    def __len__(self):
        return len(self.mass)

    def restrict(self, coords: Sequence[int]) -> "JointDistribution":
        """Joint marginal on the listed components, in that order."""
        coords = list(coords)
        return JointDistribution.from_mapping(
            [self.spaces[c] for c in coords],
            ((tuple(row[coords]), m) for row, m in zip(self.support, self.mass)))

    def dense(self) -> np.ndarray:
        """Full probability table of shape ``sizes``."""
        table = np.zeros(self.sizes)
        np.add.at(table, tuple(self.support.T), self.mass)
        return table


def marginal(mu: JointDistribution, i: int) -> Distribution:
    if not 0 <= i < mu.k:
        raise IndexError(f"component {i} out of range for k={mu.k}")
    mass = np.bincount(mu.support[:, i], weights=mu.mass, minlength=mu.spaces[i].size)
    return Distribution(mu.spaces[i], mass)


def min_atom_alpha(nu: Distribution) -> float:
    """Smallest strictly positive atom probability."""
    positive = nu.mass[nu.mass > 0]
    return float(positive.min())


def product_distribution(dists: Sequence[Distribution]) -> JointDistribution:
    spaces = [d.space for d in dists]
    table = {}
    for atoms in itertools.product(*(range(s.size) for s in spaces)):
        m = float(np.prod([d.mass[a] for d, a in zip(dists, atoms)]))
        if m > 0:
            table[atoms] = m
    return JointDistribution.from_mapping(spaces, table)


def point_mass(spaces: Sequence[FiniteSpace], atoms: Sequence[int]) -> JointDistribution:
    return JointDistribution(tuple(spaces), np.array([list(atoms)]), np.array([1.0]))


def is_r_wise_independent(mu: JointDistribution, r: int,
                          tol: float = INDEPENDENCE_TOL) -> bool:
    """Exhaustively check that every r-subset of components factorizes."""
    if not 1 <= r <= mu.k:
        raise ValueError(f"r={r} outside 1..{mu.k}")
    margs = [marginal(mu, i).mass for i in range(mu.k)]
    for coords in itertools.combinations(range(mu.k), r):
        joint = np.zeros([mu.spaces[c].size for c in coords])
        np.add.at(joint, tuple(mu.support[:, list(coords)].T), mu.mass)
        prod = margs[coords[0]]
        for c in coords[1:]:
            prod = np.multiply.outer(prod, margs[c])
        if np.max(np.abs(joint - prod)) > tol:
            return False
    return True


def is_pairwise_independent(mu: JointDistribution, tol: float = INDEPENDENCE_TOL) -> bool:
    return mu.k < 2 or is_r_wise_independent(mu, 2, tol)


def is_balanced(mu: JointDistribution, tol: float = INDEPENDENCE_TOL) -> bool:
    return all(marginal(mu, i).is_uniform(tol) for i in range(mu.k))


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % f for f in range(2, int(p ** 0.5) + 1))


def ap_distribution(p: int, k: int) -> JointDistribution:
    """Uniform k-term progression ``(x + y, 2x + y, ..., kx + y)`` over Z_p.

    ``k == p`` is accepted; the last term then equals ``y``.
    """
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if not 3 <= k <= p:
        raise ValueError(f"need 3 <= k <= p, got k={k}, p={p}")
    space = FiniteSpace.range(p)
    w = 1.0 / p ** 2
    rows = ((tuple(((i + 1) * x + y) % p for i in range(k)), w)
            for x in range(p) for y in range(p))
    return JointDistribution.from_mapping([space] * k, rows)


def cube_subsets(d: int) -> list[frozenset]:
    """Subsets of ``range(d)`` in the canonical order: index = bit encoding."""
    return [frozenset(i for i in range(d) if s >> i & 1) for s in range(1 << d)]


def gowers_cube_distribution(p: int, d: int) -> JointDistribution:
    """Law of ``(x + sum_{i not in S} y_i)_S`` for uniform ``x, y_1..y_d`` in Z_p.

    Component ``s`` corresponds to the subset whose bit encoding is ``s``
    (see :func:`cube_subsets`).
    """
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    if d < 1:
        raise ValueError("d must be at least 1")
    subsets = cube_subsets(d)
    space = FiniteSpace.range(p)
    w = 1.0 / p ** (d + 1)
    rows = []
    for seed in itertools.product(range(p), repeat=d + 1):
        x, ys = seed[0], seed[1:]
        row = tuple((x + sum(ys[i] for i in range(d) if i not in s)) % p for s in subsets)
        rows.append((row, w))
    return JointDistribution.from_mapping([space] * len(subsets), rows)


def xor_triple_distribution() -> JointDistribution:
    """Uniform on triples in {1, -1}^3 with product 1.

    Atom index b stands for the label (-1)**b, so the standard Z_2
    character at index 1 is the identity map on labels.
    """
    space = FiniteSpace((1, -1))
    rows = [((a, b, a ^ b), 0.25) for a in range(2) for b in range(2)]
    return JointDistribution.from_mapping([space] * 3, rows)


def xor_subset_distribution(m: int, subsets: Sequence[Iterable[int]]) -> JointDistribution:
    """``m`` uniform bits followed by the parity of each listed subset of them."""
    subsets = [frozenset(s) for s in subsets]
    if any(not s for s in subsets):
        raise ValueError("subsets must be nonempty")
    if len(set(subsets)) != len(subsets):
        raise ValueError("subsets must be distinct")
    if any(not 0 <= i < m for s in subsets for i in s):
        raise ValueError(f"subset members must lie in range({m})")
    space = FiniteSpace((0, 1))
    rows = []
    for bits in itertools.product(range(2), repeat=m):
        extra = tuple(sum(bits[i] for i in s) % 2 for s in subsets)
        rows.append((bits + extra, 0.5 ** m))
    return JointDistribution.from_mapping([space] * (m + len(subsets)), rows)


def random_pairwise_independent(rng: np.random.Generator, k: int, p: int = 3,
                                components: int = 2, coarsen: bool = True
                                ) -> JointDistribution:
    """Random pairwise independent law built from linear forms over Z_p.

    Each mixture component draws coordinates ``a_i x + b_i y + c_i`` with the
    ``(a_i, b_i)`` pairwise non-proportional, so every pair is uniform on
    Z_p^2.  Mixing laws with identical (uniform) marginals keeps pairwise
    independence.  With ``coarsen`` each coordinate is then pushed through a
    random surjection onto a smaller alphabet, which keeps pairwise
    independence but makes the marginals non-uniform.
    """
    if k > p + 1:
        raise ValueError(f"at most p+1={p + 1} pairwise independent linear forms over Z_p")
    directions = [(1, a) for a in range(p)] + [(0, 1)]
    weights = rng.dirichlet(np.ones(components))
    table: dict[tuple, float] = {}
    for w in weights:
        chosen = rng.permutation(len(directions))[:k]
        scales = rng.integers(1, p, size=k)
        shifts = rng.integers(0, p, size=k)
        for x in range(p):
            for y in range(p):
                row = tuple(int((scales[i] * (directions[c][0] * x + directions[c][1] * y)
                                 + shifts[i]) % p) for i, c in enumerate(chosen))
                table[row] = table.get(row, 0.0) + w / p ** 2
    spaces = [FiniteSpace.range(p)] * k
    mu = JointDistribution.from_mapping(spaces, table)
    if not coarsen or p < 3:
        return mu
    maps = []
    for _ in range(k):
        target = int(rng.integers(2, p))
        # surjection Z_p -> Z_target
        image = np.concatenate([np.arange(target), rng.integers(0, target, size=p - target)])
        maps.append(rng.permutation(image))
    rows = ((tuple(int(maps[i][a]) for i, a in enumerate(row)), m)
            for row, m in zip(mu.support, mu.mass))
    return JointDistribution.from_mapping(
        [FiniteSpace.range(int(mp.max()) + 1) for mp in maps], rows)
