"""Instance generators for the randomized suites and the CLI."""
from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from .correlation import ColumnMomentTensor
from .fourier import DenseFunction, FourierRepresentation, weight


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for ``trial`` derived from the master ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def low_weight_indices(sizes: Sequence[int], d: int) -> list[tuple]:
    """All multi-indices of weight at most ``d``, in lexicographic order."""
    n = len(sizes)
    out = []
    for supp_size in range(0, min(d, n) + 1):
        for supp in itertools.combinations(range(n), supp_size):
            for digits in itertools.product(*(range(1, sizes[j]) for j in supp)):
                sigma = [0] * n
                for j, v in zip(supp, digits):
                    sigma[j] = v
                out.append(tuple(sigma))
    return sorted(out)


def generate_random_lowdeg(q, n: int, d: int, seed=None, unit_norm: bool = True,
                           real: bool = False) -> FourierRepresentation:
    """Standard complex Gaussian coefficients on every multi-index of weight
    <= d (real Gaussians with ``real``), optionally scaled to unit L2 norm.

    ``q`` is one alphabet size or a per-coordinate sequence.  ``seed`` may be
    anything :func:`numpy.random.default_rng` accepts, or a generator.
    """
    sizes = (int(q),) * n if np.isscalar(q) else tuple(int(s) for s in q)
    rng = _rng(seed)
    keys = low_weight_indices(sizes, d) if d >= 0 else []
    if real:
        vals = rng.standard_normal(len(keys)).astype(complex)
    else:
        vals = (rng.standard_normal(len(keys)) + 1j * rng.standard_normal(len(keys))) / np.sqrt(2)
    if unit_norm and len(keys):
        vals = vals / np.linalg.norm(vals)
    return FourierRepresentation(sizes, dict(zip(keys, vals)))


def random_bounded_function(sizes: Sequence[int], seed=None) -> DenseFunction:
    """Values ``r e^{i theta}`` with ``r`` uniform in [0, 1]."""
    rng = _rng(seed)
    shape = tuple(sizes)
    r = rng.uniform(0, 1, size=shape)
    theta = rng.uniform(0, 2 * np.pi, size=shape)
    return DenseFunction(shape, r * np.exp(1j * theta))


def strongest_pattern(M: ColumnMomentTensor) -> tuple:
    """Nonzero digit pattern with the largest moment magnitude (ties:
    lexicographically smallest)."""
    mags = np.abs(M.table).ravel().copy()
    mags[0] = -1.0
    best = int(np.argmax(mags))
    return tuple(int(a) for a in np.unravel_index(best, M.sizes))


def planted_instance(M: ColumnMomentTensor, n: int, coords: Sequence[int], noise: float,
                     noise_degree: int = 1, seed=None) -> list[FourierRepresentation]:
    """Unit-norm functions sharing a planted correlated character.

    Function ``i`` is ``chi_{sigma_i} + noise * g_i`` normalized, where
    ``sigma_i`` carries digit ``a_i`` of :func:`strongest_pattern` on every
    coordinate in ``coords`` and ``g_i`` is a random unit-norm function of
    degree ``noise_degree``.
    """
    rng = _rng(seed)
    pattern = strongest_pattern(M)
    out = []
    for i, q in enumerate(M.sizes):
        sigma = tuple(pattern[i] if j in coords else 0 for j in range(n))
        g = generate_random_lowdeg(q, n, noise_degree, rng)
        coeffs = {s: noise * c for s, c in g.items()}
        coeffs[sigma] = coeffs.get(sigma, 0) + 1.0
        f = FourierRepresentation((q,) * n, coeffs)
        out.append(f.scaled(1 / f.norm2()))
    return out


def quadratic_phase(n: int) -> DenseFunction:
    """``(-1)^(x_1 x_2 + x_2 x_3 + ... + x_{n-1} x_n)`` on Z_2^n."""
    return DenseFunction.from_callable(
        (2,) * n, lambda x: (-1) ** sum(x[j] * x[j + 1] for j in range(n - 1)))


def xor_example_function(n: int) -> DenseFunction:
    """``(x_1 - 1)(x_2 + ... + x_n) / sqrt(n)`` on {1, -1}^n (atom b is (-1)^b)."""
    def f(pt):
        x = [(-1) ** b for b in pt]
        return (x[0] - 1) * sum(x[1:]) / np.sqrt(n)
    return DenseFunction.from_callable((2,) * n, f)


def weights_of(fhat: FourierRepresentation) -> list[int]:
    return sorted({weight(s) for s in fhat.coeffs})
