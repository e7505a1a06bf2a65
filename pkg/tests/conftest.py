"""Shared oracles and fixtures.

The oracles here are deliberately naive pure-Python enumerations that share
no code with the package kernels; tests compare the package against them.
"""
import itertools
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from noisecorr.fourier import FourierRepresentation
from noisecorr.spaces import (ap_distribution, gowers_cube_distribution, xor_subset_distribution,
                              xor_triple_distribution)

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=150)
settings.load_profile("default")


def python_nip(tables, support, masses):
    """``E[prod_i f_i(X_i)]`` by looping over every column assignment.

    ``tables[i]`` is an n-dimensional array indexed by atom indices;
    ``support`` is a list of k-tuples with matching ``masses``.
    """
    n = np.ndim(tables[0])
    total = 0j
    for cols in itertools.product(range(len(support)), repeat=n):
        weight = math.prod(masses[c] for c in cols)
        prod = 1 + 0j
        for i, f in enumerate(tables):
            prod *= f[tuple(support[c][i] for c in cols)]
        total += weight * prod
    return total


def python_gowers_power(values, p, d):
    """``||f||_{U^d}^{2^d}`` over Z_p^n from the cube-average definition.

    Vertex ``S`` (a subset of range(d)) reads ``f(x + sum_{i not in S} y_i)``
    and is conjugated when ``|S|`` is even.
    """
    values = np.asarray(values)
    n = values.ndim
    points = list(itertools.product(range(p), repeat=n))
    total = 0j
    for x in points:
        for ys in itertools.product(points, repeat=d):
            prod = 1 + 0j
            for mask in range(1 << d):
                s = [i for i in range(d) if mask >> i & 1]
                pt = tuple((x[j] + sum(ys[i][j] for i in range(d) if i not in s)) % p
                           for j in range(n))
                v = values[pt]
                prod *= np.conj(v) if len(s) % 2 == 0 else v
            total += prod
    return total / len(points) ** (d + 1)


def fft_coefficients(values):
    """Standard-character coefficients of ``f`` on Z_q^n via the FFT."""
    values = np.asarray(values, dtype=complex)
    return np.fft.fftn(values) / values.size


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def construction_laws():
    """Every fixed pairwise independent construction, with a label."""
    return [
        ("xor_triple", xor_triple_distribution()),
        ("ap(3,3)", ap_distribution(3, 3)),
        ("ap(5,3)", ap_distribution(5, 3)),
        ("ap(5,4)", ap_distribution(5, 4)),
        ("cube(2,2)", gowers_cube_distribution(2, 2)),
        ("cube(3,2)", gowers_cube_distribution(3, 2)),
        ("xor_subset(2,{01})", xor_subset_distribution(2, [[0, 1]])),
    ]


def random_sparse_functions(rng, sizes, n, max_terms=6):
    """Random complex coefficients on a few random multi-indices per function."""
    out = []
    for q in sizes:
        terms = int(rng.integers(1, max_terms + 1))
        coeffs = {}
        for _ in range(terms):
            sigma = tuple(int(v) for v in rng.integers(0, q, size=n))
            coeffs[sigma] = complex(rng.standard_normal(), rng.standard_normal())
        out.append(FourierRepresentation((q,) * n, coeffs))
    return out


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
