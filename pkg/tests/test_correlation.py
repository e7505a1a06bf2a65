import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import construction_laws, python_nip, random_sparse_functions
from noisecorr.correlation import (Method, column_moments, nip_bruteforce, nip_fourier,
                                   nip_montecarlo, noise_correlation)
from noisecorr.fourier import (DenseFunction, FourierRepresentation, default_bases,
                               inverse_transform, weight)
from noisecorr.spaces import (Distribution, FiniteSpace, point_mass, product_distribution,
                              random_pairwise_independent, xor_triple_distribution)

LAWS = construction_laws()


def dense_of(fhats, bases):
    return [inverse_transform(f, b) for f, b in zip(fhats, bases)]


class TestBruteforce:
    def test_xor_triple_identity_character(self):
        mu = xor_triple_distribution()
        # atom b is the label (-1)^b, so the identity on labels is [1, -1]
        f = DenseFunction((2,), np.array([1.0, -1.0]))
        assert nip_bruteforce([f] * 3, mu).value == pytest.approx(1.0)

    def test_constants_n0(self):
        mu = xor_triple_distribution()
        fs = [DenseFunction((), np.array(c)) for c in (2.0, -1.5, 0.5j)]
        assert nip_bruteforce(fs, mu).value == pytest.approx(2.0 * -1.5 * 0.5j)

    @given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(1, 3))
    def test_product_law_gives_product_of_means(self, seed, n):
        rng = np.random.default_rng(seed)
        nus = [Distribution(FiniteSpace.range(q), rng.dirichlet(np.ones(q))) for q in (2, 3, 2)]
        mu = product_distribution(nus)
        fs = [DenseFunction((nu.space.size,) * n, rng.standard_normal((nu.space.size,) * n))
              for nu in nus]
        means = []
        for f, nu in zip(fs, nus):
            w = np.ones(())
            for _ in range(n):
                w = np.multiply.outer(w, nu.mass)
            means.append(np.sum(w * f.values))
        assert abs(nip_bruteforce(fs, mu).value - np.prod(means)) < 1e-10
        assert abs(noise_correlation(fs, mu)) < 1e-10

    @given(seed=st.integers(0, 2 ** 32 - 1), law=st.integers(0, len(LAWS) - 1))
    def test_matches_python_loop(self, seed, law):
        rng = np.random.default_rng(seed)
        _, mu = LAWS[law]
        n = 1 if len(mu) > 9 else 2
        tables = [rng.standard_normal((q,) * n) + 1j * rng.standard_normal((q,) * n)
                  for q in mu.sizes]
        fs = [DenseFunction(t.shape, t) for t in tables]
        expected = python_nip(tables, [tuple(r) for r in mu.support], list(mu.mass))
        assert abs(nip_bruteforce(fs, mu).value - expected) < 1e-10

    def test_shape_errors(self):
        mu = xor_triple_distribution()
        f = DenseFunction((2,), np.ones(2))
        with pytest.raises(ValueError):
            nip_bruteforce([f] * 2, mu)
        with pytest.raises(ValueError):
            nip_bruteforce([f, f, DenseFunction((3,), np.ones(3))], mu)
        with pytest.raises(ValueError):
            nip_bruteforce([], mu)

    def test_cap(self):
        mu = xor_triple_distribution()
        f = DenseFunction((2,) * 4, np.ones((2,) * 4))
        with pytest.raises(ValueError):
            nip_bruteforce([f] * 3, mu, cap=100)


class TestMoments:
    @pytest.mark.parametrize("name,mu", LAWS)
    def test_low_weight_patterns_vanish(self, name, mu):
        M = column_moments(mu, default_bases(mu))
        assert M[(0,) * mu.k] == pytest.approx(1.0)
        for digits in itertools.product(*(range(q) for q in mu.sizes)):
            if 1 <= weight(digits) <= 2:
                assert abs(M[digits]) <= 1e-10, digits

    def test_basis_mismatch(self):
        mu = xor_triple_distribution()
        with pytest.raises(ValueError):
            column_moments(mu, default_bases(mu)[:2])


class TestFourierPath:
    def test_single_characters_give_moment_product(self):
        mu = LAWS[1][1]
        M = column_moments(mu, default_bases(mu))
        sigmas = [(1, 2), (2, 0), (1, 1)]
        fhats = [FourierRepresentation.character((3, 3), s) for s in sigmas]
        expected = np.prod([M[[s[j] for s in sigmas]] for j in range(2)])
        assert nip_fourier(fhats, M).value == pytest.approx(expected)

    @given(seed=st.integers(0, 2 ** 32 - 1), law=st.integers(0, len(LAWS) - 1))
    def test_matches_bruteforce(self, seed, law):
        rng = np.random.default_rng(seed)
        _, mu = LAWS[law]
        n = int(rng.integers(1, 3 if len(mu) > 9 else 4))
        bases = default_bases(mu)
        fhats = random_sparse_functions(rng, mu.sizes, n)
        a = nip_fourier(fhats, column_moments(mu, bases))
        b = nip_bruteforce(dense_of(fhats, bases), mu)
        assert a.method is Method.FOURIER and b.method is Method.BRUTEFORCE
        assert abs(a.value - b.value) <= 1e-9

    @given(seed=st.integers(0, 2 ** 32 - 1), k=st.integers(3, 4))
    def test_matches_bruteforce_random_law(self, seed, k):
        rng = np.random.default_rng(seed)
        mu = random_pairwise_independent(rng, k, 3)
        bases = default_bases(mu)
        fhats = random_sparse_functions(rng, mu.sizes, 2)
        a = nip_fourier(fhats, column_moments(mu, bases)).value
        b = nip_bruteforce(dense_of(fhats, bases), mu).value
        assert abs(a - b) <= 1e-9

    @given(seed=st.integers(0, 2 ** 32 - 1))
    def test_multilinear(self, seed):
        rng = np.random.default_rng(seed)
        mu = LAWS[1][1]
        M = column_moments(mu, default_bases(mu))
        f, g, h, u = random_sparse_functions(rng, (3, 3, 3, 3), 2)
        a, b = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        mix = FourierRepresentation(f.sizes, {s: a * f[s] + b * u[s]
                                              for s in set(f.coeffs) | set(u.coeffs)})
        lhs = nip_fourier([mix, g, h], M).value
        rhs = a * nip_fourier([f, g, h], M).value + b * nip_fourier([u, g, h], M).value
        assert abs(lhs - rhs) <= 1e-10

    @given(seed=st.integers(0, 2 ** 32 - 1))
    def test_real_inputs_real_output(self, seed):
        rng = np.random.default_rng(seed)
        mu = random_pairwise_independent(rng, 3, 3)
        bases = default_bases(mu, real=True)
        fhats = [FourierRepresentation(f.sizes, {s: c.real for s, c in f.items()})
                 for f in random_sparse_functions(rng, mu.sizes, 2)]
        value = nip_fourier(fhats, column_moments(mu, bases)).value
        assert abs(value.imag) <= 1e-9

    def test_noise_correlation_xor(self):
        mu = xor_triple_distribution()
        chi = FourierRepresentation.character((2,), (1,))
        assert noise_correlation([chi] * 3, mu, default_bases(mu)) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            noise_correlation([chi] * 3, mu)

    def test_noise_correlation_with_mean_zero_input(self):
        rng = np.random.default_rng(3)
        mu = LAWS[1][1]
        bases = default_bases(mu)
        fhats = random_sparse_functions(rng, mu.sizes, 2)
        fhats[1] = fhats[1].centered()
        nip = nip_fourier(fhats, column_moments(mu, bases)).value
        assert noise_correlation(fhats, mu, bases) == pytest.approx(nip)


class TestMonteCarlo:
    def test_point_mass_exact(self):
        mu = point_mass([FiniteSpace.range(2)] * 3, (1, 0, 1))
        fs = [DenseFunction((2, 2), np.arange(4.0).reshape(2, 2) + i) for i in range(3)]
        res = nip_montecarlo(fs, mu, 50, seed=1)
        assert res.value == pytest.approx(nip_bruteforce(fs, mu).value)
        assert res.stderr == 0.0

    @pytest.mark.parametrize("law", [0, 1, 4])
    def test_within_four_stderr(self, law):
        rng = np.random.default_rng(law)
        _, mu = LAWS[law]
        fs = [DenseFunction((q, q), rng.standard_normal((q, q))) for q in mu.sizes]
        exact = nip_bruteforce(fs, mu).value
        est = nip_montecarlo(fs, mu, 10 ** 5, seed=7)
        assert abs(est.value - exact) <= 4 * est.stderr

    def test_deterministic(self):
        mu = LAWS[1][1]
        fs = [DenseFunction((3,), np.array([1.0, 2.0, 3.0]))] * 3
        a = nip_montecarlo(fs, mu, 1000, seed=42)
        b = nip_montecarlo(fs, mu, 1000, seed=42)
        assert a == b

    def test_rejects_zero_samples(self):
        mu = LAWS[0][1]
        with pytest.raises(ValueError):
            nip_montecarlo([DenseFunction((2,), np.ones(2))] * 3, mu, 0, seed=0)
