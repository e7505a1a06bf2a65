import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from noisecorr.spaces import (Distribution, FiniteSpace, JointDistribution, ap_distribution,
                              gowers_cube_distribution, is_balanced, is_pairwise_independent,
                              is_prime, is_r_wise_independent, marginal, min_atom_alpha,
                              point_mass, product_distribution, random_pairwise_independent,
                              xor_subset_distribution, xor_triple_distribution)

BIT = FiniteSpace.range(2)


def factorizes(mu, coords, tol=1e-9):
    """Independent check: joint law of ``coords`` equals the product of marginals."""
    joint = {}
    singles = [dict() for _ in coords]
    for row, m in zip(mu.support, mu.mass):
        key = tuple(int(row[c]) for c in coords)
        joint[key] = joint.get(key, 0.0) + m
        for pos, c in enumerate(coords):
            singles[pos][int(row[c])] = singles[pos].get(int(row[c]), 0.0) + m
    for key in itertools.product(*(range(mu.sizes[c]) for c in coords)):
        expected = np.prod([singles[pos].get(a, 0.0) for pos, a in enumerate(key)])
        if abs(joint.get(key, 0.0) - expected) > tol:
            return False
    return True


def oracle_r_wise(mu, r):
    return all(factorizes(mu, c) for c in itertools.combinations(range(mu.k), r))


class TestTypes:
    def test_space_rejects_duplicates(self):
        with pytest.raises(ValueError):
            FiniteSpace((0, 0))

    def test_distribution_validates_mass(self):
        with pytest.raises(ValueError):
            Distribution(BIT, [0.7, 0.7])
        with pytest.raises(ValueError):
            Distribution(BIT, [1.5, -0.5])

    def test_joint_rejects_duplicate_rows(self):
        with pytest.raises(ValueError):
            JointDistribution((BIT, BIT), [[0, 0], [0, 0]], [0.5, 0.5])

    def test_joint_rejects_bad_mass(self):
        with pytest.raises(ValueError):
            JointDistribution((BIT, BIT), [[0, 0], [1, 1]], [0.5, 0.6])

    def test_joint_rejects_out_of_range_atoms(self):
        with pytest.raises((ValueError, IndexError)):
            JointDistribution((BIT, BIT), [[0, 2]], [1.0])

    def test_from_mapping_merges_duplicates(self):
        mu = JointDistribution.from_mapping((BIT, BIT), [((0, 1), 0.25), ((0, 1), 0.25),
                                                         ((1, 0), 0.5)])
        assert len(mu) == 2
        np.testing.assert_allclose(sorted(mu.mass), [0.5, 0.5])

    def test_restrict_and_dense(self):
        mu = xor_triple_distribution()
        sub = mu.restrict([0, 2])
        assert sub.k == 2
        np.testing.assert_allclose(sub.dense(), np.full((2, 2), 0.25))
        assert mu.dense().sum() == pytest.approx(1.0)


class TestMarginals:
    def test_product_of_uniform_bits(self):
        mu = product_distribution([Distribution.uniform(BIT)] * 2)
        np.testing.assert_allclose(marginal(mu, 0).mass, [0.5, 0.5])

    def test_xor_triple_marginal_uniform(self):
        mu = xor_triple_distribution()
        nu = marginal(mu, 1)
        assert nu.space.atoms == (1, -1)
        np.testing.assert_allclose(nu.mass, [0.5, 0.5])

    def test_point_mass(self):
        mu = point_mass((FiniteSpace.range(3), FiniteSpace.range(4)), (2, 1))
        np.testing.assert_allclose(marginal(mu, 1).mass, [0, 1, 0, 0])

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            marginal(xor_triple_distribution(), 3)

    @pytest.mark.parametrize("mass, alpha", [
        ([0.25] * 4, 0.25), ([0.75, 0.25], 0.25), ([0.5, 0.5, 0.0], 0.5), ([1.0], 1.0)])
    def test_min_atom_alpha(self, mass, alpha):
        nu = Distribution(FiniteSpace.range(len(mass)), mass)
        assert min_atom_alpha(nu) == pytest.approx(alpha)


class TestConstructions:
    def test_ap_3_3_support(self):
        mu = ap_distribution(3, 3)
        assert len(mu) == 9
        np.testing.assert_allclose(mu.mass, 1 / 9)
        rows = {tuple(r) for r in mu.support}
        expected = {tuple((i * x + y) % 3 for i in (1, 2, 3)) for x in range(3) for y in range(3)}
        assert rows == expected

    @pytest.mark.parametrize("p,k", [(p, k) for p in (3, 5, 7) for k in range(3, p + 1)])
    def test_ap_pairwise_independent(self, p, k):
        mu = ap_distribution(p, k)
        assert is_pairwise_independent(mu)
        assert oracle_r_wise(mu, 2)
        assert is_balanced(mu)

    def test_ap_not_three_wise(self):
        mu = ap_distribution(5, 3)
        assert not is_r_wise_independent(mu, 3)
        assert not oracle_r_wise(mu, 3)

    @pytest.mark.parametrize("p,k", [(3, 4), (4, 3), (5, 2)])
    def test_ap_rejects(self, p, k):
        with pytest.raises(ValueError):
            ap_distribution(p, k)

    def test_cube_d1_is_uniform_pair(self):
        mu = gowers_cube_distribution(2, 1)
        assert len(mu) == 4
        np.testing.assert_allclose(mu.dense(), np.full((2, 2), 0.25))

    @pytest.mark.parametrize("p,d", [(2, 2), (3, 2), (2, 3)])
    def test_cube_three_wise(self, p, d):
        mu = gowers_cube_distribution(p, d)
        assert is_r_wise_independent(mu, 3)
        assert oracle_r_wise(mu, 3)
        assert is_balanced(mu)

    def test_cube_component_order(self):
        # component s is x + sum of y_i over i not in the subset encoded by s
        mu = gowers_cube_distribution(3, 2)
        for row in mu.support:
            x = row[3]
            y0, y1 = (row[2] - x) % 3, (row[1] - x) % 3
            assert row[0] == (x + y0 + y1) % 3

    def test_xor_triple(self):
        mu = xor_triple_distribution()
        assert len(mu) == 4
        np.testing.assert_allclose(mu.mass, 0.25)
        for row in mu.support:
            labels = [mu.spaces[i].atoms[a] for i, a in enumerate(row)]
            assert np.prod(labels) == 1
        assert is_r_wise_independent(mu, 2)
        assert not is_r_wise_independent(mu, 3)

    def test_xor_subset_matches_parity(self):
        mu = xor_subset_distribution(2, [[0, 1]])
        assert {tuple(r) for r in mu.support} == {(a, b, a ^ b) for a in (0, 1) for b in (0, 1)}
        assert is_pairwise_independent(mu)

    def test_xor_subset_empty_list_is_product(self):
        mu = xor_subset_distribution(2, [])
        assert is_r_wise_independent(mu, 2)
        np.testing.assert_allclose(mu.dense(), np.full((2, 2), 0.25))

    def test_xor_subset_singleton_breaks_pairwise(self):
        assert not is_pairwise_independent(xor_subset_distribution(2, [[0]]))

    @pytest.mark.parametrize("subsets", [[[]], [[0, 1], [1, 0]], [[2]]])
    def test_xor_subset_rejects(self, subsets):
        with pytest.raises(ValueError):
            xor_subset_distribution(2, subsets)

    def test_is_prime(self):
        assert [p for p in range(20) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19]


@given(seed=st.integers(0, 2 ** 32 - 1), k=st.integers(2, 4),
       p=st.sampled_from([3, 5]), coarsen=st.booleans())
def test_random_pairwise_independent_property(seed, k, p, coarsen):
    mu = random_pairwise_independent(np.random.default_rng(seed), k, p, coarsen=coarsen)
    assert mu.k == k
    assert abs(mu.mass.sum() - 1) < 1e-12
    assert len({tuple(r) for r in mu.support}) == len(mu)
    assert is_pairwise_independent(mu)
    assert oracle_r_wise(mu, 2)


@given(seed=st.integers(0, 2 ** 32 - 1))
def test_product_distribution_fully_independent(seed):
    rng = np.random.default_rng(seed)
    dists = [Distribution(FiniteSpace.range(q), rng.dirichlet(np.ones(q))) for q in (2, 3, 2)]
    mu = product_distribution(dists)
    assert is_r_wise_independent(mu, 3)
    for i, nu in enumerate(dists):
        np.testing.assert_allclose(marginal(mu, i).mass, nu.mass, atol=1e-12)
