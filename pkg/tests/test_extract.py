import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from noisecorr.correlation import column_moments, nip_bruteforce
from noisecorr.extract import (TheoremViolation, Witness, extract_family, extract_witness,
                               verify_family, verify_witness, _Context)
from noisecorr.fourier import FourierRepresentation, character_table, default_bases
from noisecorr.instances import generate_random_lowdeg, planted_instance
from noisecorr.spaces import ap_distribution, gowers_cube_distribution, xor_triple_distribution

XOR = xor_triple_distribution()
E1 = FourierRepresentation.character((2, 2), (1, 0))
PLANT_LAWS = [xor_triple_distribution(), ap_distribution(3, 3), gowers_cube_distribution(2, 2),
              ap_distribution(5, 4)]


def witness_delta(fhats, mu, share=0.5):
    ctx = _Context(fhats, mu, None)
    return share * abs(ctx.correlation()) / (2 * (mu.k - 2) * ctx.CD)


def family_delta(fhats, mu, share=0.5):
    ctx = _Context(fhats, mu, None)
    return share * abs(ctx.correlation()) / ctx.CD


class TestWitness:
    def test_below_threshold(self):
        # at delta = 1e-3 the hypothesis 2 delta (k-2) C^D < 1 fails (C^D = 27^3)
        assert extract_witness([E1] * 3, XOR, 1e-3) is None

    def test_xor_first_coordinate(self):
        w = extract_witness([E1] * 3, XOR, 1e-5)
        assert (w.i, w.sigma) == (0, (1, 0))
        assert w.coeff_mag == pytest.approx(1.0) and w.corr_mag == pytest.approx(1.0)
        assert (w.C, w.D) == (27.0, 3)
        assert w.coeff_mag > w.delta and w.corr_mag > w.delta ** 2 * 27.0 ** 3
        assert verify_witness(w, [E1] * 3, XOR) == []

    def test_record(self):
        w = Witness(1, (0, 2), 0.5, 0.25, 0.01, 27.0, 3)
        assert w.to_record() == "1 0 2 0.5 0.25 0.01 27.0 3"

    def test_exhaustive_lists_every_index(self):
        # with f_0 replaced by 1 the remaining three cube components are
        # 3-wise independent, so only i = 0 carries correlation
        mu = gowers_cube_distribution(2, 2)
        ws = extract_witness([E1] * 4, mu, 1e-9, exhaustive=True)
        assert [w.i for w in ws] == [0]
        assert all(verify_witness(w, [E1] * 4, mu) == [] for w in ws)
        assert extract_witness([E1] * 4, mu, 1.0, exhaustive=True) == []

    def test_norm_precondition(self):
        with pytest.raises(ValueError):
            extract_witness([E1.scaled(2)] + [E1] * 2, XOR, 1e-5)

    def test_verify_catches_tampering(self):
        w = extract_witness([E1] * 3, XOR, 1e-5)
        bad = Witness(w.i, (0, 1), w.coeff_mag, w.corr_mag, w.delta, w.C, w.D)
        assert verify_witness(bad, [E1] * 3, XOR)

    @given(seed=st.integers(0, 2 ** 32 - 1), law=st.integers(0, len(PLANT_LAWS) - 1),
           n=st.integers(1, 2))
    def test_planted(self, seed, law, n):
        rng = np.random.default_rng(seed)
        mu = PLANT_LAWS[law]
        M = column_moments(mu, default_bases(mu))
        fhats = planted_instance(M, n, [int(rng.integers(n))], 0.3, 1, rng)
        w = extract_witness(fhats, mu, witness_delta(fhats, mu))
        assert w is not None
        assert verify_witness(w, fhats, mu) == []

    @given(seed=st.integers(0, 2 ** 32 - 1), share=st.floats(0.05, 0.99))
    def test_complete_on_random_instances(self, seed, share):
        # whenever the hypothesis holds, extraction must succeed
        rng = np.random.default_rng(seed)
        mu = ap_distribution(3, 3)
        fhats = [generate_random_lowdeg(3, 2, int(rng.integers(0, 3)), rng) for _ in range(3)]
        ctx = _Context(fhats, mu, None)
        if ctx.CD == 0 or abs(ctx.correlation()) < 1e-12:
            return
        w = extract_witness(fhats, mu, witness_delta(fhats, mu, share))
        assert w is not None and verify_witness(w, fhats, mu) == []


class TestFamily:
    def test_below_threshold(self):
        assert extract_family([E1] * 3, XOR, 0.1) is None

    def test_xor_family(self):
        fam = extract_family([E1] * 3, XOR, 1e-5)
        assert fam.indices == [0, 1, 2]
        assert all(fam.sigma(i) == (1, 0) for i in fam.indices)
        assert fam.coverage == {0: 3}
        assert fam.family_nip == pytest.approx(1.0)
        assert len(fam.schedule) == 3
        assert fam.schedule[0] == pytest.approx(1e-5 / 6)
        assert fam.schedule[1] == pytest.approx(fam.schedule[0] ** 2 / 6)
        assert verify_family(fam, [E1] * 3, XOR) == []

    def test_cube_with_three_wise_independence(self):
        mu = gowers_cube_distribution(2, 2)
        fam = extract_family([E1] * 4, mu, 1e-9, r=3)
        assert fam.indices == [0, 1, 2, 3]
        assert all(c >= 4 for c in fam.coverage.values())
        assert verify_family(fam, [E1] * 4, mu) == []

    def test_rejects_undeclared_independence(self):
        with pytest.raises(ValueError):
            extract_family([E1] * 3, XOR, 1e-5, r=3)
        with pytest.raises(ValueError):
            extract_family([E1] * 3, XOR, 1e-5, r=1)

    def test_family_nip_rechecked_by_enumeration(self):
        mu = ap_distribution(3, 3)
        M = column_moments(mu, default_bases(mu))
        fhats = planted_instance(M, 2, [0, 1], 0.2, 1, np.random.default_rng(4))
        fam = extract_family(fhats, mu, family_delta(fhats, mu))
        bases = default_bases(mu)
        chars = [character_table(f.sizes, fam.sigma(i), bases[i]) for i, f in enumerate(fhats)]
        value = nip_bruteforce(chars, mu).value
        assert value == pytest.approx(fam.family_nip, abs=1e-9)
        assert abs(value) > 0

    @given(seed=st.integers(0, 2 ** 32 - 1), law=st.integers(0, len(PLANT_LAWS) - 1),
           n=st.integers(1, 2))
    def test_planted(self, seed, law, n):
        rng = np.random.default_rng(seed)
        mu = PLANT_LAWS[law]
        M = column_moments(mu, default_bases(mu))
        coords = sorted(set(int(c) for c in rng.integers(0, n, size=2)))
        fhats = planted_instance(M, n, coords, 0.3, 1, rng)
        r = 3 if law == 2 else 2
        fam = extract_family(fhats, mu, family_delta(fhats, mu), r=r)
        assert fam is not None
        assert verify_family(fam, fhats, mu) == []
        assert all(c >= r + 1 for c in fam.coverage.values())
        for i, sigma, mag in fam.members:
            assert math.log(mag) > fam.log_threshold
            assert mag == pytest.approx(abs(fhats[i][sigma]))

    def test_zero_function_is_vacuous(self):
        zero = FourierRepresentation((2, 2), {})
        assert extract_family([zero, E1, E1], XOR, 1e-5) is None
        assert extract_witness([zero, E1, E1], XOR, 1e-5) is None


def test_theorem_violation_is_runtime_error():
    assert issubclass(TheoremViolation, RuntimeError)
