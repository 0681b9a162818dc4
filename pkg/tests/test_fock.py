import numpy as np
import pytest

from linoptgates.fock import (
    ModeTransform, amplitude, amplitude_permanent, as_fock, enumerate_states,
    expand_product, output_distribution, transpose_convention,
)


def beamsplitter_50_50():
    return ModeTransform(np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2))


class TestExpandProduct:
    def test_identity_single_photon(self):
        poly = expand_product(list(np.eye(3, dtype=complex).T), (1, 0, 0))
        assert poly.coeffs == {(1, 0, 0): 1.0 + 0.0j}

    def test_symbolic_helper_block(self):
        # coefficient of c3*c4 from columns 3, 4 is v33*v44 + v34*v43
        rng = np.random.default_rng(3)
        v = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        poly = expand_product(list(v.T), (0, 0, 1, 1))
        got = poly.coefficient((0, 0, 1, 1))
        assert got == pytest.approx(v[2, 2] * v[3, 3] + v[2, 3] * v[3, 2])

    def test_total_degree_conserved(self):
        rng = np.random.default_rng(5)
        cols = [rng.standard_normal(3) + 1j * rng.standard_normal(3) for _ in range(3)]
        poly = expand_product(cols, (2, 1, 1))
        assert all(sum(exp) == 4 for exp in poly.coeffs)

    def test_matches_permanent_weighting(self):
        # coefficients of the n=3 expansion against the permanent oracle
        rng = np.random.default_rng(11)
        mat = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        t = ModeTransform(mat)
        for out in enumerate_states(3, 3):
            assert amplitude(t, (1, 1, 1), out) == pytest.approx(
                amplitude_permanent(t, (1, 1, 1), out), abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            expand_product([np.ones(2), np.ones(3)], (1, 1))

    def test_negative_multiplicity(self):
        with pytest.raises(ValueError):
            expand_product([np.ones(2)], (-1,))


class TestAmplitude:
    def test_hong_ou_mandel_cancellation(self):
        assert amplitude(beamsplitter_50_50(), (1, 1), (1, 1)) == pytest.approx(0.0, abs=1e-15)

    def test_identity_diagonal(self):
        t = ModeTransform.identity(3)
        for state in [(1, 0, 0), (2, 1, 0), (3, 0, 2)]:
            assert amplitude(t, state, state) == pytest.approx(1.0)

    def test_photon_number_mismatch_is_zero(self):
        assert amplitude(beamsplitter_50_50(), (1, 0), (1, 1)) == 0

    def test_negative_occupation_rejected(self):
        with pytest.raises(ValueError):
            amplitude(beamsplitter_50_50(), (1, -1), (0, 0))

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            amplitude(beamsplitter_50_50(), (1, 0, 0), (1, 0))

    def test_bunching_amplitude(self):
        amp = amplitude(beamsplitter_50_50(), (1, 1), (2, 0))
        assert amp == pytest.approx(1 / np.sqrt(2))


class TestPermanentOracle:
    def test_identity_trivial(self):
        t = ModeTransform.identity(4)
        assert amplitude_permanent(t, (1, 1, 0, 0), (1, 1, 0, 0)) == pytest.approx(1.0)

    def test_vacuum(self):
        t = ModeTransform.identity(2)
        assert amplitude_permanent(t, (0, 0), (0, 0)) == pytest.approx(1.0)

    def test_cross_check_bunching(self):
        bs = beamsplitter_50_50()
        assert amplitude_permanent(bs, (2, 0), (1, 1)) == pytest.approx(
            amplitude(bs, (2, 0), (1, 1)))

    def test_cutoff_enforced(self):
        t = ModeTransform.identity(2)
        with pytest.raises(ValueError, match="cutoff"):
            amplitude_permanent(t, (6, 6), (6, 6))

    def test_agreement_on_random_unitaries(self):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(100):
            m = int(rng.integers(2, 5))
            t = ModeTransform.random_unitary(m, rng)
            n = int(rng.integers(1, 5))
            states = list(enumerate_states(m, n))
            inp = states[rng.integers(len(states))]
            out = states[rng.integers(len(states))]
            diff = abs(amplitude(t, inp, out) - amplitude_permanent(t, inp, out))
            worst = max(worst, diff)
        assert worst <= 1e-10

    def test_composition_matches_matrix_product(self):
        rng = np.random.default_rng(7)
        for _ in range(5):
            m = int(rng.integers(2, 5))
            u = ModeTransform.random_unitary(m, rng)
            w = ModeTransform.random_unitary(m, rng)
            uw = ModeTransform(u.matrix @ w.matrix)
            n = int(rng.integers(1, 4))
            states = list(enumerate_states(m, n))
            fu = np.array([[amplitude(u, i, o) for i in states] for o in states])
            fw = np.array([[amplitude(w, i, o) for i in states] for o in states])
            fuw = np.array([[amplitude(uw, i, o) for i in states] for o in states])
            assert np.max(np.abs(fuw - fu @ fw)) <= 1e-9


class TestOutputDistribution:
    def test_identity_trivial(self):
        t = ModeTransform.identity(2)
        assert output_distribution(t, (1, 0)) == {(1, 0): 1.0, (0, 1): 0.0}

    def test_hong_ou_mandel_distribution(self):
        dist = output_distribution(beamsplitter_50_50(), (1, 1))
        assert dist[(2, 0)] == pytest.approx(0.5)
        assert dist[(0, 2)] == pytest.approx(0.5)
        assert dist[(1, 1)] == pytest.approx(0.0, abs=1e-15)

    def test_rejects_non_unitary(self):
        t = ModeTransform(np.array([[1, 0], [0, 2]], dtype=complex))
        with pytest.raises(ValueError, match="unitary"):
            output_distribution(t, (1, 0))

    def test_normalization_random_unitaries(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            m = int(rng.integers(2, 5))
            t = ModeTransform.random_unitary(m, rng)
            for n in range(1, 5):
                for inp in enumerate_states(m, n):
                    total = sum(output_distribution(t, inp).values())
                    assert total == pytest.approx(1.0, abs=1e-10)


class TestModeTransform:
    def test_is_unitary(self):
        assert beamsplitter_50_50().is_unitary(1e-12)
        assert not ModeTransform(np.ones((2, 2), dtype=complex)).is_unitary(1e-12)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            ModeTransform(np.ones((2, 3)))

    def test_json_round_trip(self):
        rng = np.random.default_rng(1)
        t = ModeTransform.random_unitary(3, rng)
        again = ModeTransform.from_json(t.to_json())
        assert np.array_equal(again.matrix, t.matrix)

    def test_json_shape_mismatch(self):
        with pytest.raises(ValueError):
            ModeTransform.from_json({"m": 3, "entries": [[[1, 0]]]})

    def test_transpose_convention_involution(self):
        rng = np.random.default_rng(4)
        mat = rng.standard_normal((3, 3))
        assert np.array_equal(transpose_convention(transpose_convention(mat)), mat)

    def test_as_fock_validation(self):
        assert as_fock([1, 0, 2]) == (1, 0, 2)
        with pytest.raises(ValueError):
            as_fock([1, -2])
