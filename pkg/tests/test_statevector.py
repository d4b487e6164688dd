import math

import numpy as np
import pytest

from repdtc import PauliRotation, PauliString, StateVector
from repdtc.statevector import MAX_QUBITS, states_equal

from conftest import dense_iswap, dense_pauli, dense_rotation


def random_state(rng, n):
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    amps /= np.linalg.norm(amps)
    return StateVector(n, amps)


class TestConstruction:
    def test_default_is_all_zero(self):
        s = StateVector(3)
        assert s.amplitudes[0] == 1.0
        assert s.norm() == pytest.approx(1.0)

    def test_basis_state_index(self):
        s = StateVector.basis_state(3, 5)
        assert s.amplitudes[5] == 1.0
        assert np.count_nonzero(s.amplitudes) == 1

    def test_rejects_oversized_register(self):
        with pytest.raises(ValueError):
            StateVector(MAX_QUBITS + 1)

    def test_rejects_bad_amplitude_length(self):
        with pytest.raises(ValueError):
            StateVector(2, np.ones(3))

    def test_rejects_bad_basis_index(self):
        with pytest.raises(ValueError):
            StateVector.basis_state(2, 4)


class TestApplyRotation:
    def test_identity_generator_is_global_phase(self):
        s = StateVector.basis_state(2, 1)
        s.apply_rotation(PauliRotation(PauliString.identity(2), 0.7))
        assert s.amplitudes[1] == pytest.approx(np.exp(-0.7j))

    def test_diagonal_generator(self):
        s = StateVector.basis_state(1, 1)
        s.apply_rotation(PauliRotation(PauliString.from_ops(1, {0: "Z"}), 0.3))
        # Z|1> = -|1>, so exp(-i*theta*Z)|1> = e^{+i*theta}|1>.
        assert s.amplitudes[1] == pytest.approx(np.exp(0.3j))

    def test_x_rotation_mixes(self):
        s = StateVector.basis_state(1, 0)
        s.apply_rotation(PauliRotation(PauliString.from_ops(1, {0: "X"}), math.pi / 2))
        # exp(-i*pi/2*X) = -iX up to numerics.
        assert s.amplitudes[0] == pytest.approx(0.0)
        assert s.amplitudes[1] == pytest.approx(-1j)

    def test_matches_dense_on_random_states(self, rng):
        for _ in range(60):
            n = int(rng.integers(1, 5))
            ops = {
                int(q): str(rng.choice(("X", "Y", "Z")))
                for q in rng.choice(n, size=rng.integers(1, n + 1), replace=False)
            }
            theta = float(rng.normal())
            s = random_state(rng, n)
            want = dense_rotation(n, ops, theta) @ s.amplitudes
            s.apply_rotation(PauliRotation(PauliString.from_ops(n, ops), theta))
            assert np.allclose(s.amplitudes, want, atol=1e-12)

    def test_norm_preserved(self, rng):
        s = random_state(rng, 4)
        for _ in range(20):
            ops = {int(rng.integers(4)): "Y", int(rng.integers(4)): "X"}
            s.apply_rotation(
                PauliRotation(PauliString.from_ops(4, ops), float(rng.normal()))
            )
        assert s.norm() == pytest.approx(1.0, abs=1e-12)

    def test_register_mismatch(self):
        s = StateVector(2)
        with pytest.raises(ValueError):
            s.apply_rotation(PauliRotation(PauliString.from_ops(3, {0: "X"}), 0.1))


class TestMatrixGates:
    def test_single_qubit_matches_dense(self, rng):
        h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
        for q in range(3):
            s = random_state(rng, 3)
            want = dense_embed_single(3, q, h) @ s.amplitudes
            s.apply_single_qubit(q, h)
            assert np.allclose(s.amplitudes, want, atol=1e-12)

    def test_two_qubit_matches_dense(self, rng):
        m = random_unitary4(rng)
        for a, b in ((0, 1), (2, 0), (1, 2)):
            s = random_state(rng, 3)
            want = dense_embed_pair(3, a, b, m) @ s.amplitudes
            s.apply_two_qubit(a, b, m)
            assert np.allclose(s.amplitudes, want, atol=1e-12)

    def test_iswap_matches_formula(self, rng):
        for a, b in ((0, 1), (1, 3), (3, 0)):
            for inverse in (False, True):
                s = random_state(rng, 4)
                want = dense_iswap(4, a, b, inverse) @ s.amplitudes
                s.apply_iswap(a, b, inverse=inverse)
                assert np.allclose(s.amplitudes, want, atol=1e-12)

    def test_iswap_action_on_01(self):
        s = StateVector.basis_state(2, 1)
        s.apply_iswap(0, 1)
        assert s.amplitudes[2] == pytest.approx(-1j)

    def test_iswap_rejects_same_qubit(self):
        with pytest.raises(ValueError):
            StateVector(2).apply_iswap(1, 1)


def dense_embed_single(n, qubit, matrix):
    out = np.array([[1.0]], dtype=complex)
    for q in reversed(range(n)):
        out = np.kron(out, matrix if q == qubit else np.eye(2))
    return out


def dense_embed_pair(n, qubit_a, qubit_b, matrix):
    """Embed a 4x4 on (a, b); a is the low bit of the gate basis index."""
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        rest = i & ~((1 << qubit_a) | (1 << qubit_b))
        col = ((i >> qubit_a) & 1) | (((i >> qubit_b) & 1) << 1)
        for row in range(4):
            j = rest | ((row & 1) << qubit_a) | ((row >> 1) << qubit_b)
            out[j, i] = matrix[row, col]
    return out


def random_unitary4(rng):
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    q, _ = np.linalg.qr(m)
    return q


class TestMeasurement:
    def test_expectation_z_on_basis_states(self):
        s = StateVector.basis_state(2, 2)
        assert s.expectation_z(0) == pytest.approx(1.0)
        assert s.expectation_z(1) == pytest.approx(-1.0)

    def test_expectation_z_all_matches_singles(self, rng):
        s = random_state(rng, 4)
        all_z = s.expectation_z_all()
        for q in range(4):
            assert all_z[q] == pytest.approx(s.expectation_z(q))

    def test_average_z(self, rng):
        s = random_state(rng, 3)
        assert s.average_z() == pytest.approx(float(s.expectation_z_all().mean()))

    def test_sample_z_converges(self):
        s = StateVector.basis_state(1, 0)
        s.apply_rotation(PauliRotation(PauliString.from_ops(1, {0: "X"}), math.pi / 8))
        exact = s.expectation_z(0)
        est = s.sample_z(0, 200_000, np.random.default_rng(5))
        assert est == pytest.approx(exact, abs=0.01)

    def test_sample_z_deterministic_given_stream(self):
        s = StateVector.basis_state(1, 0)
        s.apply_rotation(PauliRotation(PauliString.from_ops(1, {0: "X"}), 0.4))
        a = s.sample_z(0, 100, np.random.default_rng(9))
        b = s.sample_z(0, 100, np.random.default_rng(9))
        assert a == b

    def test_probabilities_sum_to_one(self, rng):
        s = random_state(rng, 3)
        assert s.probabilities().sum() == pytest.approx(1.0)


class TestStatesEqual:
    def test_global_phase_ignored(self, rng):
        s = random_state(rng, 3)
        t = StateVector(3, s.amplitudes * np.exp(0.37j))
        assert states_equal(s, t)

    def test_distinct_states(self):
        assert not states_equal(
            StateVector.basis_state(2, 0), StateVector.basis_state(2, 1)
        )
