"""Unit tests for the statevector simulator and deviation measures.

Gate routines are checked against independently embedded dense operators;
the effective deviation is checked against its literal Pauli-sum definition.
"""

import numpy as np
import pytest

from bpdiag.pauli import PauliString, dense_matrix, enumerate_effective_set, parse_pauli
from bpdiag.statevector import (
    StateVector,
    apply_dense,
    apply_pauli_exp,
    apply_rotation_1q,
    apply_rxx,
    effective_hs_deviation_sq,
    expect_pauli,
    hs_deviation_sq,
    init_basis_state,
    partial_trace,
)


def random_state(n, rng):
    amps = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    amps /= np.linalg.norm(amps)
    return StateVector(n, amps)


def embed(matrix, qubits, n):
    """Dense embedding oracle: place ``matrix`` on ``qubits`` by explicit
    index bookkeeping (qubits[0] = least significant matrix bit)."""
    dim = 1 << n
    k = len(qubits)
    out = np.zeros((dim, dim), dtype=complex)
    rest = [q for q in range(n) if q not in qubits]
    for i in range(dim):
        for j in range(dim):
            if any((i >> q) & 1 != (j >> q) & 1 for q in rest):
                continue
            row = sum(((i >> q) & 1) << b for b, q in enumerate(qubits))
            col = sum(((j >> q) & 1) << b for b, q in enumerate(qubits))
            out[i, j] = matrix[row, col]
    return out


class TestBasisState:
    def test_default_all_zeros(self):
        state = init_basis_state(3)
        expected = np.zeros(8)
        expected[0] = 1.0
        np.testing.assert_allclose(state.amplitudes, expected)

    def test_bit_positions(self):
        # bits[q] is qubit q, qubit 0 least significant
        state = init_basis_state(3, "110")
        assert state.amplitudes[0b011] == 1.0
        assert np.count_nonzero(state.amplitudes) == 1

    def test_validation(self):
        with pytest.raises(ValueError):
            init_basis_state(0)
        with pytest.raises(ValueError):
            init_basis_state(2, "012")
        with pytest.raises(ValueError):
            init_basis_state(2, "0")


class TestExpectation:
    def test_basis_state_z_values(self):
        state = init_basis_state(2, "10")
        assert expect_pauli(state, parse_pauli("ZI")) == -1.0
        assert expect_pauli(state, parse_pauli("IZ")) == 1.0

    def test_against_dense(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            n = int(rng.integers(1, 6))
            state = random_state(n, rng)
            label = "".join(rng.choice(list("IXYZ")) for _ in range(n))
            p = parse_pauli(label)
            direct = expect_pauli(state, p)
            oracle = np.vdot(state.amplitudes, dense_matrix(p) @ state.amplitudes).real
            np.testing.assert_allclose(direct, oracle, atol=1e-12)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            expect_pauli(init_basis_state(2), parse_pauli("Z"))


class TestGatesAgainstDense:
    def test_rotation_1q(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            n = int(rng.integers(1, 5))
            q = int(rng.integers(0, n))
            axis = str(rng.choice(list("XYZ")))
            angle = float(rng.uniform(-6, 6))
            state = random_state(n, rng)
            expected = state.copy()
            p = dense_matrix(PauliString.single(n, q, axis))
            expected.amplitudes = (
                np.cos(angle / 2) * np.eye(1 << n) - 1j * np.sin(angle / 2) * p
            ) @ expected.amplitudes
            apply_rotation_1q(state, axis, q, angle)
            np.testing.assert_allclose(state.amplitudes, expected.amplitudes, atol=1e-12)

    def test_rxx_full_angle(self):
        rng = np.random.default_rng(29)
        for _ in range(30):
            n = int(rng.integers(2, 5))
            a, b = rng.choice(n, size=2, replace=False)
            angle = float(rng.uniform(-6, 6))
            state = random_state(n, rng)
            xa = PauliString.single(n, int(a), "X")
            xb = PauliString.single(n, int(b), "X")
            xx = dense_matrix(PauliString(n, xa.x_mask | xb.x_mask, 0))
            expected = (
                np.cos(angle) * np.eye(1 << n) - 1j * np.sin(angle) * xx
            ) @ state.amplitudes
            apply_rxx(state, int(a), int(b), angle)
            np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)

    def test_pauli_exp(self):
        rng = np.random.default_rng(31)
        for _ in range(30):
            n = int(rng.integers(1, 5))
            label = "".join(rng.choice(list("IXYZ")) for _ in range(n))
            g = parse_pauli(label)
            if g.is_identity():
                continue
            angle = float(rng.uniform(-6, 6))
            state = random_state(n, rng)
            expected = (
                np.cos(angle) * np.eye(1 << n) - 1j * np.sin(angle) * dense_matrix(g)
            ) @ state.amplitudes
            apply_pauli_exp(state, g, angle)
            np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)

    def test_pauli_exp_identity_is_a_phase(self):
        state = init_basis_state(2)
        apply_pauli_exp(state, PauliString.identity(2), 0.7)
        np.testing.assert_allclose(state.amplitudes[0], np.exp(-0.7j))

    def test_gates_preserve_norm(self):
        rng = np.random.default_rng(37)
        state = random_state(4, rng)
        apply_rotation_1q(state, "Y", 2, 1.3)
        apply_rxx(state, 0, 3, -2.1)
        apply_pauli_exp(state, parse_pauli("ZIXI"), 0.4)
        np.testing.assert_allclose(state.norm(), 1.0, atol=1e-12)

    def test_rxx_validation(self):
        state = init_basis_state(3)
        with pytest.raises(ValueError):
            apply_rxx(state, 1, 1, 0.5)
        with pytest.raises(ValueError):
            apply_rxx(state, 0, 3, 0.5)


class TestApplyDense:
    def test_matches_embedding_oracle(self):
        rng = np.random.default_rng(41)
        for _ in range(25):
            n = int(rng.integers(1, 5))
            k = int(rng.integers(1, min(n, 3) + 1))
            qubits = tuple(int(q) for q in rng.choice(n, size=k, replace=False))
            z = rng.standard_normal((1 << k, 1 << k)) + 1j * rng.standard_normal((1 << k, 1 << k))
            matrix, _ = np.linalg.qr(z)
            state = random_state(n, rng)
            expected = embed(matrix, qubits, n) @ state.amplitudes
            apply_dense(state, matrix, qubits)
            np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)

    def test_pauli_as_dense_agrees_with_expectation(self):
        rng = np.random.default_rng(43)
        state = random_state(3, rng)
        p = parse_pauli("XYZ")
        phase = state.copy()
        apply_dense(phase, dense_matrix(p), (0, 1, 2))
        np.testing.assert_allclose(
            np.vdot(state.amplitudes, phase.amplitudes).real,
            expect_pauli(state, p),
            atol=1e-12,
        )

    def test_rejects_non_unitary(self):
        state = init_basis_state(2)
        with pytest.raises(ValueError):
            apply_dense(state, np.ones((2, 2), dtype=complex), (0,))

    def test_shape_and_qubit_validation(self):
        state = init_basis_state(2)
        with pytest.raises(ValueError):
            apply_dense(state, np.eye(2), (0, 1))
        with pytest.raises(ValueError):
            apply_dense(state, np.eye(4), (0, 0))
        with pytest.raises(ValueError):
            apply_dense(state, np.eye(2), (4,))


class TestPartialTrace:
    def full_density_oracle(self, state, qubits):
        n = state.n_qubits
        rho = np.outer(state.amplitudes, state.amplitudes.conj())
        keep = len(qubits)
        out = np.zeros((1 << keep, 1 << keep), dtype=complex)
        for i in range(1 << n):
            for j in range(1 << n):
                rest_i = [(i >> q) & 1 for q in range(n) if q not in qubits]
                rest_j = [(j >> q) & 1 for q in range(n) if q not in qubits]
                if rest_i != rest_j:
                    continue
                r = sum(((i >> q) & 1) << b for b, q in enumerate(qubits))
                c = sum(((j >> q) & 1) << b for b, q in enumerate(qubits))
                out[r, c] += rho[i, j]
        return out

    def test_against_full_density_matrix(self):
        rng = np.random.default_rng(47)
        for _ in range(15):
            n = int(rng.integers(2, 6))
            k = int(rng.integers(1, n))
            qubits = tuple(int(q) for q in rng.choice(n, size=k, replace=False))
            state = random_state(n, rng)
            block = partial_trace(state, qubits)
            block.validate()
            np.testing.assert_allclose(
                block.matrix, self.full_density_oracle(state, qubits), atol=1e-12
            )

    def test_product_state_block_is_pure(self):
        state = init_basis_state(4, "0110")
        block = partial_trace(state, (1, 2))
        np.testing.assert_allclose(block.purity(), 1.0, atol=1e-12)
        assert block.matrix[0b11, 0b11] == 1.0

    def test_validation(self):
        state = init_basis_state(3)
        with pytest.raises(ValueError):
            partial_trace(state, ())
        with pytest.raises(ValueError):
            partial_trace(state, (0, 0))
        with pytest.raises(ValueError):
            partial_trace(state, (5,))


class TestDeviationMeasures:
    def test_hs_deviation_pure_qubit(self):
        state = init_basis_state(2)
        block = partial_trace(state, (0,))
        np.testing.assert_allclose(hs_deviation_sq(block), 0.5, atol=1e-12)

    def test_hs_deviation_maximally_mixed(self):
        # Bell pair: each half is maximally mixed
        amps = np.zeros(4, dtype=complex)
        amps[0b00] = amps[0b11] = 1 / np.sqrt(2)
        block = partial_trace(StateVector(2, amps), (0,))
        np.testing.assert_allclose(hs_deviation_sq(block), 0.0, atol=1e-12)

    def test_effective_deviation_matches_pauli_sum(self):
        rng = np.random.default_rng(53)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            size = int(rng.integers(1, min(n, 3) + 1))
            gamma = tuple(int(q) for q in rng.choice(n, size=size, replace=False))
            g = PauliString.single(n, int(rng.choice(gamma)), str(rng.choice(list("XYZ"))))
            state = random_state(n, rng)
            direct = effective_hs_deviation_sq(state, gamma, g)
            members = enumerate_effective_set(gamma, g)
            oracle = 2.0 ** (-len(gamma)) * sum(expect_pauli(state, p) ** 2 for p in members)
            np.testing.assert_allclose(direct, oracle, atol=1e-12)

    def test_effective_deviation_single_qubit_bloch_form(self):
        # for gamma = {q}, G = Z: deviation = (<X>^2 + <Y>^2) / 2
        rng = np.random.default_rng(59)
        state = random_state(1, rng)
        x = expect_pauli(state, parse_pauli("X"))
        y = expect_pauli(state, parse_pauli("Y"))
        direct = effective_hs_deviation_sq(state, (0,), parse_pauli("Z"))
        np.testing.assert_allclose(direct, (x * x + y * y) / 2, atol=1e-12)

    def test_effective_at_most_total_deviation(self):
        rng = np.random.default_rng(61)
        state = random_state(4, rng)
        gamma = (0, 2)
        g = PauliString.single(4, 2, "X")
        total = hs_deviation_sq(partial_trace(state, gamma))
        assert effective_hs_deviation_sq(state, gamma, g) <= total + 1e-12

    def test_generator_must_fit_gamma(self):
        state = init_basis_state(3)
        with pytest.raises(ValueError):
            effective_hs_deviation_sq(state, (0,), PauliString.single(3, 1, "Z"))
