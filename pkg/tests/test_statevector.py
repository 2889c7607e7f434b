from functools import reduce
from itertools import product

import numpy as np
import pytest

from vqcremap.exceptions import ConfigurationError, QubitIndexError
from vqcremap.statevector import (
    CNOT,
    RX,
    RY,
    RZ,
    Cnot,
    Gate,
    Rx,
    Ry,
    Rz,
    StateVector,
    apply_gate,
    cnot,
    expectation_z,
    expectations_z,
    inverse,
    rotate,
    zero_state,
)

I2 = np.eye(2)
Z = np.diag([1.0, -1.0])
P0 = np.diag([1.0, 0.0])
P1 = np.diag([0.0, 1.0])
X = np.array([[0.0, 1.0], [1.0, 0.0]])


def rotation_matrix(kind, angle):
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    if kind == RX:
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == RY:
        return np.array([[c, -s], [s, c]])
    return np.diag([np.exp(-1j * angle / 2), np.exp(1j * angle / 2)])


def on_qubit(n_qubits, qubit, matrix):
    """Full 2**n matrix, qubit 0 leftmost in the Kronecker product."""
    return reduce(np.kron, [matrix if q == qubit else I2 for q in range(n_qubits)])


def gate_matrix(n_qubits, gate):
    if gate.kind == CNOT:
        return on_qubit(n_qubits, gate.control, P0) + on_qubit(
            n_qubits, gate.control, P1
        ) @ on_qubit(n_qubits, gate.target, X)
    return on_qubit(n_qubits, gate.target, rotation_matrix(gate.kind, gate.angle))


def random_state(n_qubits, rng):
    amplitudes = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    return StateVector(n_qubits, amplitudes / np.linalg.norm(amplitudes))


# zero_state


def test_zero_state():
    state = zero_state(3)
    assert state.n_qubits == 3
    assert state.amplitudes.tolist() == [1, 0, 0, 0, 0, 0, 0, 0]


@pytest.mark.parametrize("n_qubits", [0, 17])
def test_zero_state_out_of_range(n_qubits):
    with pytest.raises(ConfigurationError):
        zero_state(n_qubits)


# gate constructors


def test_Rx():
    assert Rx(1, 0.5) == Gate(RX, 1, 0.5)


def test_Ry_Rz():
    assert Ry(0, 0.1).kind == RY
    assert Rz(0, 0.1).kind == RZ


def test_Cnot():
    gate = Cnot(0, 2)
    assert (gate.kind, gate.control, gate.target) == (CNOT, 0, 2)


def test_inverse_rotation():
    assert inverse(Rx(0, 0.3)) == Rx(0, -0.3)


def test_inverse_cnot():
    assert inverse(Cnot(0, 1)) == Cnot(0, 1)


# apply_gate


def test_apply_gate_rx_pi_flips_qubit():
    state = apply_gate(zero_state(1), Rx(0, np.pi))
    assert np.allclose(np.abs(state.amplitudes), [0, 1])


def test_apply_gate_qubit_zero_is_most_significant():
    state = apply_gate(zero_state(2), Rx(0, np.pi))
    assert np.isclose(abs(state.amplitudes[2]), 1.0)


def test_apply_gate_does_not_modify_input():
    state = zero_state(2)
    apply_gate(state, Ry(1, 1.0))
    assert state.amplitudes.tolist() == [1, 0, 0, 0]


def test_apply_gate_qubit_out_of_range():
    with pytest.raises(QubitIndexError):
        apply_gate(zero_state(2), Rx(2, 0.1))


def test_apply_gate_qubit_index_error_is_index_error():
    with pytest.raises(IndexError):
        apply_gate(zero_state(2), Rx(-1, 0.1))


def test_apply_gate_cnot_same_control_and_target():
    with pytest.raises(QubitIndexError):
        apply_gate(zero_state(2), Cnot(1, 1))


def test_apply_gate_cnot_without_control():
    with pytest.raises(ConfigurationError):
        apply_gate(zero_state(2), Gate(CNOT, 1))


def test_apply_gate_unknown_kind():
    with pytest.raises(ConfigurationError):
        apply_gate(zero_state(1), Gate("RW", 0, 0.1))


def test_apply_gate_matches_matrix_oracle():
    rng = np.random.default_rng(0)
    for n_qubits in (1, 2, 3):
        gates = [
            Gate(kind, target, float(rng.uniform(-4, 4)))
            for kind, target in product((RX, RY, RZ), range(n_qubits))
        ] + [
            Cnot(control, target)
            for control, target in product(range(n_qubits), repeat=2)
            if control != target
        ]
        for gate in gates:
            state = random_state(n_qubits, rng)
            expected = gate_matrix(n_qubits, gate) @ state.amplitudes
            actual = apply_gate(state, gate).amplitudes
            assert np.max(np.abs(actual - expected)) < 1e-12


def test_apply_gate_preserves_norm():
    rng = np.random.default_rng(1)
    state = random_state(3, rng)
    for gate in (Rx(0, 0.7), Ry(2, -1.3), Rz(1, 2.2), Cnot(2, 0)):
        state = apply_gate(state, gate)
    assert np.isclose(np.linalg.norm(state.amplitudes), 1.0, atol=1e-12)


def test_apply_gate_then_inverse_is_identity():
    rng = np.random.default_rng(2)
    state = random_state(3, rng)
    gate = Ry(1, 0.9)
    restored = apply_gate(apply_gate(state, gate), inverse(gate))
    assert np.allclose(restored.amplitudes, state.amplitudes, atol=1e-12)


# rotate / cnot on batches


def test_rotate_batched_angles():
    rng = np.random.default_rng(3)
    states = np.stack([random_state(2, rng).amplitudes for _ in range(4)])
    angles = rng.uniform(-3, 3, size=4)
    batched = rotate(states, 2, RY, 1, angles)
    for state, angle, result in zip(states, angles, batched):
        assert np.allclose(rotate(state, 2, RY, 1, angle), result, atol=1e-12)


def test_rotate_broadcasts_angles_over_samples():
    rng = np.random.default_rng(4)
    states = np.stack([random_state(2, rng).amplitudes for _ in range(3)])[:, None, :]
    angles = np.array([0.1, 0.2])
    result = rotate(states, 2, RX, 0, angles)
    assert result.shape == (3, 2, 4)
    assert np.allclose(result[2, 1], rotate(states[2, 0], 2, RX, 0, 0.2), atol=1e-12)


def test_cnot_flips_target_when_control_set():
    amplitudes = np.zeros(4, dtype=complex)
    amplitudes[2] = 1.0  # |10⟩
    assert np.isclose(abs(cnot(amplitudes, 2, 0, 1)[3]), 1.0)


# expectation_z


def test_expectation_z_zero_state():
    assert expectation_z(zero_state(2), 1) == 1.0


def test_expectation_z_after_rx():
    state = apply_gate(zero_state(1), Rx(0, 0.8))
    assert np.isclose(expectation_z(state, 0), np.cos(0.8))


def test_expectation_z_matches_matrix_oracle():
    rng = np.random.default_rng(5)
    state = random_state(3, rng)
    for qubit in range(3):
        observable = on_qubit(3, qubit, Z)
        expected = np.real(np.conj(state.amplitudes) @ observable @ state.amplitudes)
        assert abs(expectation_z(state, qubit) - expected) < 1e-12


def test_expectation_z_out_of_range():
    with pytest.raises(QubitIndexError):
        expectation_z(zero_state(2), 2)


def test_expectations_z_batched():
    rng = np.random.default_rng(6)
    states = np.stack([random_state(3, rng).amplitudes for _ in range(5)])
    result = expectations_z(states, 3, 2)
    assert result.shape == (5, 2)
    assert np.isclose(result[4, 1], expectation_z(StateVector(3, states[4]), 1))
