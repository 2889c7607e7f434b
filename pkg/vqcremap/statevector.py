"""Dense statevector simulation of an n-qubit register.

Qubit 0 is the most significant bit of a basis-state index, so a register reads top to
bottom like a circuit diagram: on 2 qubits, amplitude 2 belongs to |10⟩.

The kernels (rotate, cnot, expectations_z) work on amplitude arrays with any number of
leading batch axes, e.g. (samples, circuits, 2**n). That's how a whole parameter-shift
stencil for a mini-batch is simulated in one pass. apply_gate and friends are the
single-state view of the same kernels.
"""
from functools import lru_cache
from typing import NamedTuple, Optional, Union

import numpy as np

from .exceptions import ConfigurationError, QubitIndexError

MAX_QUBITS = 16

RX = "RX"
RY = "RY"
RZ = "RZ"
CNOT = "CNOT"
ROTATIONS = (RX, RY, RZ)


class StateVector(NamedTuple):
    n_qubits: int
    amplitudes: np.ndarray


class Gate(NamedTuple):
    kind: str
    target: int
    angle: float = 0.0
    control: Optional[int] = None  # CNOT only


# Gate constructors


def Rx(target: int, angle: float) -> Gate:
    return Gate(RX, target, angle)


def Ry(target: int, angle: float) -> Gate:
    return Gate(RY, target, angle)


def Rz(target: int, angle: float) -> Gate:
    return Gate(RZ, target, angle)


def Cnot(control: int, target: int) -> Gate:
    return Gate(CNOT, target, control=control)


def inverse(gate: Gate) -> Gate:
    """CNOT is self-inverse, a rotation is undone by negating its angle."""
    return gate if gate.kind == CNOT else gate._replace(angle=-gate.angle)


# Kernels


def _pairs(amplitudes: np.ndarray, n_qubits: int, qubit: int) -> np.ndarray:
    """View the amplitudes so that axis -2 is the bit of `qubit`."""
    return amplitudes.reshape(
        amplitudes.shape[:-1] + (2**qubit, 2, 2 ** (n_qubits - qubit - 1))
    )


def rotate(
    amplitudes: np.ndarray,
    n_qubits: int,
    kind: str,
    target: int,
    angle: Union[float, np.ndarray],
) -> np.ndarray:
    """Apply RX, RY or RZ to `target`.

    `angle` is a scalar, or an array broadcasting against the batch axes of
    `amplitudes` (one angle per batch element).
    """
    half = np.asarray(angle, dtype=float)[..., None, None] / 2
    psi = _pairs(amplitudes, n_qubits, target)
    a0, a1 = psi[..., 0, :], psi[..., 1, :]
    if kind == RZ:
        phase = np.exp(-1j * half)
        b0, b1 = phase * a0, np.conj(phase) * a1
    else:
        cos, sin = np.cos(half), np.sin(half)
        if kind == RX:
            b0, b1 = cos * a0 - 1j * sin * a1, cos * a1 - 1j * sin * a0
        elif kind == RY:
            b0, b1 = cos * a0 - sin * a1, sin * a0 + cos * a1
        else:
            raise ConfigurationError(f"Unknown rotation {kind!r}")
    out = np.stack(np.broadcast_arrays(b0, b1), axis=-2)
    return out.reshape(out.shape[:-3] + (2**n_qubits,))


@lru_cache(maxsize=None)
def _cnot_permutation(n_qubits: int, control: int, target: int) -> np.ndarray:
    index = np.arange(2**n_qubits)
    control_set = (index >> (n_qubits - 1 - control)) & 1
    return index ^ (control_set << (n_qubits - 1 - target))


def cnot(
    amplitudes: np.ndarray, n_qubits: int, control: int, target: int
) -> np.ndarray:
    return amplitudes[..., _cnot_permutation(n_qubits, control, target)]


@lru_cache(maxsize=None)
def _z_signs(n_qubits: int, k: int) -> np.ndarray:
    """(2**n, k) matrix of +1/-1, column j is the Z eigenvalue of qubit j."""
    index = np.arange(2**n_qubits)[:, None]
    bits = (index >> (n_qubits - 1 - np.arange(k))[None, :]) & 1
    return 1.0 - 2.0 * bits


def expectations_z(amplitudes: np.ndarray, n_qubits: int, k: int) -> np.ndarray:
    """⟨Z_0⟩ .. ⟨Z_{k-1}⟩, shape (batch axes..., k)."""
    probabilities = amplitudes.real**2 + amplitudes.imag**2
    return probabilities @ _z_signs(n_qubits, k)


# Single state operations


def _check_qubit(n_qubits: int, qubit: int) -> None:
    if not 0 <= qubit < n_qubits:
        raise QubitIndexError(
            f"Qubit {qubit} out of range for a {n_qubits}-qubit register"
        )


def zero_state(n_qubits: int) -> StateVector:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(
            f"Register size must be between 1 and {MAX_QUBITS} qubits, got {n_qubits}"
        )
    amplitudes = np.zeros(2**n_qubits, dtype=complex)
    amplitudes[0] = 1.0
    return StateVector(n_qubits, amplitudes)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Returns U|state⟩ as a new StateVector. The input is not modified."""
    _check_qubit(state.n_qubits, gate.target)
    if gate.kind == CNOT:
        if gate.control is None:
            raise ConfigurationError("CNOT needs a control qubit")
        _check_qubit(state.n_qubits, gate.control)
        if gate.control == gate.target:
            raise QubitIndexError("CNOT control and target must differ")
        amplitudes = cnot(state.amplitudes, state.n_qubits, gate.control, gate.target)
    else:
        amplitudes = rotate(
            state.amplitudes, state.n_qubits, gate.kind, gate.target, gate.angle
        )
    return StateVector(state.n_qubits, amplitudes)


def expectation_z(state: StateVector, qubit: int) -> float:
    _check_qubit(state.n_qubits, qubit)
    return float(expectations_z(state.amplitudes, state.n_qubits, qubit + 1)[qubit])
