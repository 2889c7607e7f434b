"""State preparation S_x: encoding a classical feature vector into the register.

Angle embedding puts feature i on qubit i as RX(x_i). Amplitude embedding pads the
features with zeros to a power of two, L2-normalizes them and uses the result directly
as the amplitude vector. On a noiseless simulator that gives the same state as a
gate-level state preparation, without building the gates.
"""
from math import ceil, log2
from typing import NamedTuple

import numpy as np

from .exceptions import ConfigurationError, DegenerateInputError
from .statevector import MAX_QUBITS, RX, StateVector, rotate, zero_state

ANGLE = "angle"
AMPLITUDE = "amplitude"
EMBEDDINGS = (ANGLE, AMPLITUDE)


class EmbeddingSpec(NamedTuple):
    kind: str
    n_features: int
    n_qubits: int


def amplitude_qubits(n_features: int) -> int:
    return ceil(log2(max(n_features, 2)))


def embedding_spec(kind: str, n_features: int) -> EmbeddingSpec:
    if n_features < 1:
        raise ConfigurationError("At least one feature is needed")
    if kind == ANGLE:
        return EmbeddingSpec(ANGLE, n_features, n_features)
    elif kind == AMPLITUDE:
        return EmbeddingSpec(AMPLITUDE, n_features, amplitude_qubits(n_features))
    raise ConfigurationError(
        f"Unknown embedding {kind!r}, expected one of {', '.join(EMBEDDINGS)}"
    )


def normalized_amplitudes(features: np.ndarray, n_qubits: int) -> np.ndarray:
    """Pad the trailing feature axis to 2**n_qubits and L2-normalize it."""
    features = np.asarray(features, dtype=float)
    padded = np.zeros(features.shape[:-1] + (2**n_qubits,))
    padded[..., : features.shape[-1]] = features
    norms = np.linalg.norm(padded, axis=-1, keepdims=True)
    if np.any(norms == 0):
        raise DegenerateInputError("An all-zero feature vector can't be normalized")
    return padded / norms


def embed_angle(features: np.ndarray) -> StateVector:
    features = np.asarray(features, dtype=float)
    if features.size == 0:
        raise ConfigurationError("Angle embedding needs at least one feature")
    state = zero_state(features.size)
    amplitudes = state.amplitudes
    for qubit, x in enumerate(features):
        amplitudes = rotate(amplitudes, state.n_qubits, RX, qubit, x)
    return StateVector(state.n_qubits, amplitudes)


def embed_amplitude(features: np.ndarray) -> StateVector:
    features = np.asarray(features, dtype=float)
    if features.size == 0:
        raise ConfigurationError("Amplitude embedding needs at least one feature")
    n_qubits = amplitude_qubits(features.size)
    return StateVector(
        n_qubits, normalized_amplitudes(features, n_qubits).astype(complex)
    )


def amplitude_unitary(features: np.ndarray) -> np.ndarray:
    """A real orthogonal U with U|0…0⟩ == embed_amplitude(features).

    Works on a trailing feature axis, giving (..., 2**n, 2**n). U is the Householder
    reflection that swaps |0…0⟩ with the target vector, so it can be re-applied to
    an arbitrary state when the data is re-uploaded.
    """
    features = np.asarray(features, dtype=float)
    n_qubits = amplitude_qubits(features.shape[-1])
    target = normalized_amplitudes(features, n_qubits)
    v = -target
    v[..., 0] += 1.0
    norm2 = np.sum(v * v, axis=-1)[..., None, None]
    reflection = 2 * v[..., :, None] * v[..., None, :]
    safe = np.where(norm2 > 1e-30, norm2, 1.0)
    return np.eye(2**n_qubits) - np.where(norm2 > 1e-30, reflection / safe, 0.0)


def _check_register(spec: EmbeddingSpec, n_qubits: int) -> None:
    if not spec.n_qubits <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(
            f"A {spec.kind} embedding of {spec.n_features} features needs between "
            f"{spec.n_qubits} and {MAX_QUBITS} qubits, got {n_qubits}"
        )


def _check_features(spec: EmbeddingSpec, features: np.ndarray) -> np.ndarray:
    features = np.asarray(features, dtype=float)
    if features.shape[-1] != spec.n_features:
        raise ConfigurationError(
            f"Expected {spec.n_features} features, got {features.shape[-1]}"
        )
    return features


def prepare(spec: EmbeddingSpec, features: np.ndarray, n_qubits: int) -> np.ndarray:
    """S_x|0…0⟩ for a batch of feature vectors (..., n_features), giving amplitudes
    (..., 2**n_qubits). Qubits beyond the embedding's own stay in |0⟩.
    """
    _check_register(spec, n_qubits)
    features = _check_features(spec, features)
    if spec.kind == ANGLE:
        amplitudes = np.zeros(features.shape[:-1] + (2**n_qubits,), dtype=complex)
        amplitudes[..., 0] = 1.0
        return reembed(spec, amplitudes, features, n_qubits)
    embedded = normalized_amplitudes(features, spec.n_qubits)
    padding = 2 ** (n_qubits - spec.n_qubits)
    amplitudes = np.zeros(
        features.shape[:-1] + (2**spec.n_qubits, padding), dtype=complex
    )
    amplitudes[..., 0] = embedded
    return amplitudes.reshape(features.shape[:-1] + (2**n_qubits,))


def reembed(
    spec: EmbeddingSpec, amplitudes: np.ndarray, features: np.ndarray, n_qubits: int
) -> np.ndarray:
    """Apply S_x to the current state, as a re-uploading layer does.

    The batch axes of `features` (without the feature axis) broadcast against the batch
    axes of `amplitudes`.
    """
    _check_register(spec, n_qubits)
    features = _check_features(spec, features)
    if spec.kind == ANGLE:
        for qubit in range(spec.n_features):
            amplitudes = rotate(amplitudes, n_qubits, RX, qubit, features[..., qubit])
        return amplitudes
    unitary = amplitude_unitary(features)
    split = amplitudes.reshape(
        amplitudes.shape[:-1] + (2**spec.n_qubits, 2 ** (n_qubits - spec.n_qubits))
    )
    out = unitary @ split
    return out.reshape(out.shape[:-2] + (2**n_qubits,))
