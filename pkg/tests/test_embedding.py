import numpy as np
import pytest

from vqcremap.embedding import (
    AMPLITUDE,
    ANGLE,
    EmbeddingSpec,
    amplitude_qubits,
    amplitude_unitary,
    embed_amplitude,
    embed_angle,
    embedding_spec,
    normalized_amplitudes,
    prepare,
    reembed,
)
from vqcremap.exceptions import ConfigurationError, DegenerateInputError
from vqcremap.statevector import expectations_z


# embedding_spec


def test_embedding_spec_angle():
    assert embedding_spec(ANGLE, 4) == EmbeddingSpec(ANGLE, 4, 4)


@pytest.mark.parametrize(
    "n_features,n_qubits", [(1, 1), (2, 1), (4, 2), (7, 3), (8, 3), (9, 4), (13, 4)]
)
def test_embedding_spec_amplitude(n_features, n_qubits):
    assert embedding_spec(AMPLITUDE, n_features).n_qubits == n_qubits
    assert amplitude_qubits(n_features) == n_qubits


def test_embedding_spec_unknown_kind():
    with pytest.raises(ConfigurationError):
        embedding_spec("basis", 4)


def test_embedding_spec_no_features():
    with pytest.raises(ConfigurationError):
        embedding_spec(ANGLE, 0)


# embed_angle


def test_embed_angle_expectations_are_cosines():
    features = np.array([0.0, np.pi / 2, np.pi])
    state = embed_angle(features)
    assert state.n_qubits == 3
    assert np.allclose(expectations_z(state.amplitudes, 3, 3), np.cos(features))


def test_embed_angle_empty():
    with pytest.raises(ConfigurationError):
        embed_angle(np.array([]))


# embed_amplitude


def test_embed_amplitude_pads_and_normalizes():
    state = embed_amplitude(np.array([3.0, 4.0, 0.0]))
    assert state.n_qubits == 2
    assert np.allclose(state.amplitudes, [0.6, 0.8, 0.0, 0.0])


def test_embed_amplitude_all_zero():
    with pytest.raises(DegenerateInputError):
        embed_amplitude(np.zeros(4))


def test_normalized_amplitudes_batch():
    result = normalized_amplitudes(np.array([[1.0, 1.0], [0.0, 2.0]]), 1)
    assert np.allclose(np.linalg.norm(result, axis=-1), 1.0)


# amplitude_unitary


def test_amplitude_unitary_maps_zero_state_to_embedding():
    features = np.array([0.2, 0.5, 0.1, 0.9, 0.3])
    unitary = amplitude_unitary(features)
    assert unitary.shape == (8, 8)
    assert np.allclose(unitary[:, 0], embed_amplitude(features).amplitudes.real)


def test_amplitude_unitary_is_orthogonal():
    unitary = amplitude_unitary(np.array([0.4, 0.1, 0.7]))
    assert np.allclose(unitary @ unitary.T, np.eye(4))


def test_amplitude_unitary_of_zero_state_embedding_is_identity():
    assert np.allclose(amplitude_unitary(np.array([1.0, 0.0])), np.eye(2))


def test_amplitude_unitary_batch():
    features = np.array([[0.1, 0.2, 0.3, 0.4], [1.0, 0.0, 0.5, 0.5]])
    unitaries = amplitude_unitary(features)
    assert unitaries.shape == (2, 4, 4)
    assert np.allclose(unitaries[1], amplitude_unitary(features[1]))


# prepare


def test_prepare_angle_matches_embed_angle():
    features = np.array([[0.3, 1.2], [2.0, 0.1]])
    amplitudes = prepare(embedding_spec(ANGLE, 2), features, 2)
    assert np.allclose(amplitudes[1], embed_angle(features[1]).amplitudes)


def test_prepare_pads_extra_qubits_in_zero():
    # 4 features on 2 qubits, in a 3-qubit register: the third qubit stays |0⟩.
    features = np.array([0.1, 0.2, 0.3, 0.4])
    amplitudes = prepare(embedding_spec(AMPLITUDE, 4), features, 3)
    assert np.allclose(amplitudes[1::2], 0)
    assert np.allclose(amplitudes[::2], embed_amplitude(features).amplitudes)


def test_prepare_register_too_small():
    with pytest.raises(ConfigurationError):
        prepare(embedding_spec(ANGLE, 3), np.zeros(3), 2)


def test_prepare_wrong_feature_count():
    with pytest.raises(ConfigurationError):
        prepare(embedding_spec(ANGLE, 3), np.zeros(4), 3)


# reembed


def test_reembed_from_zero_state_equals_prepare():
    spec = embedding_spec(AMPLITUDE, 3)
    features = np.array([[0.2, 0.9, 0.4]])
    zero = np.zeros((1, 4), dtype=complex)
    zero[:, 0] = 1.0
    assert np.allclose(reembed(spec, zero, features, 2), prepare(spec, features, 2))


def test_reembed_angle_twice_doubles_angles():
    spec = embedding_spec(ANGLE, 2)
    features = np.array([0.4, 1.1])
    once = prepare(spec, features, 2)
    twice = reembed(spec, once, features, 2)
    assert np.allclose(twice, prepare(spec, 2 * features, 2))


def test_reembed_preserves_norm():
    rng = np.random.default_rng(0)
    state = rng.normal(size=8) + 1j * rng.normal(size=8)
    state /= np.linalg.norm(state)
    result = reembed(embedding_spec(AMPLITUDE, 4), state, rng.uniform(size=4), 3)
    assert np.isclose(np.linalg.norm(result), 1.0)
