"""The variational classifier.

A circuit is S_x followed by n_layers variational layers (or, with re-uploading, S_x
before every layer), then the first n_classes qubits are measured in Z. A bias is added
to each expectation value and the softmax gives class probabilities.

Each layer applies RZ, RY, RZ to every qubit, then a ring of CNOTs whose target is
(i + l) mod n for layer l (counted from 1).
"""
from typing import Any, Dict, List, NamedTuple, Tuple, Union
import importlib.resources
import json

from jsonschema.exceptions import ValidationError  # type: ignore
from jsonschema.validators import validator_for  # type: ignore
import numpy as np

from .embedding import EmbeddingSpec, embedding_spec, prepare, reembed
from .exceptions import ConfigurationError
from .remap import RemapFunction, get_remap, remap
from .sentinels import NOREMAP, Sentinel
from .statevector import (
    MAX_QUBITS,
    RY,
    RZ,
    StateVector,
    cnot,
    expectations_z,
    rotate,
)

Remap = Union[RemapFunction, Sentinel]

# Prepare the checkpoint validator once, at import.
schema = json.loads(
    importlib.resources.read_text(__package__, "checkpoint-schema.json")
)
klass = validator_for(schema)
klass.check_schema(schema)
validate_checkpoint = klass(schema).validate


class VqcModel(NamedTuple):
    n_qubits: int
    n_layers: int
    n_classes: int
    weights: np.ndarray  # (n_layers, n_qubits, 3) radians, raw (not remapped)
    biases: np.ndarray  # (n_classes,)
    remap: Remap
    embedding: EmbeddingSpec
    reupload: bool

    def __repr__(self) -> str:
        return (
            f"VqcModel(n_qubits={self.n_qubits}, n_layers={self.n_layers}, "
            f"n_classes={self.n_classes}, remap={self.remap!r}, "
            f"embedding={self.embedding!r}, reupload={self.reupload})"
        )


class ClassProbabilities(NamedTuple):
    probs: np.ndarray


def init_vqc(
    embedding: EmbeddingSpec,
    n_classes: int,
    n_layers: int,
    remap_function: Remap,
    reupload: bool,
    rng: np.random.Generator,
) -> VqcModel:
    """Weights uniform on [-π, π], biases zero.

    The register grows past the embedding's qubits when there are more classes than
    that, since each class is read from its own qubit. The extra qubits start in |0⟩.
    """
    if n_layers < 1:
        raise ConfigurationError(f"At least one layer is needed, got {n_layers}")
    if n_classes < 1:
        raise ConfigurationError(f"At least one class is needed, got {n_classes}")
    n_qubits = max(embedding.n_qubits, n_classes)
    if n_qubits > MAX_QUBITS:
        raise ConfigurationError(f"{n_qubits} qubits exceed the {MAX_QUBITS} limit")
    return VqcModel(
        n_qubits=n_qubits,
        n_layers=n_layers,
        n_classes=n_classes,
        weights=rng.uniform(-np.pi, np.pi, size=(n_layers, n_qubits, 3)),
        biases=np.zeros(n_classes),
        remap=remap_function,
        embedding=embedding,
        reupload=reupload,
    )


def parameter_count(model: VqcModel) -> int:
    return 3 * model.n_qubits * model.n_layers + model.n_classes


def cnot_pairs(n_qubits: int, layer_index: int) -> List[Tuple[int, int]]:
    """(control, target) pairs of layer `layer_index`, in order. A pair whose target
    would equal its control (layer_index a multiple of n_qubits) is left out.
    """
    if layer_index < 1:
        raise ConfigurationError(f"Layers are counted from 1, got {layer_index}")
    pairs = [(i, (i + layer_index) % n_qubits) for i in range(n_qubits)]
    return [(control, target) for control, target in pairs if control != target]


def layer(
    amplitudes: np.ndarray, n_qubits: int, angles: np.ndarray, layer_index: int
) -> np.ndarray:
    """Batched layer. `angles` is (..., n_qubits, 3), its batch axes broadcast against
    those of `amplitudes`.
    """
    for qubit in range(n_qubits):
        for kind, column in ((RZ, 0), (RY, 1), (RZ, 2)):
            amplitudes = rotate(
                amplitudes, n_qubits, kind, qubit, angles[..., qubit, column]
            )
    for control, target in cnot_pairs(n_qubits, layer_index):
        amplitudes = cnot(amplitudes, n_qubits, control, target)
    return amplitudes


def apply_layer(
    state: StateVector, layer_weights: np.ndarray, layer_index: int
) -> StateVector:
    """One layer with already remapped weights (n_qubits, 3)."""
    layer_weights = np.asarray(layer_weights, dtype=float)
    if layer_weights.shape != (state.n_qubits, 3):
        raise ConfigurationError(
            f"Layer weights must be ({state.n_qubits}, 3), got {layer_weights.shape}"
        )
    return StateVector(
        state.n_qubits,
        layer(state.amplitudes, state.n_qubits, layer_weights, layer_index),
    )


def remapped_weights(model: VqcModel) -> np.ndarray:
    if model.remap is NOREMAP:
        return model.weights
    return remap(model.remap, model.weights)


def expectations(
    model: VqcModel, angles: np.ndarray, features: np.ndarray
) -> np.ndarray:
    """Measured expectations for every combination of sample and angle set.

    Args:
        angles: (B, n_layers, n_qubits, 3) circuit angles, already remapped.
        features: (S, n_features) preprocessed feature vectors.

    Returns: (S, B, n_classes) expectation values ⟨Z_j⟩.
    """
    features = np.atleast_2d(np.asarray(features, dtype=float))
    amplitudes = prepare(model.embedding, features, model.n_qubits)[:, None, :]
    for index in range(model.n_layers):
        if model.reupload and index > 0:
            amplitudes = reembed(
                model.embedding, amplitudes, features[:, None, :], model.n_qubits
            )
        amplitudes = layer(amplitudes, model.n_qubits, angles[:, index], index + 1)
    return expectations_z(amplitudes, model.n_qubits, model.n_classes)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Softmax over the last axis."""
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / np.sum(exp, axis=-1, keepdims=True)


def predict_proba(model: VqcModel, features: np.ndarray) -> np.ndarray:
    """(N, n_features) -> (N, n_classes) class probabilities."""
    angles = remapped_weights(model)[None]
    return softmax(expectations(model, angles, features)[:, 0, :] + model.biases)


def predict(model: VqcModel, features: np.ndarray) -> np.ndarray:
    return np.argmax(predict_proba(model, features), axis=-1)


def forward(
    model: VqcModel, features: np.ndarray
) -> Tuple[ClassProbabilities, np.ndarray]:
    """Single sample forward pass, giving the probabilities and the raw expectations."""
    angles = remapped_weights(model)[None]
    sample = np.asarray(features, dtype=float)[None]
    measured = expectations(model, angles, sample)[0, 0]
    return ClassProbabilities(softmax(measured + model.biases)), measured


# Checkpoints


def remap_name(remap_function: Remap) -> str:
    # A model without re-mapping is stored as "none"; it loads back as the identity,
    # which gives the same numbers.
    return "none" if remap_function is NOREMAP else remap_function.name


def to_checkpoint(model: VqcModel) -> Dict[str, Any]:
    return {
        "kind": "vqc",
        "n_qubits": model.n_qubits,
        "n_layers": model.n_layers,
        "n_classes": model.n_classes,
        "n_features": model.embedding.n_features,
        "embedding": model.embedding.kind,
        "remap": remap_name(model.remap),
        "reupload": model.reupload,
        "weights": model.weights.ravel().tolist(),
        "biases": model.biases.tolist(),
    }


def check_checkpoint(record: Dict[str, Any]) -> Dict[str, Any]:
    try:
        validate_checkpoint(record)
    except ValidationError as exc:
        raise ConfigurationError(f"Invalid checkpoint: {exc.message}") from None
    return record


def from_checkpoint(record: Dict[str, Any]) -> VqcModel:
    check_checkpoint(record)
    if record["kind"] != "vqc":
        raise ConfigurationError(f"Not a vqc checkpoint: {record['kind']!r}")
    shape = (record["n_layers"], record["n_qubits"], 3)
    weights = np.asarray(record["weights"], dtype=float)
    biases = np.asarray(record["biases"], dtype=float)
    if weights.size != np.prod(shape) or biases.size != record["n_classes"]:
        raise ConfigurationError("Checkpoint weights don't match its dimensions")
    return VqcModel(
        n_qubits=record["n_qubits"],
        n_layers=record["n_layers"],
        n_classes=record["n_classes"],
        weights=weights.reshape(shape),
        biases=biases,
        remap=get_remap(record["remap"]),
        embedding=embedding_spec(record["embedding"], record["n_features"]),
        reupload=record["reupload"],
    )
