"""Training: loss, gradients, the SGD update and the epoch loop.

Gradients of the variational classifier come from the parameter-shift rule. The shift
is applied to the angle the gate actually sees, φ(θ), and the result is multiplied by
φ'(θ):

    ∂L/∂θ = φ'(θ) Σ_j ∂L/∂e_j · [e_j(φ(θ) + π/2) - e_j(φ(θ) - π/2)] / 2

All 2P + 1 circuits of the stencil (P rotation weights) are simulated together, for
every sample of a batch at once.
"""
from typing import Any, Callable, Dict, List, NamedTuple, Sequence, Tuple, Union
import logging

import numpy as np

from .baseline import MlpModel, mlp_backward, mlp_loss, mlp_predict_proba
from .exceptions import ConfigurationError
from .model import (
    ClassProbabilities,
    VqcModel,
    expectations,
    predict_proba,
    remapped_weights,
    softmax,
)
from .remap import remap_derivative
from .sentinels import NOREMAP
from .utils import SHUFFLE_STREAM, stream

SHIFT = np.pi / 2
# Upper bound on amplitudes held at once while simulating a stencil.
MAX_AMPLITUDES = 2**22

Model = Union[VqcModel, MlpModel]


class TrainingConfig(NamedTuple):
    learning_rate: float = 0.01
    batch_size: int = 5
    n_epochs: int = 30
    seed: int = 0
    approach: str = "none"


class TrainRecord(NamedTuple):
    dataset: str
    approach: str
    seed: int
    embedding: str
    reupload: bool
    model: str
    train_loss: List[float]
    train_acc: List[float]
    valid_loss: List[float]
    valid_acc: List[float]
    test_acc: float
    test_correct: List[int]
    max_abs_weight: float


class VqcGradient(NamedTuple):
    weights: np.ndarray
    biases: np.ndarray


def validate_training_config(config: TrainingConfig) -> TrainingConfig:
    if not config.learning_rate > 0:
        raise ConfigurationError(
            f"Learning rate must be > 0, got {config.learning_rate}"
        )
    if config.batch_size < 1:
        raise ConfigurationError(f"Batch size must be >= 1, got {config.batch_size}")
    if config.n_epochs < 1:
        raise ConfigurationError(f"Epochs must be >= 1, got {config.n_epochs}")
    return config


def cross_entropy(probs: Union[ClassProbabilities, np.ndarray], label: int) -> float:
    values = probs.probs if isinstance(probs, ClassProbabilities) else probs
    return float(-np.log(values[label]))


def parameter_shift(evaluate: Callable[[float], float], angle: float) -> float:
    """d/dangle of an expectation value whose angle drives one rotation gate."""
    return (evaluate(angle + SHIFT) - evaluate(angle - SHIFT)) / 2


def _stencil(angles: np.ndarray) -> np.ndarray:
    """(2P + 1, *angles.shape): unshifted, then each angle +π/2, then each -π/2."""
    flat = angles.ravel()
    shifts = SHIFT * np.eye(flat.size)
    stencil = flat + np.concatenate((np.zeros((1, flat.size)), shifts, -shifts))
    return stencil.reshape((-1,) + angles.shape)


def _chunk_size(model: VqcModel, n_circuits: int) -> int:
    return max(1, MAX_AMPLITUDES // (n_circuits * 2**model.n_qubits))


def vqc_gradients(
    model: VqcModel, features: np.ndarray, labels: np.ndarray
) -> List[VqcGradient]:
    """Per-sample gradients of the cross-entropy, one record per row of `features`."""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    labels = np.asarray(labels, dtype=int).reshape(-1)
    angles = remapped_weights(model)
    stencil = _stencil(angles)
    n_params = angles.size
    chunk = _chunk_size(model, len(stencil))
    measured = np.concatenate(
        [
            expectations(model, stencil, features[start : start + chunk])
            for start in range(0, len(features), chunk)
        ]
    )
    e = measured[:, 0]
    de = (measured[:, 1 : n_params + 1] - measured[:, n_params + 1 :]) / 2
    delta = softmax(e + model.biases)
    delta[np.arange(len(labels)), labels] -= 1
    chain = (
        np.ones(n_params)
        if model.remap is NOREMAP
        else np.ravel(remap_derivative(model.remap, model.weights))
    )
    weights = np.einsum("spk,sk->sp", de, delta) * chain
    return [
        VqcGradient(w.reshape(model.weights.shape), d) for w, d in zip(weights, delta)
    ]


def vqc_gradient(model: VqcModel, features: np.ndarray, label: int) -> VqcGradient:
    return vqc_gradients(model, np.asarray(features, dtype=float)[None], [label])[0]


def mlp_gradients(
    model: MlpModel, features: np.ndarray, labels: np.ndarray
) -> List[MlpModel]:
    return [mlp_backward(model, x, int(y)) for x, y in zip(features, labels)]


def mean_gradient(gradients: Sequence[Any]) -> Any:
    if len(gradients) == 0:
        raise ConfigurationError("Can't average an empty batch of gradients")
    first = gradients[0]
    return first._make(
        np.mean([g[i] for g in gradients], axis=0) for i in range(len(first))
    )


def sgd_step(params: Any, grads: Any, learning_rate: float) -> Any:
    """θ ← θ - α·ḡ on the fields named by the gradient record.

    `grads` is a gradient record or a sequence of them, in which case the batch mean is
    used. `params` may have more fields than the gradient (a VqcModel), those are kept.
    """
    mean = grads if hasattr(grads, "_fields") else mean_gradient(grads)
    updates = {}
    for name, grad in mean._asdict().items():
        current = np.asarray(getattr(params, name), dtype=float)
        grad = np.asarray(grad, dtype=float)
        if current.shape != grad.shape:
            raise ConfigurationError(
                f"Gradient shape {grad.shape} doesn't match {name} {current.shape}"
            )
        updates[name] = current - learning_rate * grad
    return params._replace(**updates)


# The training loop works with any model through a Learner.


class Learner(NamedTuple):
    gradients: Callable[[Any, np.ndarray, np.ndarray], List[Any]]
    probabilities: Callable[[Any, np.ndarray], np.ndarray]
    losses: Callable[[Any, np.ndarray, np.ndarray], np.ndarray]
    magnitude: Callable[[Any], float]


def _vqc_losses(
    model: VqcModel, features: np.ndarray, labels: np.ndarray
) -> np.ndarray:
    probs = predict_proba(model, features)
    return -np.log(probs[np.arange(len(labels)), labels])


VQC_LEARNER = Learner(
    gradients=vqc_gradients,
    probabilities=predict_proba,
    losses=_vqc_losses,
    magnitude=lambda model: float(np.max(np.abs(model.weights))),
)

MLP_LEARNER = Learner(
    gradients=mlp_gradients,
    probabilities=mlp_predict_proba,
    losses=mlp_loss,
    magnitude=lambda model: float(
        max(np.max(np.abs(model.w1)), np.max(np.abs(model.w2)))
    ),
)


def learner_for(model: Model) -> Learner:
    return MLP_LEARNER if isinstance(model, MlpModel) else VQC_LEARNER


def evaluate(
    learner: Learner, model: Model, features: np.ndarray, labels: np.ndarray
) -> Tuple[float, np.ndarray]:
    """Mean loss and the per-sample correctness (0/1) on one split."""
    probabilities = learner.probabilities(model, features)
    correct = (np.argmax(probabilities, axis=-1) == labels).astype(int)
    return float(np.mean(learner.losses(model, features, labels))), correct


def fit(
    model: Model, splits: Any, config: TrainingConfig
) -> Tuple[Model, TrainRecord]:
    """Train with mini-batch SGD, recording loss and accuracy after every epoch.

    Deterministic given config.seed: the train split is reshuffled every epoch from the
    shuffle stream of that seed. The last batch of an epoch may be smaller.

    Returns: The trained model and its TrainRecord.
    """
    validate_training_config(config)
    for name in ("train", "valid", "test"):
        if len(getattr(splits, f"{name}_y")) == 0:
            raise ConfigurationError(f"The {name} split is empty")
    learner = learner_for(model)
    rng = stream(config.seed, SHUFFLE_STREAM)
    history: Dict[str, List[float]] = {
        key: [] for key in ("train_loss", "train_acc", "valid_loss", "valid_acc")
    }
    largest = learner.magnitude(model)
    for epoch in range(config.n_epochs):
        order = rng.permutation(len(splits.train_y))
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            grads = learner.gradients(
                model, splits.train_x[batch], splits.train_y[batch]
            )
            model = sgd_step(model, grads, config.learning_rate)
            largest = max(largest, learner.magnitude(model))
        for split in ("train", "valid"):
            features = getattr(splits, f"{split}_x")
            labels = getattr(splits, f"{split}_y")
            loss, correct = evaluate(learner, model, features, labels)
            history[f"{split}_loss"].append(loss)
            history[f"{split}_acc"].append(float(np.mean(correct)))
        logging.debug(
            "epoch %d: train loss %.4f, valid acc %.3f",
            epoch + 1,
            history["train_loss"][-1],
            history["valid_acc"][-1],
        )
    _, test_correct = evaluate(learner, model, splits.test_x, splits.test_y)
    record = TrainRecord(
        dataset=splits.name,
        approach=config.approach,
        seed=config.seed,
        embedding=splits.embedding,
        reupload=bool(getattr(model, "reupload", False)),
        model="mlp" if isinstance(model, MlpModel) else "vqc",
        test_acc=float(np.mean(test_correct)),
        test_correct=test_correct.tolist(),
        max_abs_weight=largest,
        **history,
    )
    return model, record


def train(model: Model, splits: Any, config: TrainingConfig) -> TrainRecord:
    return fit(model, splits, config)[1]
