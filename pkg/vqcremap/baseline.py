"""The classical baseline: one hidden layer with ELU, one sigmoid output.

With 4 inputs and 6 hidden nodes it has 37 parameters, about as many as the 2-qubit,
6-layer classifier it's compared against.
"""
from typing import Any, Dict, NamedTuple

import numpy as np
from scipy.special import expit  # type: ignore

from .exceptions import ConfigurationError
from .model import check_checkpoint


class MlpModel(NamedTuple):
    w1: np.ndarray  # (n_hidden, n_inputs)
    b1: np.ndarray  # (n_hidden,)
    w2: np.ndarray  # (1, n_hidden)
    b2: np.ndarray  # (1,)


def init_mlp(
    rng: np.random.Generator, n_inputs: int = 4, n_hidden: int = 6
) -> MlpModel:
    """Uniform on ±1/sqrt(fan_in), per layer."""
    bound1, bound2 = 1 / np.sqrt(n_inputs), 1 / np.sqrt(n_hidden)
    return MlpModel(
        w1=rng.uniform(-bound1, bound1, size=(n_hidden, n_inputs)),
        b1=rng.uniform(-bound1, bound1, size=n_hidden),
        w2=rng.uniform(-bound2, bound2, size=(1, n_hidden)),
        b2=rng.uniform(-bound2, bound2, size=1),
    )


def mlp_parameter_count(model: MlpModel) -> int:
    return sum(p.size for p in model)


def elu(z: np.ndarray) -> np.ndarray:
    return np.where(z > 0, z, np.expm1(np.minimum(z, 0)))


def elu_derivative(z: np.ndarray) -> np.ndarray:
    return np.where(z > 0, 1.0, np.exp(np.minimum(z, 0)))


def _hidden(model: MlpModel, features: np.ndarray) -> np.ndarray:
    return features @ model.w1.T + model.b1


def mlp_logit(model: MlpModel, features: np.ndarray) -> np.ndarray:
    """Pre-sigmoid output, for a single sample or a (N, n_inputs) batch."""
    features = np.asarray(features, dtype=float)
    return (elu(_hidden(model, features)) @ model.w2.T + model.b2)[..., 0]


def mlp_forward(model: MlpModel, features: np.ndarray) -> float:
    """Probability of class 1 for one sample."""
    return float(expit(mlp_logit(model, features)))


def mlp_predict_proba(model: MlpModel, features: np.ndarray) -> np.ndarray:
    """(N, n_inputs) -> (N, 2), columns [1 - p, p]."""
    p = expit(mlp_logit(model, np.atleast_2d(features)))
    return np.stack((1 - p, p), axis=-1)


def mlp_loss(model: MlpModel, features: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Binary cross-entropy per sample, computed from the logit so it stays finite."""
    z = mlp_logit(model, features)
    return np.logaddexp(0, z) - np.asarray(labels, dtype=float) * z


def mlp_backward(model: MlpModel, features: np.ndarray, label: int) -> MlpModel:
    """Gradient of the binary cross-entropy of one sample, shaped like the model."""
    x = np.asarray(features, dtype=float)
    z1 = _hidden(model, x)
    h = elu(z1)
    delta = float(expit(h @ model.w2[0] + model.b2[0])) - label
    dz1 = delta * model.w2[0] * elu_derivative(z1)
    return MlpModel(
        w1=np.outer(dz1, x),
        b1=dz1,
        w2=delta * h[None, :],
        b2=np.array([delta]),
    )


# Checkpoints


def mlp_to_checkpoint(model: MlpModel) -> Dict[str, Any]:
    n_hidden, n_inputs = model.w1.shape
    return {
        "kind": "mlp",
        "n_inputs": n_inputs,
        "n_hidden": n_hidden,
        **{name: value.ravel().tolist() for name, value in model._asdict().items()},
    }


def mlp_from_checkpoint(record: Dict[str, Any]) -> MlpModel:
    check_checkpoint(record)
    if record["kind"] != "mlp":
        raise ConfigurationError(f"Not an mlp checkpoint: {record['kind']!r}")
    n_hidden, n_inputs = record["n_hidden"], record["n_inputs"]
    shapes = {
        "w1": (n_hidden, n_inputs),
        "b1": (n_hidden,),
        "w2": (1, n_hidden),
        "b2": (1,),
    }
    try:
        return MlpModel(
            **{
                name: np.asarray(record[name], dtype=float).reshape(shape)
                for name, shape in shapes.items()
            }
        )
    except ValueError:
        raise ConfigurationError(
            "Checkpoint weights don't match its dimensions"
        ) from None
