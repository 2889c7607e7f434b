"""Weight re-mapping functions.

A re-mapping function φ squeezes a trainable rotation weight into the rotational domain
[-π, π] before it reaches the circuit. Only the forward pass sees φ(θ); gradient descent
keeps updating the raw θ, so every function carries its exact derivative for the chain
rule.

The functions are held in a dict, a mapping of canonical names to RemapFunctions. The
@remap_function decorator adds a function to it:

    @remap_function("tanh", derivative=lambda theta: np.pi / np.cosh(theta) ** 2)
    def tanh(theta):
        return np.pi * np.tanh(theta)

"none" is the identity - the baseline circuit without re-mapping.
"""
from typing import Callable, Dict, NamedTuple, Union

import numpy as np
from scipy.special import expit  # type: ignore

from .exceptions import ConfigurationError, NumericError

Real = Union[float, np.ndarray]
Mapping = Callable[[np.ndarray], np.ndarray]


class RemapFunction(NamedTuple):
    name: str
    forward: Mapping
    derivative: Mapping

    def __repr__(self) -> str:
        return f"RemapFunction({self.name!r})"


global_remaps: Dict[str, RemapFunction] = dict()


def remap_function(name: str, derivative: Mapping) -> Callable[[Mapping], Mapping]:
    """A decorator to add a function, with its derivative, to global_remaps."""

    def decorator(func: Mapping) -> Mapping:
        global_remaps[name] = RemapFunction(name, func, derivative)
        return func

    return decorator


@remap_function("none", derivative=np.ones_like)
def identity(theta: np.ndarray) -> np.ndarray:
    return theta


# The derivative at exactly ±π is 1, so a weight sitting on the boundary still moves.
@remap_function(
    "clamp", derivative=lambda theta: np.where(np.abs(theta) <= np.pi, 1.0, 0.0)
)
def clamp(theta: np.ndarray) -> np.ndarray:
    return np.clip(theta, -np.pi, np.pi)


@remap_function("tanh", derivative=lambda theta: np.pi * (1 - np.tanh(theta) ** 2))
def tanh(theta: np.ndarray) -> np.ndarray:
    return np.pi * np.tanh(theta)


@remap_function("arctan", derivative=lambda theta: 4 / (1 + 4 * theta**2))
def arctan(theta: np.ndarray) -> np.ndarray:
    return 2 * np.arctan(2 * theta)


@remap_function(
    "sigmoid",
    derivative=lambda theta: 2 * np.pi * expit(theta) * (1 - expit(theta)),
)
def sigmoid(theta: np.ndarray) -> np.ndarray:
    return 2 * np.pi * expit(theta) - np.pi


# alpha = π so the lower branch tends to -π. The upper branch is left unbounded.
@remap_function(
    "elu",
    derivative=lambda theta: np.where(
        theta < 0, np.pi * np.exp(np.minimum(theta, 0)), 1.0
    ),
)
def elu(theta: np.ndarray) -> np.ndarray:
    return np.where(theta < 0, np.pi * np.expm1(np.minimum(theta, 0)), theta)


# Period 4π, amplitude π. Not monotonic over the reals.
@remap_function("sin", derivative=lambda theta: np.pi / 2 * np.cos(theta / 2))
def sin(theta: np.ndarray) -> np.ndarray:
    return np.pi * np.sin(theta / 2)


# Canonical order, as the approaches appear in reports.
REMAP_NAMES = ("none", "clamp", "tanh", "arctan", "sigmoid", "elu", "sin")


def get_remap(name: str) -> RemapFunction:
    try:
        return global_remaps[name]
    except KeyError:
        raise ConfigurationError(
            f"Unknown remap {name!r}, expected one of {', '.join(REMAP_NAMES)}"
        ) from None


def _resolve(f: Union[str, RemapFunction]) -> RemapFunction:
    return get_remap(f) if isinstance(f, str) else f


def _finite(theta: Real) -> np.ndarray:
    values = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(values)):
        raise NumericError(f"Weights must be finite, got {theta!r}")
    return values


def _unwrap(theta: Real, result: np.ndarray) -> Real:
    return float(result) if np.ndim(theta) == 0 else result


def remap(f: Union[str, RemapFunction], theta: Real) -> Real:
    """φ(θ), elementwise for arrays."""
    return _unwrap(theta, _resolve(f).forward(_finite(theta)))


def remap_derivative(f: Union[str, RemapFunction], theta: Real) -> Real:
    """φ'(θ), elementwise for arrays."""
    return _unwrap(theta, _resolve(f).derivative(_finite(theta)))
