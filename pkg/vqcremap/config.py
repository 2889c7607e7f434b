"""Run configuration.

Values are layered: RunConfig defaults, then a JSON config file, then command-line
flags. A config file is a flat JSON object of RunConfig fields, plus the sweep options
"seeds" and "workers":

    {"dataset": "seeds", "embedding": "angle", "remap": "arctan", "epochs": 30}
"""
from typing import Any, Dict, NamedTuple, Optional, Tuple
import importlib.resources
import json

from jsonschema.exceptions import ValidationError  # type: ignore
from jsonschema.validators import validator_for  # type: ignore

from .data import get_schema
from .embedding import AMPLITUDE, EMBEDDINGS
from .exceptions import ConfigurationError
from .remap import REMAP_NAMES
from .training import TrainingConfig

VQC = "vqc"
MLP = "mlp"
MODELS = (VQC, MLP)
# The classical baseline is only compared on the two-class Iris task.
MLP_DATASET = "iris-2class"
DEFAULT_SEEDS = tuple(range(10))
SWEEP_OPTIONS = ("seeds", "workers")

# Prepare the config file validator. This is global so it loads only once.
schema = json.loads(importlib.resources.read_text(__package__, "config-schema.json"))
klass = validator_for(schema)
klass.check_schema(schema)
default_validator = klass(schema).validate


class RunConfig(NamedTuple):
    dataset: str = "iris"
    embedding: str = "angle"
    remap: str = "none"
    reupload: bool = False
    model: str = VQC
    layers: int = 6
    lr: float = 0.01
    batch_size: int = 5
    epochs: int = 30
    seed: int = 0
    data_dir: Optional[str] = None
    out: str = "results"


def load_config_file(path: str) -> Dict[str, Any]:
    try:
        with open(path) as f:
            values = json.load(f)
    except OSError as exc:
        raise ConfigurationError(f"Can't read config file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"Config file {path} is not JSON: {exc}") from None
    try:
        default_validator(values)
    except ValidationError as exc:
        raise ConfigurationError(f"Invalid config file {path}: {exc.message}") from None
    return values


def merge(*layers: Dict[str, Any]) -> Dict[str, Any]:
    """Later layers win. A None value means "not given" and doesn't override."""
    merged: Dict[str, Any] = {}
    for layer in layers:
        merged.update({key: value for key, value in layer.items() if value is not None})
    return merged


def make_config(values: Dict[str, Any]) -> RunConfig:
    """A validated RunConfig from merged values. Sweep options are ignored."""
    unknown = set(values) - set(RunConfig._fields) - set(SWEEP_OPTIONS)
    if unknown:
        raise ConfigurationError(f"Unknown config keys: {', '.join(sorted(unknown))}")
    return validate_config(
        RunConfig(**{k: v for k, v in values.items() if k in RunConfig._fields})
    )


def validate_config(config: RunConfig) -> RunConfig:
    """Checks a config, giving it back normalized: the mlp always sees amplitude-style
    [0, 1] features and has no circuit to re-map or re-upload to.
    """
    get_schema(config.dataset)
    for name, value, allowed in (
        ("embedding", config.embedding, EMBEDDINGS),
        ("remap", config.remap, REMAP_NAMES),
        ("model", config.model, MODELS),
    ):
        if value not in allowed:
            raise ConfigurationError(
                f"Unknown {name} {value!r}, expected one of {', '.join(allowed)}"
            )
    if config.model == MLP and config.dataset != MLP_DATASET:
        raise ConfigurationError(
            f"The mlp model is only available for {MLP_DATASET}, not {config.dataset}"
        )
    if config.model == MLP:
        config = config._replace(embedding=AMPLITUDE, remap="none", reupload=False)
    if config.layers < 1:
        raise ConfigurationError(f"At least one layer is needed, got {config.layers}")
    if not config.lr > 0:
        raise ConfigurationError(f"Learning rate must be > 0, got {config.lr}")
    if config.batch_size < 1:
        raise ConfigurationError(f"Batch size must be >= 1, got {config.batch_size}")
    # The point of convergence needs two epochs to compare.
    if config.epochs < 2:
        raise ConfigurationError(f"At least 2 epochs are needed, got {config.epochs}")
    if config.seed < 0:
        raise ConfigurationError(f"Seeds are non-negative, got {config.seed}")
    return config


def approach_name(config: RunConfig) -> str:
    return MLP if config.model == MLP else config.remap


def training_config(config: RunConfig) -> TrainingConfig:
    return TrainingConfig(
        learning_rate=config.lr,
        batch_size=config.batch_size,
        n_epochs=config.epochs,
        seed=config.seed,
        approach=approach_name(config),
    )


def run_key(config: RunConfig) -> Tuple[str, str, str, bool, str, int]:
    return (
        config.dataset,
        config.embedding,
        config.remap,
        config.reupload,
        config.model,
        config.seed,
    )


def run_id(config: RunConfig) -> str:
    """File name stem of a run, e.g. "iris__angle__tanh__plain__vqc__seed3"."""
    return "__".join(
        (
            config.dataset,
            config.embedding,
            config.remap,
            "reupload" if config.reupload else "plain",
            config.model,
            f"seed{config.seed}",
        )
    )
