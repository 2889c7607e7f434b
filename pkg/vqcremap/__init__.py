"""Use __all__ so mypy considers these re-exported."""
__all__ = [
    "Error",
    "Result",
    "RunConfig",
    "Success",
    "TrainRecord",
    "VqcError",
    "compare",
    "fit",
    "get_remap",
    "init_mlp",
    "init_vqc",
    "load_dataset",
    "plot",
    "predict",
    "predict_proba",
    "prepare_splits",
    "remap_function",
    "report",
    "run",
    "sweep",
    "train",
]


from .baseline import init_mlp
from .config import RunConfig
from .data import load_dataset, prepare_splits
from .exceptions import VqcError
from .model import init_vqc, predict, predict_proba
from .plot import plot
from .remap import get_remap, remap_function
from .report import report
from .result import Error, Result, Success
from .runner import run
from .sweep import compare, sweep
from .training import TrainRecord, fit, train
