"""Runs one experiment cell: data, model, training, output.

Each stage is called through `call`, which turns raised errors into ErrorResults naming
the stage, and the stages are chained with Either.bind so the first failure short
circuits the rest:

    config -> data -> model -> training -> output

Output of a run in the results directory:

- runs/<run_id>.jsonl - one JSON object per epoch.
- runs/<run_id>.json - the run record: its key fields, test accuracy and per-sample
  test correctness, the largest weight seen, and the trained model's checkpoint.
- summary.csv - one row per run.
"""
from functools import partial, reduce
from pathlib import Path
from typing import Any, Callable, Dict, List, NamedTuple, Optional
import json
import logging
import os

from oslash.either import Either, Left, Right  # type: ignore
import pandas as pd  # type: ignore

from .baseline import init_mlp, mlp_to_checkpoint
from .config import MLP, RunConfig, run_id, training_config, validate_config
from .data import RawTable, SplitData, load_dataset, prepare_splits
from .embedding import embedding_spec
from .exceptions import VqcError
from .metrics import point_of_convergence
from .model import init_vqc, to_checkpoint
from .remap import get_remap
from .result import (
    Error,
    ErrorResult,
    InternalErrorResult,
    Result,
    Success,
    SuccessResult,
)
from .sentinels import NOREMAP
from .training import Model, TrainRecord, fit
from .utils import INIT_STREAM, stream

EPOCH_FIELDS = ("epoch", "train_loss", "train_acc", "valid_loss", "valid_acc")
SUMMARY_COLUMNS = (
    "run_id",
    "dataset",
    "embedding",
    "remap",
    "reupload",
    "model",
    "approach",
    "seed",
    "epochs",
    "final_train_loss",
    "final_train_acc",
    "final_valid_loss",
    "final_valid_acc",
    "test_acc",
    "poc_epoch",
    "max_abs_weight",
)
MLP_HIDDEN = 6


class RunState(NamedTuple):
    config: RunConfig
    table: Optional[RawTable] = None
    splits: Optional[SplitData] = None
    model: Optional[Model] = None
    record: Optional[TrainRecord] = None


# Paths


def runs_dir(out: str) -> Path:
    return Path(out) / "runs"


def epochs_path(out: str, identifier: str) -> Path:
    return runs_dir(out) / f"{identifier}.jsonl"


def record_path(out: str, identifier: str) -> Path:
    return runs_dir(out) / f"{identifier}.json"


def summary_path(out: str) -> Path:
    return Path(out) / "summary.csv"


def is_complete(config: RunConfig) -> bool:
    """The run record is written last, so its presence marks a finished run."""
    return record_path(config.out, run_id(config)).exists()


# Stages


def check_config(state: RunState) -> RunState:
    return state._replace(config=validate_config(state.config))


def load_data(state: RunState) -> RunState:
    config = state.config
    table = load_dataset(config.dataset, config.data_dir)
    return state._replace(
        table=table, splits=prepare_splits(table, config.embedding, config.seed)
    )


def build_model(state: RunState) -> RunState:
    config, table = state.config, state.table
    assert table is not None
    rng = stream(config.seed, INIT_STREAM)
    if config.model == MLP:
        model: Model = init_mlp(rng, table.features.shape[1], MLP_HIDDEN)
    else:
        model = init_vqc(
            embedding_spec(config.embedding, table.features.shape[1]),
            table.n_classes,
            config.layers,
            NOREMAP if config.remap == "none" else get_remap(config.remap),
            config.reupload,
            rng,
        )
    logging.debug("%s: initialised %r", run_id(config), model)
    return state._replace(model=model)


def train_model(state: RunState) -> RunState:
    assert state.model is not None and state.splits is not None
    model, record = fit(state.model, state.splits, training_config(state.config))
    return state._replace(model=model, record=record)


def write_output(state: RunState, append_summary: bool = True) -> RunState:
    config, record = state.config, state.record
    assert record is not None and state.model is not None
    identifier = run_id(config)
    runs_dir(config.out).mkdir(parents=True, exist_ok=True)
    epochs_path(config.out, identifier).write_text(epoch_lines(record))
    checkpoint = (
        mlp_to_checkpoint(state.model)  # type: ignore
        if config.model == MLP
        else to_checkpoint(state.model)  # type: ignore
    )
    write_json(record_path(config.out, identifier), run_document(record, checkpoint))
    if append_summary:
        append_summary_row(config.out, summary_row(identifier, record))
    logging.info(
        "%s: test accuracy %.3f, final valid accuracy %.3f",
        identifier,
        record.test_acc,
        record.valid_acc[-1],
    )
    return state


# Persistence


def epoch_lines(record: TrainRecord) -> str:
    rows = zip(
        range(1, len(record.train_loss) + 1),
        record.train_loss,
        record.train_acc,
        record.valid_loss,
        record.valid_acc,
    )
    return "".join(json.dumps(dict(zip(EPOCH_FIELDS, row))) + "\n" for row in rows)


def run_document(record: TrainRecord, checkpoint: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "dataset": record.dataset,
        "approach": record.approach,
        "seed": record.seed,
        "embedding": record.embedding,
        "reupload": record.reupload,
        "model": record.model,
        "test_acc": record.test_acc,
        "test_correct": record.test_correct,
        "max_abs_weight": record.max_abs_weight,
        "checkpoint": checkpoint,
    }


def write_json(path: Path, document: Dict[str, Any]) -> None:
    partial_path = path.parent / f"{path.name}.partial"
    partial_path.write_text(json.dumps(document, indent=1) + "\n")
    os.replace(partial_path, path)


def read_epochs(path: Path) -> Dict[str, List[float]]:
    curves: Dict[str, List[float]] = {field: [] for field in EPOCH_FIELDS[1:]}
    with open(path) as f:
        for line in f:
            row = json.loads(line)
            for field in curves:
                curves[field].append(row[field])
    return curves


def read_record(path: Path) -> TrainRecord:
    """A TrainRecord rebuilt from a run file and its epoch file."""
    document = json.loads(path.read_text())
    return TrainRecord(
        dataset=document["dataset"],
        approach=document["approach"],
        seed=document["seed"],
        embedding=document["embedding"],
        reupload=document["reupload"],
        model=document["model"],
        test_acc=document["test_acc"],
        test_correct=document["test_correct"],
        max_abs_weight=document["max_abs_weight"],
        **read_epochs(path.with_suffix(".jsonl")),
    )


def read_records(out: str) -> Dict[str, TrainRecord]:
    """Every finished run of a results directory, by run id, in sorted order."""
    return {
        path.stem: read_record(path) for path in sorted(runs_dir(out).glob("*.json"))
    }


def summary_row(identifier: str, record: TrainRecord) -> Dict[str, Any]:
    return {
        "run_id": identifier,
        "dataset": record.dataset,
        "embedding": record.embedding,
        "remap": "none" if record.model == MLP else record.approach,
        "reupload": record.reupload,
        "model": record.model,
        "approach": record.approach,
        "seed": record.seed,
        "epochs": len(record.valid_loss),
        "final_train_loss": record.train_loss[-1],
        "final_train_acc": record.train_acc[-1],
        "final_valid_loss": record.valid_loss[-1],
        "final_valid_acc": record.valid_acc[-1],
        "test_acc": record.test_acc,
        "poc_epoch": point_of_convergence(record.valid_loss).epoch,
        "max_abs_weight": record.max_abs_weight,
    }


def append_summary_row(out: str, row: Dict[str, Any]) -> None:
    path = summary_path(out)
    frame = pd.DataFrame([row], columns=SUMMARY_COLUMNS)
    frame.to_csv(path, mode="a", header=not path.exists(), index=False)


# Pipeline


def call(stage: str, func: Callable[[RunState], RunState], state: RunState) -> Result:
    """Call one stage, giving Right(new state), or Left(ErrorResult) if it raised."""
    try:
        return Right(func(state))
    except VqcError as exc:
        return Error(stage, exc.code, exc.message, exc.data)
    # Any other exception is a bug, not a problem with the run.
    except Exception as exc:
        logging.exception(exc)
        return Left(InternalErrorResult(stage, str(exc)))


def run(
    config: RunConfig, append_summary: bool = True
) -> Either[ErrorResult, SuccessResult]:
    """Run one cell. Gives Right(SuccessResult(record)) or Left(ErrorResult)."""
    stages = (
        ("config", check_config),
        ("data", load_data),
        ("model", build_model),
        ("training", train_model),
        ("output", partial(write_output, append_summary=append_summary)),
    )
    result = reduce(
        lambda either, stage: either.bind(partial(call, *stage)),
        stages,
        Right(RunState(config)),
    )
    return result.bind(lambda state: Success(state.record))

