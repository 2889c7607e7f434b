"""Sweeps: running a grid of cells, then rebuilding the reports.

Cells are independent (own seeds, own model, own files), so they run in a process pool.
A cell whose run file already exists is skipped, which makes an interrupted sweep
resumable. Reports are rebuilt from the run files afterwards, so they don't depend on
the number of workers or the order cells finished in.
"""
from concurrent.futures import ProcessPoolExecutor, as_completed
from itertools import product
from pathlib import Path
from typing import List, NamedTuple, Optional, Sequence, Set, Tuple
import logging

from oslash.either import Left  # type: ignore
import pandas as pd  # type: ignore

from .config import MLP, MLP_DATASET, RunConfig, run_id, validate_config
from .embedding import AMPLITUDE
from .report import report
from .result import ErrorResult
from .runner import is_complete, run

FAILURE_COLUMNS = ("run_id", "stage", "code", "message")
# VQC, VQC-tanh, VQC-tanh with re-uploading, and the MLP, as (remap, reupload, model).
COMPARE_CELLS = (
    ("none", False, "vqc"),
    ("tanh", False, "vqc"),
    ("tanh", True, "vqc"),
    ("none", False, MLP),
)


class SweepResult(NamedTuple):
    completed: List[str]
    skipped: List[str]
    failed: List[Tuple[str, ErrorResult]]


def grid(
    template: RunConfig,
    datasets: Sequence[str],
    approaches: Sequence[str],
    seeds: Sequence[int],
) -> List[RunConfig]:
    return [
        template._replace(dataset=dataset, remap=approach, seed=seed)
        for dataset, approach, seed in product(datasets, approaches, seeds)
    ]


def run_cell(config: RunConfig) -> Tuple[str, Optional[ErrorResult]]:
    """Runs in a worker process, so it gives plain picklable values."""
    result = run(config, append_summary=False)
    return run_id(config), result._error if isinstance(result, Left) else None


def write_failures(out: str, failed: Sequence[Tuple[str, ErrorResult]]) -> None:
    path = Path(out) / "failures.csv"
    if not failed:
        if path.exists():
            path.unlink()
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(
        [
            (identifier, error.stage, error.code, error.message)
            for identifier, error in sorted(failed, key=lambda failure: failure[0])
        ],
        columns=FAILURE_COLUMNS,
    )
    frame.to_csv(path, index=False)


def run_grid(configs: Sequence[RunConfig], workers: int = 1) -> SweepResult:
    result = SweepResult([], [], [])
    pending = []
    seen: Set[str] = set()
    for config in configs:
        # mlp cells ignore the re-mapping and re-uploading axes.
        if run_id(config) in seen:
            logging.debug("%s: duplicate cell, skipped", run_id(config))
            continue
        seen.add(run_id(config))
        if is_complete(config):
            logging.info("%s: already complete, skipped", run_id(config))
            result.skipped.append(run_id(config))
        else:
            pending.append(config)
    outcomes = []
    if workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(run_cell, config) for config in pending]
            for future in as_completed(futures):
                outcomes.append(future.result())
    else:
        outcomes = [run_cell(config) for config in pending]
    for identifier, error in sorted(outcomes, key=lambda outcome: outcome[0]):
        if error is None:
            result.completed.append(identifier)
        else:
            logging.warning("%s: failed at %s", identifier, error)
            result.failed.append((identifier, error))
    return result


def finish(out: str, result: SweepResult) -> SweepResult:
    write_failures(out, result.failed)
    if result.completed or result.skipped:
        report(out)
    return result


def sweep(
    template: RunConfig,
    datasets: Sequence[str],
    approaches: Sequence[str],
    seeds: Sequence[int],
    workers: int = 1,
) -> SweepResult:
    """Run datasets × approaches × seeds with the template's other settings, then write
    failures.csv and every report table to the template's output directory.
    """
    configs = [
        validate_config(config)
        for config in grid(template, datasets, approaches, seeds)
    ]
    return finish(template.out, run_grid(configs, workers))


def compare(
    template: RunConfig, seeds: Sequence[int], workers: int = 1
) -> SweepResult:
    """The classical comparison on two-class Iris with amplitude embedding."""
    configs = [
        validate_config(
            template._replace(
                dataset=MLP_DATASET,
                embedding=AMPLITUDE,
                remap=remap,
                reupload=reupload,
                model=model,
                seed=seed,
            )
        )
        for (remap, reupload, model), seed in product(COMPARE_CELLS, seeds)
    ]
    return finish(template.out, run_grid(configs, workers))
