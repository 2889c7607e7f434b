"""Report tables, rebuilt from the run files of a results directory.

Every table is long-format CSV with columns (dataset, approach, metric, value,
ci_halfwidth). Runs are grouped by setting, the embedding name with "-reupload"
appended for re-uploading circuits, and each setting gets:

- convergence-<setting>.csv - convergence difference of every approach against the
  un-remapped baseline, and the mean point of convergence.
- accuracy-<setting>.csv - pooled test accuracy with its 95% interval.
- anova-<setting>.csv - one-way ANOVA of test accuracy across approaches, per dataset
  and over all datasets.

The "average" dataset row is the mean over datasets. When the directory holds mlp runs,
compare.csv sets them against the circuits trained on the same task.
"""
from collections import defaultdict
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple
import logging
import math

import numpy as np
import pandas as pd  # type: ignore

from .config import MLP, MLP_DATASET
from .exceptions import ConfigurationError
from .metrics import (
    BASELINE,
    anova_across_datasets,
    anova_oneway,
    confidence_interval_95,
    convergence_diff,
    point_of_convergence,
)
from .remap import REMAP_NAMES
from .runner import SUMMARY_COLUMNS, read_records, summary_path, summary_row
from .training import TrainRecord

TABLE_COLUMNS = ("dataset", "approach", "metric", "value", "ci_halfwidth")
AVERAGE = "average"
ALL_DATASETS = "all"
BASELINE_APPROACH = "none"

Row = Tuple[str, str, str, float, float]


def setting(record: TrainRecord) -> str:
    return f"{record.embedding}-reupload" if record.reupload else record.embedding


def label(record: TrainRecord) -> str:
    """Approach name within the classical comparison, e.g. "vqc-tanh-reupload"."""
    if record.model == MLP:
        return MLP
    return f"vqc-{record.approach}" + ("-reupload" if record.reupload else "")


def approach_order(approaches: Iterable[str]) -> List[str]:
    ranks = {name: index for index, name in enumerate(REMAP_NAMES)}
    return sorted(set(approaches), key=lambda name: (ranks.get(name, len(ranks)), name))


def by_setting(records: Iterable[TrainRecord]) -> Dict[str, List[TrainRecord]]:
    """Circuit runs grouped by setting."""
    groups: Dict[str, List[TrainRecord]] = defaultdict(list)
    for record in records:
        if record.model != MLP:
            groups[setting(record)].append(record)
    return dict(sorted(groups.items()))


def _frame(rows: Sequence[Row]) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=TABLE_COLUMNS)


def _datasets(records: Iterable[TrainRecord]) -> List[str]:
    return sorted({record.dataset for record in records})


def _average_rows(rows: Sequence[Row], metric: str) -> List[Row]:
    values: Dict[str, List[float]] = defaultdict(list)
    for _, approach, row_metric, value, _ in rows:
        if row_metric == metric:
            values[approach].append(value)
    return [
        (AVERAGE, approach, metric, float(np.mean(values[approach])), math.nan)
        for approach in approach_order(values)
    ]


def convergence_table(
    records: Sequence[TrainRecord], k: float = 1.0, anchor: str = BASELINE
) -> pd.DataFrame:
    """Mean convergence difference (baseline minus approach, negative means the
    approach is ahead) and mean point of convergence, per dataset and approach.
    """
    rows: List[Row] = []
    for dataset in _datasets(records):
        runs = [record for record in records if record.dataset == dataset]
        baselines = {
            record.seed: record
            for record in runs
            if record.approach == BASELINE_APPROACH
        }
        if not baselines:
            logging.warning("%s: no baseline runs, convergence skipped", dataset)
            continue
        for approach in approach_order(record.approach for record in runs):
            mine = [record for record in runs if record.approach == approach]
            diffs = [
                convergence_diff(baselines[record.seed], record, k, anchor)
                for record in mine
                if record.seed in baselines
            ]
            if diffs:
                mean = float(np.mean(diffs))
                rows.append((dataset, approach, "convergence_diff", mean, math.nan))
            pocs = [point_of_convergence(record.valid_loss, k).epoch for record in mine]
            mean_poc = float(np.mean(pocs))
            rows.append((dataset, approach, "poc_epoch", mean_poc, math.nan))
    rows += _average_rows(rows, "convergence_diff") + _average_rows(rows, "poc_epoch")
    return _frame(rows)


def _accuracy_row(dataset: str, approach: str, runs: Sequence[TrainRecord]) -> Row:
    pooled = [value for record in runs for value in record.test_correct]
    if len(pooled) < 2:
        return (dataset, approach, "test_acc", float(np.mean(pooled)), math.nan)
    mean, halfwidth = confidence_interval_95(pooled)
    return (dataset, approach, "test_acc", mean, halfwidth)


def accuracy_table(records: Sequence[TrainRecord]) -> pd.DataFrame:
    """Test accuracy pooled over seeds, with a 95% interval. The average row pools
    every dataset.
    """
    grouped: Dict[Tuple[str, str], List[TrainRecord]] = defaultdict(list)
    for record in records:
        grouped[(record.dataset, record.approach)].append(record)
    rows = [
        _accuracy_row(dataset, approach, grouped[(dataset, approach)])
        for dataset in _datasets(records)
        for approach in approach_order(a for d, a in grouped if d == dataset)
    ]
    if len(_datasets(records)) > 1:
        for approach in approach_order(a for _, a in grouped):
            runs = [
                r for (_, a), group in grouped.items() if a == approach for r in group
            ]
            rows.append(_accuracy_row(AVERAGE, approach, runs))
    return _frame(rows)


def _anova_rows(dataset: str, groups: Mapping[str, List[float]]) -> List[Row]:
    try:
        result = anova_oneway(list(groups.values()))
    except ConfigurationError as exc:
        logging.warning("%s: ANOVA skipped, %s", dataset, exc.message)
        return []
    return [
        (dataset, ALL_DATASETS, metric, float(value), math.nan)
        for metric, value in result._asdict().items()
    ]


def anova_table(records: Sequence[TrainRecord]) -> pd.DataFrame:
    """One-way ANOVA of per-seed test accuracy across approaches. The "all" row uses
    each seed's accuracy averaged over every dataset.
    """
    rows: List[Row] = []
    for dataset in _datasets(records):
        groups: Dict[str, List[float]] = defaultdict(list)
        for record in sorted(records, key=lambda r: r.seed):
            if record.dataset == dataset:
                groups[record.approach].append(record.test_acc)
        rows += _anova_rows(dataset, groups)
    if len(_datasets(records)) > 1:
        try:
            result = anova_across_datasets(records)
            rows += [
                (ALL_DATASETS, ALL_DATASETS, metric, float(value), math.nan)
                for metric, value in result._asdict().items()
            ]
        except ConfigurationError as exc:
            logging.warning("ANOVA over all datasets skipped, %s", exc.message)
    return _frame(rows)


def compare_table(records: Sequence[TrainRecord], k: float = 1.0) -> pd.DataFrame:
    """Test accuracy and mean point of convergence of the classical comparison."""
    runs = [
        record
        for record in records
        if record.dataset == MLP_DATASET and record.embedding == "amplitude"
    ]
    grouped: Dict[str, List[TrainRecord]] = defaultdict(list)
    for record in runs:
        grouped[label(record)].append(record)
    rows: List[Row] = []
    for name, group in sorted(grouped.items()):
        rows.append(_accuracy_row(MLP_DATASET, name, group))
        pocs = [point_of_convergence(record.valid_loss, k).epoch for record in group]
        rows.append((MLP_DATASET, name, "poc_epoch", float(np.mean(pocs)), math.nan))
    return _frame(rows)


def summary_table(records: Mapping[str, TrainRecord]) -> pd.DataFrame:
    return pd.DataFrame(
        [summary_row(identifier, record) for identifier, record in records.items()],
        columns=SUMMARY_COLUMNS,
    )


def _write(frame: pd.DataFrame, path: Path) -> Path:
    frame.to_csv(path, index=False)
    return path


def report(out: str, k: float = 1.0, anchor: str = BASELINE) -> List[Path]:
    """Rebuild summary.csv and every table from the run files. Returns the paths
    written.

    Raises:
        ConfigurationError: There are no finished runs in `out`.
    """
    records = read_records(out)
    if not records:
        raise ConfigurationError(f"No finished runs in {out}")
    written = [_write(summary_table(records), summary_path(out))]
    for name, group in by_setting(records.values()).items():
        written.append(
            _write(
                convergence_table(group, k, anchor),
                Path(out) / f"convergence-{name}.csv",
            )
        )
        written.append(
            _write(accuracy_table(group), Path(out) / f"accuracy-{name}.csv")
        )
        written.append(_write(anova_table(group), Path(out) / f"anova-{name}.csv"))
    if any(record.model == MLP for record in records.values()):
        written.append(
            _write(compare_table(list(records.values()), k), Path(out) / "compare.csv")
        )
    logging.info("Wrote %d report files to %s", len(written), out)
    return written


def top_approaches(
    records: Sequence[TrainRecord], n: Optional[int], k: float = 1.0
) -> List[str]:
    """The baseline plus the n approaches with the most negative mean convergence
    difference. All approaches when n is None.
    """
    approaches = approach_order(record.approach for record in records)
    if n is None:
        return approaches
    table = convergence_table(records, k)
    diffs = table[(table.metric == "convergence_diff") & (table.dataset != AVERAGE)]
    ranked = (
        diffs[diffs.approach != BASELINE_APPROACH]
        .groupby("approach")["value"]
        .mean()
        .sort_values(kind="stable")
    )
    chosen = set(ranked.index[:n]) | {BASELINE_APPROACH}
    # Without baseline runs there is nothing to rank by.
    return [approach for approach in approaches if approach in chosen] or approaches
