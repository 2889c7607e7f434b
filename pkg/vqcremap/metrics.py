"""Metrics and statistics over finished runs.

Point of convergence (POC): the first epoch t >= 1 where the one-epoch change in
validation loss, |loss[t] - loss[t-1]|, falls below k·σ. σ is the population standard
deviation of the whole validation-loss curve. Epochs are array indices, so epoch 0 is
the first recorded epoch and can never be a POC. A curve that never settles converges
at its last epoch.
"""
from collections import defaultdict
from typing import Dict, Iterable, List, NamedTuple, Sequence, Tuple
import math

import numpy as np
from scipy.special import betainc  # type: ignore

from .exceptions import ConfigurationError
from .training import TrainRecord

Z_95 = 1.96
BASELINE = "baseline"
OWN = "own"
ANCHORS = (BASELINE, OWN)


class PocResult(NamedTuple):
    epoch: int
    threshold: float
    sigma: float
    k: float


class AnovaResult(NamedTuple):
    f_stat: float
    df_between: int
    df_within: int
    p_value: float


def accuracy(true_labels: Sequence[int], predicted_labels: Sequence[int]) -> float:
    truth, predicted = np.asarray(true_labels), np.asarray(predicted_labels)
    if truth.size == 0:
        raise ConfigurationError("Accuracy of an empty label vector")
    if truth.shape != predicted.shape:
        raise ConfigurationError(
            f"Label vectors differ in length: {truth.size} and {predicted.size}"
        )
    return float(np.mean(truth == predicted))


def point_of_convergence(valid_losses: Sequence[float], k: float = 1.0) -> PocResult:
    losses = np.asarray(valid_losses, dtype=float)
    if losses.size < 2:
        raise ConfigurationError(
            f"A point of convergence needs at least 2 epochs, got {losses.size}"
        )
    sigma = float(np.std(losses))
    threshold = k * sigma
    below = np.flatnonzero(np.abs(np.diff(losses)) < threshold)
    epoch = int(below[0]) + 1 if below.size else losses.size - 1
    return PocResult(epoch, threshold, sigma, k)


def _check_pair(baseline: TrainRecord, approach: TrainRecord) -> None:
    for field in ("dataset", "seed", "embedding"):
        if getattr(baseline, field) != getattr(approach, field):
            raise ConfigurationError(
                f"Can't compare runs with different {field}: "
                f"{getattr(baseline, field)!r} and {getattr(approach, field)!r}"
            )
    if len(baseline.valid_acc) != len(approach.valid_acc):
        raise ConfigurationError(
            f"Can't compare runs of {len(baseline.valid_acc)} and "
            f"{len(approach.valid_acc)} epochs"
        )


def convergence_diff(
    baseline: TrainRecord, approach: TrainRecord, k: float = 1.0, anchor: str = BASELINE
) -> float:
    """Validation accuracy of the baseline minus that of the approach, at the
    baseline's POC (anchor "baseline") or each run at its own POC (anchor "own").
    Negative means the approach is ahead.
    """
    _check_pair(baseline, approach)
    if anchor not in ANCHORS:
        raise ConfigurationError(
            f"Unknown anchor {anchor!r}, expected one of {', '.join(ANCHORS)}"
        )
    t_baseline = point_of_convergence(baseline.valid_loss, k).epoch
    t_approach = (
        t_baseline
        if anchor == BASELINE
        else point_of_convergence(approach.valid_loss, k).epoch
    )
    return float(baseline.valid_acc[t_baseline] - approach.valid_acc[t_approach])


def f_survival(f: float, df_between: int, df_within: int) -> float:
    """P(F > f) for an F(df_between, df_within) variable."""
    if math.isinf(f):
        return 0.0
    if f <= 0:
        return 1.0
    d1, d2 = df_between, df_within
    return float(betainc(d2 / 2, d1 / 2, d2 / (d2 + d1 * f)))


def anova_oneway(groups: Sequence[Sequence[float]]) -> AnovaResult:
    samples = [np.asarray(group, dtype=float) for group in groups]
    if len(samples) < 2:
        raise ConfigurationError(f"ANOVA needs at least 2 groups, got {len(samples)}")
    if any(sample.size < 2 for sample in samples):
        raise ConfigurationError("Every ANOVA group needs at least 2 observations")
    pooled = np.concatenate(samples)
    grand_mean = pooled.mean()
    ss_between = sum(s.size * (s.mean() - grand_mean) ** 2 for s in samples)
    ss_within = sum(np.sum((s - s.mean()) ** 2) for s in samples)
    df_between, df_within = len(samples) - 1, pooled.size - len(samples)
    # Relative tolerance, so rounding noise in the sums of squares reads as zero.
    scale = max(np.sum((pooled - grand_mean) ** 2), np.finfo(float).tiny)
    if ss_within <= 1e-12 * scale:
        if ss_between <= 1e-12 * scale:
            return AnovaResult(0.0, df_between, df_within, 1.0)
        return AnovaResult(math.inf, df_between, df_within, 0.0)
    f_stat = float((ss_between / df_between) / (ss_within / df_within))
    return AnovaResult(
        f_stat, df_between, df_within, f_survival(f_stat, df_between, df_within)
    )


def confidence_interval_95(per_sample_correct: Sequence[int]) -> Tuple[float, float]:
    """Wald interval of the pooled accuracy: (p̂, 1.96·sqrt(p̂(1-p̂)/N))."""
    correct = np.asarray(per_sample_correct, dtype=float)
    if correct.size < 2:
        raise ConfigurationError(
            f"A confidence interval needs at least 2 samples, got {correct.size}"
        )
    mean = float(correct.mean())
    return mean, Z_95 * math.sqrt(mean * (1 - mean) / correct.size)


def anova_across_datasets(records: Iterable[TrainRecord]) -> AnovaResult:
    """One-way ANOVA over approaches, where an observation is one seed's test accuracy
    averaged over every dataset.
    """
    by_cell: Dict[Tuple[str, int], List[float]] = defaultdict(list)
    for record in records:
        by_cell[(record.approach, record.seed)].append(record.test_acc)
    groups: Dict[str, List[float]] = defaultdict(list)
    for (approach, _), values in sorted(by_cell.items()):
        groups[approach].append(float(np.mean(values)))
    return anova_oneway(list(groups.values()))
