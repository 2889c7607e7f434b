import math

import numpy as np
import pytest

from vqcremap.exceptions import ConfigurationError
from vqcremap.metrics import (
    AnovaResult,
    PocResult,
    accuracy,
    anova_across_datasets,
    anova_oneway,
    confidence_interval_95,
    convergence_diff,
    f_survival,
    point_of_convergence,
)
from vqcremap.training import TrainRecord


def record(valid_loss, valid_acc, approach="none", seed=0, dataset="iris", test_acc=0.5):
    return TrainRecord(
        dataset=dataset,
        approach=approach,
        seed=seed,
        embedding="angle",
        reupload=False,
        model="vqc",
        train_loss=list(valid_loss),
        train_acc=list(valid_acc),
        valid_loss=list(valid_loss),
        valid_acc=list(valid_acc),
        test_acc=test_acc,
        test_correct=[1, 0],
        max_abs_weight=1.0,
    )


# accuracy


def test_accuracy():
    assert accuracy([0, 1, 1], [0, 1, 0]) == pytest.approx(2 / 3)


def test_accuracy_identical():
    assert accuracy([2, 0, 1], [2, 0, 1]) == 1.0


def test_accuracy_disjoint():
    assert accuracy([0, 0], [1, 1]) == 0.0


def test_accuracy_permutation_invariant():
    truth, predicted = np.array([0, 1, 2, 1, 0]), np.array([0, 2, 2, 1, 1])
    order = np.array([3, 0, 4, 1, 2])
    assert accuracy(truth, predicted) == accuracy(truth[order], predicted[order])


def test_accuracy_empty():
    with pytest.raises(ConfigurationError):
        accuracy([], [])


def test_accuracy_length_mismatch():
    with pytest.raises(ConfigurationError):
        accuracy([0, 1], [0])


# point_of_convergence


def test_point_of_convergence():
    result = point_of_convergence([1.0, 0.4, 0.39, 0.385], 1.0)
    assert result.epoch == 2
    assert result.sigma == pytest.approx(np.std([1.0, 0.4, 0.39, 0.385]))
    assert result.sigma == pytest.approx(0.2635, abs=1e-3)
    assert result.threshold == result.k * result.sigma


def test_point_of_convergence_constant_losses():
    assert point_of_convergence([0.5, 0.5, 0.5]) == PocResult(2, 0.0, 0.0, 1.0)


def test_point_of_convergence_geometric_decay():
    losses = 2.0 * 0.7 ** np.arange(30)
    sigma = math.sqrt(sum((x - sum(losses) / 30) ** 2 for x in losses) / 30)
    expected = next(
        t for t in range(1, 30) if abs(losses[t] - losses[t - 1]) < sigma
    )
    assert point_of_convergence(losses).epoch == expected


def test_point_of_convergence_invariant_to_shift():
    losses = np.array([1.2, 0.9, 0.5, 0.45, 0.44, 0.3])
    shifted = point_of_convergence(losses + 10)
    assert shifted.epoch == point_of_convergence(losses).epoch
    assert shifted.sigma == pytest.approx(point_of_convergence(losses).sigma)


def test_point_of_convergence_k():
    losses = [1.0, 0.5, 0.3, 0.2, 0.15]
    assert point_of_convergence(losses, 2.0).epoch <= point_of_convergence(losses).epoch


def test_point_of_convergence_too_short():
    with pytest.raises(ConfigurationError):
        point_of_convergence([0.3])


# convergence_diff


def test_convergence_diff_self_is_zero():
    baseline = record([1.0, 0.4, 0.39, 0.385], [0.3, 0.5, 0.6, 0.7])
    assert convergence_diff(baseline, baseline) == 0.0


def test_convergence_diff_approach_ahead_is_negative():
    baseline = record([1.0, 0.4, 0.39, 0.385], [0.3, 0.45, 0.5, 0.7])
    approach = record([0.8, 0.7, 0.2, 0.1], [0.3, 0.6, 0.735, 0.8], approach="arctan")
    assert convergence_diff(baseline, approach) == pytest.approx(-0.235)


def test_convergence_diff_own_anchor():
    baseline = record([1.0, 0.4, 0.39, 0.385], [0.3, 0.45, 0.5, 0.7])
    # POC of this curve: σ ≈ 0.44, |Δ| = 0.1 < σ at epoch 1.
    approach = record([1.0, 0.9, 0.1, 0.05], [0.2, 0.4, 0.6, 0.8], approach="tanh")
    assert convergence_diff(baseline, approach, anchor="own") == pytest.approx(
        0.5 - 0.4
    )


def test_convergence_diff_mismatched_runs():
    baseline = record([1.0, 0.5], [0.5, 0.6])
    with pytest.raises(ConfigurationError):
        convergence_diff(baseline, record([1.0, 0.5], [0.5, 0.6], seed=1))
    with pytest.raises(ConfigurationError):
        convergence_diff(baseline, record([1.0, 0.5, 0.4], [0.5, 0.6, 0.6]))


def test_convergence_diff_unknown_anchor():
    baseline = record([1.0, 0.5], [0.5, 0.6])
    with pytest.raises(ConfigurationError):
        convergence_diff(baseline, baseline, anchor="best")


# anova_oneway


def test_anova_identical_groups():
    assert anova_oneway([[1, 2, 3], [1, 2, 3]]) == AnovaResult(0.0, 1, 4, 1.0)


def test_anova_degrees_of_freedom():
    rng = np.random.default_rng(0)
    result = anova_oneway([rng.normal(size=10) for _ in range(7)])
    assert (result.df_between, result.df_within) == (6, 63)


def test_anova_hand_computed():
    # Means 2, 4, 6; grand mean 4. SS_between = 3·(4 + 0 + 4) = 24, SS_within = 6.
    result = anova_oneway([[1, 2, 3], [3, 4, 5], [5, 6, 7]])
    assert result.f_stat == pytest.approx((24 / 2) / (6 / 6))
    assert (result.df_between, result.df_within) == (2, 6)
    assert result.p_value == pytest.approx(1 / 125, rel=1e-6)


def test_anova_affine_invariant():
    groups = [[0.9, 0.8, 0.85], [0.7, 0.75, 0.72, 0.71], [0.95, 0.9, 0.88]]
    moved = [[3 * x - 2 for x in group] for group in groups]
    assert anova_oneway(moved).f_stat == pytest.approx(anova_oneway(groups).f_stat)


def test_anova_zero_within_variance():
    result = anova_oneway([[1.0, 1.0], [2.0, 2.0]])
    assert math.isinf(result.f_stat)
    assert result.p_value == 0.0


def test_anova_too_few_groups():
    with pytest.raises(ConfigurationError):
        anova_oneway([[1.0, 2.0]])


def test_anova_too_few_observations():
    with pytest.raises(ConfigurationError):
        anova_oneway([[1.0, 2.0], [3.0]])


# f_survival


def test_f_survival_table_value():
    assert 0.04 < f_survival(2.25, 6, 63) < 0.06


def test_f_survival_monotonic():
    values = [f_survival(f, 6, 63) for f in np.linspace(0.1, 10, 50)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_f_survival_limits():
    assert f_survival(0.0, 3, 10) == 1.0
    assert f_survival(math.inf, 3, 10) == 0.0


def test_f_survival_closed_form():
    # For df (2, d2) the tail is (1 + 2f/d2) ** (-d2/2).
    assert f_survival(3.0, 2, 10) == pytest.approx((1 + 2 * 3.0 / 10) ** -5)


# confidence_interval_95


def test_confidence_interval_all_correct():
    assert confidence_interval_95([1] * 100) == (1.0, 0.0)


def test_confidence_interval_half():
    mean, halfwidth = confidence_interval_95([0, 1] * 50)
    assert mean == 0.5
    assert halfwidth == pytest.approx(0.098)


def test_confidence_interval_ninety_percent():
    mean, halfwidth = confidence_interval_95([1] * 342 + [0] * 38)
    assert mean == pytest.approx(0.9)
    assert halfwidth == pytest.approx(0.030, abs=1e-3)


def test_confidence_interval_too_short():
    with pytest.raises(ConfigurationError):
        confidence_interval_95([1])


# anova_across_datasets


def test_anova_across_datasets_averages_datasets():
    records = [
        record([1, 0.5], [0.5, 0.6], approach=a, seed=s, dataset=d, test_acc=acc)
        for a, offset in (("none", 0.0), ("tanh", 0.2))
        for s in range(3)
        for d, acc in (("iris", 0.5 + offset + 0.01 * s), ("wine", 0.7 + offset))
    ]
    result = anova_across_datasets(records)
    assert (result.df_between, result.df_within) == (1, 4)
    expected = anova_oneway(
        [[0.6 + 0.005 * s for s in range(3)], [0.8 + 0.005 * s for s in range(3)]]
    )
    assert result.f_stat == pytest.approx(expected.f_stat)
