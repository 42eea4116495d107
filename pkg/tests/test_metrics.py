import math

import numpy as np
import pytest

from collectiveness import (MetricsReport, ParameterError, RunMetrics, UndefinedMetricError,
                            aggregate, pairs_comparing_accuracy, relevant_coefficient,
                            roc_auc, run_metrics, sorting_difference)

from oracles import auc_pairs_oracle


def test_correlation_identity_and_flip():
    t = [0.1, 0.4, 0.2, 0.9]
    assert relevant_coefficient(t, t) == pytest.approx(1.0, abs=1e-12)
    m = [1.0 - v for v in t]
    assert relevant_coefficient(m, t) == pytest.approx(-1.0, abs=1e-12)


def test_correlation_hand_value():
    # direct formula: centered dot 3, norms sqrt(14/3) and sqrt(2)
    r = relevant_coefficient([1.0, 2.0, 4.0], [1.0, 2.0, 3.0])
    assert r == pytest.approx(3.0 / math.sqrt(14.0 / 3.0 * 2.0), abs=1e-12)
    assert r == pytest.approx(0.9820, abs=1e-4)


def test_correlation_undefined_for_constant_series():
    with pytest.raises(UndefinedMetricError):
        relevant_coefficient([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(UndefinedMetricError):
        relevant_coefficient([1.0, 2.0, 3.0], [5.0, 5.0, 5.0])
    with pytest.raises(ParameterError):
        relevant_coefficient([1.0], [1.0])


def test_correlation_affine_invariance():
    rng = np.random.default_rng(20)
    m = rng.random(30)
    t = rng.random(30)
    base = relevant_coefficient(m, t)
    assert relevant_coefficient(3.5 * m + 2.0, t) == pytest.approx(base, abs=1e-12)
    assert relevant_coefficient(m, 0.25 * t - 7.0) == pytest.approx(base, abs=1e-12)


def test_pair_accuracy_examples():
    assert pairs_comparing_accuracy([1, 2, 3], [0.1, 0.2, 0.3]) == 1.0
    assert pairs_comparing_accuracy([3, 2, 1], [0.1, 0.2, 0.3]) == 0.0
    assert pairs_comparing_accuracy([1, 3, 2], [1, 2, 3]) == pytest.approx(2.0 / 3.0)


def test_pair_accuracy_tie_rules():
    # tied truth pairs drop out; tied measured against untied truth is wrong
    assert pairs_comparing_accuracy([1, 2, 3], [5, 5, 6]) == 1.0
    assert pairs_comparing_accuracy([1, 1, 2], [1, 2, 3]) == pytest.approx(2.0 / 3.0)
    with pytest.raises(UndefinedMetricError):
        pairs_comparing_accuracy([1, 2, 3], [4, 4, 4])


def test_pair_accuracy_monotone_transform_invariance():
    rng = np.random.default_rng(21)
    m = rng.random(25)
    t = rng.random(25)
    base = pairs_comparing_accuracy(m, t)
    assert pairs_comparing_accuracy(np.exp(4 * m), t) == base


def test_sorting_difference_examples():
    assert sorting_difference([1, 2, 3], [4, 5, 6]) == 0.0
    assert sorting_difference([4, 3, 2, 1], [1, 2, 3, 4]) == 2.0
    assert sorting_difference([0.5, 0.1, 0.9], [0.1, 0.5, 0.9]) == pytest.approx(2.0 / 3.0)


def test_sorting_difference_tie_break_is_stable():
    # equal values rank by frame order on both sides, so displacement is zero
    assert sorting_difference([1, 1, 1], [2, 2, 2]) == 0.0


def test_sorting_difference_monotone_transform_invariance():
    rng = np.random.default_rng(22)
    m = rng.random(20)
    t = rng.random(20)
    base = sorting_difference(m, t)
    assert sorting_difference(np.exp(m), t) == base
    assert sorting_difference(m, 10 * t + 3) == base


def test_auc_examples():
    assert roc_auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0
    assert roc_auc([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0]) == 0.5
    with pytest.raises(UndefinedMetricError):
        roc_auc([0.5, 0.6], [1, 1])


def test_auc_matches_pair_counting():
    rng = np.random.default_rng(23)
    for _ in range(40):
        n = int(rng.integers(4, 24))
        scores = rng.choice([0.1, 0.2, 0.2, 0.5, 0.9], size=n)
        labels = rng.integers(0, 2, size=n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        assert roc_auc(scores, labels) == pytest.approx(
            auc_pairs_oracle(scores.tolist(), labels.tolist()), abs=1e-12)


def test_auc_label_flip_complement():
    rng = np.random.default_rng(24)
    scores = rng.random(30)
    labels = rng.integers(0, 2, size=30)
    labels[0], labels[1] = 0, 1
    assert roc_auc(scores, labels) + roc_auc(scores, 1 - labels) == pytest.approx(1.0, abs=1e-12)


def test_run_metrics_maps_undefined_to_none():
    r = run_metrics([1.0, 1.0], [0.5, 0.6])
    assert r.rc is None and r.pca is not None and r.sd is not None
    r = run_metrics([1.0, 2.0], [0.5, 0.5])
    assert r.pca is None and r.rc is None  # truth constant kills both
    assert run_metrics([1.0], [0.5]) == RunMetrics(None, None, None)


def test_aggregate_examples():
    one = RunMetrics(0.9, 0.8, 1.5)
    assert aggregate([one]) == MetricsReport(0.9, 0.8, 1.5, n_runs=1)
    two = aggregate([RunMetrics(0.9, 0.8, 1.0), RunMetrics(0.7, 0.6, 3.0)])
    assert (two.rc, two.pca, two.sd, two.n_runs) == (pytest.approx(0.8), pytest.approx(0.7),
                                                     pytest.approx(2.0), 2)


def test_aggregate_skips_and_counts():
    rep = aggregate([RunMetrics(0.9, 0.8, 1.0), RunMetrics(None, 0.6, 2.0)])
    assert rep.n_runs == 1 and rep.n_skipped == 1
    assert rep.rc == 0.9
    with pytest.raises(ParameterError):
        aggregate([])
    with pytest.raises(UndefinedMetricError):
        aggregate([RunMetrics(None, None, None)])
