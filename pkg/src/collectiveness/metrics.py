"""Run-evaluation metrics: correlation, pair ordering, rank displacement, AUC.

All of these compare a measured per-frame series against a ground-truth
series (or scores against binary labels for the AUC).  Metrics that are
undefined for an input raise :class:`UndefinedMetricError`; the per-run
wrapper maps those to ``None`` so that aggregation can skip and count them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UndefinedMetricError


def _as_series_pair(measured, truth) -> tuple[np.ndarray, np.ndarray]:
    m = np.asarray(measured, dtype=np.float64)
    t = np.asarray(truth, dtype=np.float64)
    if m.ndim != 1 or t.ndim != 1 or m.shape != t.shape:
        raise ParameterError("measured and truth must be 1-D arrays of equal length")
    if m.size < 2:
        raise ParameterError(f"need at least 2 frames, got {m.size}")
    return m, t


def relevant_coefficient(measured, truth) -> float:
    """Pearson correlation between the two series."""
    m, t = _as_series_pair(measured, truth)
    dm = m - m.mean()
    dt = t - t.mean()
    denom = np.sqrt((dm * dm).sum() * (dt * dt).sum())
    if denom == 0.0:
        raise UndefinedMetricError("correlation undefined for a constant series")
    return float((dm * dt).sum() / denom)


def pairs_comparing_accuracy(measured, truth) -> float:
    """Fraction of frame pairs whose measured order matches the true order.

    Pairs with tied truth are left out entirely; a measured tie against an
    untied truth counts as wrong.
    """
    m, t = _as_series_pair(measured, truth)
    sign_m = np.sign(m[:, None] - m[None, :])
    sign_t = np.sign(t[:, None] - t[None, :])
    upper = np.triu(np.ones(len(m), dtype=bool), k=1)
    considered = upper & (sign_t != 0)
    total = int(considered.sum())
    if total == 0:
        raise UndefinedMetricError("all truth values tie; pair accuracy undefined")
    correct = int((considered & (sign_m == sign_t)).sum())
    return correct / total


def _ascending_ranks(values: np.ndarray) -> np.ndarray:
    """Rank of each entry after a stable ascending sort (ties keep index order)."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.int64)
    ranks[order] = np.arange(len(values))
    return ranks


def sorting_difference(measured, truth) -> float:
    """Mean absolute rank displacement between the two sort orders."""
    m, t = _as_series_pair(measured, truth)
    return float(np.abs(_ascending_ranks(m) - _ascending_ranks(t)).mean())


def roc_auc(scores, labels) -> float:
    """Area under the ROC curve with half credit for tied scores.

    Equals the probability that a random positive outscores a random
    negative, plus half the probability of a tie (the tie-adjusted
    Mann-Whitney statistic).
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.ndim != 1 or s.shape != y.shape:
        raise ParameterError("scores and labels must be 1-D arrays of equal length")
    pos = y.astype(bool)
    n_pos = int(pos.sum())
    n_neg = int(len(y) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs both classes present")
    # average 1-based ranks, ties sharing their group mean
    _, inverse, counts = np.unique(s, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    avg_rank = ends - (counts - 1) / 2.0
    ranks = avg_rank[inverse]
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


@dataclass(frozen=True)
class RunMetrics:
    """Per-run metric values; ``None`` marks a metric undefined for the run."""

    rc: float | None
    pca: float | None
    sd: float | None


def run_metrics(measured, truth) -> RunMetrics:
    """All three series metrics for one run, mapping undefined to None."""
    try:
        _as_series_pair(measured, truth)
    except ParameterError:
        return RunMetrics(None, None, None)
    try:
        rc = relevant_coefficient(measured, truth)
    except UndefinedMetricError:
        rc = None
    try:
        pca = pairs_comparing_accuracy(measured, truth)
    except UndefinedMetricError:
        pca = None
    return RunMetrics(rc, pca, sorting_difference(measured, truth))


@dataclass(frozen=True)
class MetricsReport:
    """Across-run means; n_runs counts the usable runs, n_skipped the rest."""

    rc: float
    pca: float
    sd: float
    n_runs: int
    n_skipped: int = 0

    def as_dict(self) -> dict:
        return {"rc": self.rc, "pca": self.pca, "sd": self.sd,
                "n_runs": self.n_runs, "n_skipped": self.n_skipped}


def aggregate(runs: list[RunMetrics]) -> MetricsReport:
    """Mean of each metric over the runs where all three are defined.

    Runs with any undefined metric are skipped and only counted; if nothing
    usable remains the aggregation itself is an error.
    """
    if not runs:
        raise ParameterError("no runs to aggregate")
    usable = [r for r in runs if r.rc is not None and r.pca is not None and r.sd is not None]
    if not usable:
        raise UndefinedMetricError("no run with all metrics defined")
    return MetricsReport(
        rc=float(np.mean([r.rc for r in usable])),
        pca=float(np.mean([r.pca for r in usable])),
        sd=float(np.mean([r.sd for r in usable])),
        n_runs=len(usable),
        n_skipped=len(runs) - len(usable),
    )
