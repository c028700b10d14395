"""Forecast metrics, error-frequency histograms, Friedman ranks, and the
two reference baselines (persistence and linear autoregression)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError
from .pipeline import WindowedDataset

DEFAULT_BIN_WIDTH = 0.01


@dataclass
class MetricReport:
    rmse: float
    mae: float
    n_points: int
    histogram: list[tuple[float, int]] = field(default_factory=list)


@dataclass
class RankTable:
    """Per-dataset ranks of each method plus the Friedman chi-square."""

    scores: np.ndarray      # (methods, datasets)
    ranks: np.ndarray       # same shape; 1 = best, ties averaged
    friedman_statistic: float
    mean_ranks: np.ndarray  # (methods,)


def _check_pair(actual, predicted):
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if a.ndim != 1 or p.ndim != 1:
        raise ShapeError("actual and predicted must be 1-D")
    if a.shape != p.shape:
        raise ShapeError(f"length mismatch: {a.shape} vs {p.shape}")
    if a.size == 0:
        raise ShapeError("cannot score empty vectors")
    return a, p


def rmse(actual, predicted) -> float:
    """Root mean squared error."""
    a, p = _check_pair(actual, predicted)
    return float(np.sqrt(np.mean((a - p) ** 2)))


def mae(actual, predicted) -> float:
    """Mean absolute error."""
    a, p = _check_pair(actual, predicted)
    return float(np.mean(np.abs(a - p)))


def normalized_rmse(scores: dict[str, float], reference: str) -> dict[str, float]:
    """Each method's score divided by the reference method's (reference -> 1.0)."""
    if reference not in scores:
        raise DomainError(f"reference method {reference!r} not among {list(scores)}")
    ref = scores[reference]
    if not ref > 0:
        raise DomainError(f"reference score must be > 0, got {ref}")
    return {name: score / ref for name, score in scores.items()}


def error_histogram(actual, predicted, bin_width: float = DEFAULT_BIN_WIDTH,
                    ) -> list[tuple[float, int]]:
    """Frequency of signed errors (actual - predicted) in zero-aligned bins.

    Bin k covers [k*bin_width, (k+1)*bin_width); only populated bins are
    returned, as (lower bound, count) sorted ascending. Counts always sum
    to the number of points.
    """
    if bin_width <= 0:
        raise DomainError(f"bin width must be > 0, got {bin_width}")
    a, p = _check_pair(actual, predicted)
    errors = a - p
    ks = np.floor(errors / bin_width).astype(int)
    uniq, counts = np.unique(ks, return_counts=True)
    return [(float(k * bin_width), int(c)) for k, c in zip(uniq, counts)]


def evaluate_predictions(actual, predicted,
                         bin_width: float = DEFAULT_BIN_WIDTH) -> MetricReport:
    """Bundle RMSE, MAE, and the error histogram for one prediction vector."""
    a, p = _check_pair(actual, predicted)
    return MetricReport(
        rmse=rmse(a, p),
        mae=mae(a, p),
        n_points=a.size,
        histogram=error_histogram(a, p, bin_width),
    )


def _average_ranks(column: np.ndarray) -> np.ndarray:
    # Ascending ranks 1..k with tied values sharing their average rank.
    order = np.argsort(column, kind="stable")
    ranks = np.empty(len(column))
    ranks[order] = np.arange(1, len(column) + 1)
    for v in np.unique(column):
        tie = column == v
        if tie.sum() > 1:
            ranks[tie] = ranks[tie].mean()
    return ranks


def friedman(scores) -> RankTable:
    """Friedman rank test over a methods x datasets score matrix (lower wins).

    chi^2 = 12n/(k(k+1)) * (sum_j mean_rank_j^2 - k(k+1)^2/4) for k methods
    over n datasets. The statistic is 0 iff every dataset ranks all methods
    identically; the significance decision is left to the caller.
    """
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2 or scores.shape[0] < 2 or scores.shape[1] < 2:
        raise ShapeError(
            f"need a (methods >= 2) x (datasets >= 2) matrix, got {scores.shape}")
    k, n = scores.shape
    ranks = np.column_stack([_average_ranks(scores[:, j]) for j in range(n)])
    mean_ranks = ranks.mean(axis=1)
    statistic = 12.0 * n / (k * (k + 1)) * (
        float(np.sum(mean_ranks ** 2)) - k * (k + 1) ** 2 / 4.0)
    return RankTable(scores=scores, ranks=ranks,
                     friedman_statistic=float(statistic), mean_ranks=mean_ranks)


def baseline_persistence(ds: WindowedDataset) -> np.ndarray:
    """Predict each target as the last value of its window (naive one-step lag)."""
    return ds.inputs[:, -1].copy()


def fit_linear_ar(inputs, targets, ridge: float = 1e-8) -> np.ndarray:
    """Least-squares lag coefficients via ridge-damped normal equations."""
    x = np.asarray(inputs, dtype=float)
    y = np.asarray(targets, dtype=float)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ShapeError(f"incompatible shapes {x.shape} and {y.shape}")
    gram = x.T @ x + ridge * np.eye(x.shape[1])
    return np.linalg.solve(gram, x.T @ y)


def baseline_linear_ar(ds: WindowedDataset, ridge: float = 1e-8) -> np.ndarray:
    """Linear autoregression fit on the training rows only.

    Returns predictions for every row; rows at and beyond train_end are
    out of sample.
    """
    if ds.train_end < ds.n + 1:
        raise ShapeError(
            f"need at least {ds.n + 1} training rows to fit order-{ds.n} "
            f"autoregression, have {ds.train_end}")
    coeffs = fit_linear_ar(ds.train_inputs, ds.train_targets, ridge)
    return ds.inputs @ coeffs
