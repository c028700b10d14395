"""High-level forecasting workflow: dataset preparation, training, one-step
and rolling prediction, and model-vs-baseline evaluation.

Normalization is fit on the training portion of the series by default so
no future information leaks backwards; values of the validation/test
portions that fall outside the training range are clipped into [0, 1]
(the qubit encoding is only defined there). Fitting on the whole series
is available for compatibility with setups that normalize globally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, WindowError
from .metrics import (
    MetricReport,
    baseline_linear_ar,
    baseline_persistence,
    evaluate_predictions,
    normalized_rmse,
    rmse,
)
from .model_io import TrainedModel
from .network import Topology, predict_batch
from .optimizer import OptimizerConfig, TrainResult, train
from .pipeline import (
    DEFAULT_SPLIT,
    Normalizer,
    WindowedDataset,
    fit_normalizer,
    make_windows,
)

MODEL_METHOD = "model"


@dataclass
class ForecastRun:
    model: TrainedModel
    dataset: WindowedDataset
    result: TrainResult
    train_rmse: float
    val_rmse: float
    test_rmse: float


@dataclass
class EvaluationReport:
    """Per-method metric reports on the test split, model first."""

    reports: dict[str, MetricReport]
    normalized: dict[str, float]
    actual: np.ndarray
    predictions: dict[str, np.ndarray] = field(default_factory=dict)


def build_dataset(series, n: int, fractions=DEFAULT_SPLIT,
                  normalization: str = "train",
                  normalizer: Normalizer | None = None,
                  ) -> tuple[WindowedDataset, Normalizer]:
    """Normalize a series and arrange it into split stride-1 windows.

    normalization="train" fits the scaler on the prefix feeding the
    training rows only; "global" fits on the whole series. A pre-fit
    normalizer (e.g. from a stored model) overrides both.
    """
    series = np.asarray(series, dtype=float)
    if normalization not in ("train", "global"):
        raise ConfigError(
            f"normalization must be 'train' or 'global', got {normalization!r}")
    if normalizer is None:
        if normalization == "global":
            normalizer = fit_normalizer(series)
        else:
            m = series.size - n
            if m <= 2:
                raise ConfigError(
                    f"series of length {series.size} too short for windows of {n}")
            train_end = int(fractions[0] * m)
            # Training row k ends at series[k + n - 1] with target series[k + n],
            # so the training portion is the prefix of length train_end + n.
            normalizer = fit_normalizer(series[:train_end + n])
    scaled = np.clip(normalizer.transform(series), 0.0, 1.0)
    return make_windows(scaled, n, fractions), normalizer


def train_forecaster(series, n: int, p: int, config: OptimizerConfig,
                     fractions=DEFAULT_SPLIT, normalization: str = "train",
                     interval: float | None = None, agg_mode: str | None = None,
                     ) -> ForecastRun:
    """Train a forecasting network on one series and score it on all splits."""
    dataset, normalizer = build_dataset(series, n, fractions, normalization)
    topo = Topology(n_input=n, p_hidden=p)

    def fitness(genome):
        return rmse(dataset.train_targets,
                    predict_batch(genome, topo, dataset.train_inputs))

    validation = None
    if dataset.val_end > dataset.train_end:
        def validation(genome):
            return rmse(dataset.val_targets,
                        predict_batch(genome, topo, dataset.val_inputs))

    result = train(topo.genome_length, config, fitness, validation)
    # The deployed genome is the one the validation split liked best; the
    # final train-best is kept when there was no validation split.
    best = (result.val_best_genome if result.val_best_genome is not None
            else result.best_genome)
    train_score = fitness(best)
    val_score = (rmse(dataset.val_targets, predict_batch(best, topo, dataset.val_inputs))
                 if dataset.val_end > dataset.train_end else math.nan)
    test_score = (rmse(dataset.test_targets, predict_batch(best, topo, dataset.test_inputs))
                  if dataset.m > dataset.val_end else math.nan)

    best_gen = min(range(len(result.history)),
                   key=lambda i: result.history[i].best_rmse)
    model = TrainedModel(
        topology=topo,
        genome=best,
        normalizer=normalizer,
        interval=interval,
        agg_mode=agg_mode,
        split=tuple(float(f) for f in fractions),
        metadata={
            "seed": config.rng_seed,
            "population_size": config.population_size,
            "max_generations": config.max_generations,
            "generations_run": result.generations_run,
            "generations_to_best": best_gen,
            "stopped_early": result.stopped_early,
            "normalization": normalization,
            "train_rmse": train_score,
            "val_rmse": None if math.isnan(val_score) else val_score,
            "test_rmse": None if math.isnan(test_score) else test_score,
        },
    )
    return ForecastRun(model=model, dataset=dataset, result=result,
                       train_rmse=train_score, val_rmse=val_score,
                       test_rmse=test_score)


def forecast_next(model: TrainedModel, recent_values, steps: int = 1,
                  rolling: bool = False) -> np.ndarray:
    """Forecast the next value(s) from the trailing history of a series.

    recent_values are raw (denormalized) observations; at least n are
    required. steps > 1 feeds each normalized prediction back as the newest
    window value and must be requested explicitly with rolling=True.
    """
    n = model.topology.n_input
    values = np.asarray(recent_values, dtype=float)
    if values.size < n:
        raise WindowError(
            f"need at least {n} trailing values to forecast, got {values.size}")
    if steps < 1:
        raise ConfigError(f"steps must be >= 1, got {steps}")
    if steps > 1 and not rolling:
        raise ConfigError(
            "multi-step forecasting feeds predictions back as inputs; "
            "pass rolling=True to enable it")

    window = np.clip(model.normalizer.transform(values[-n:]), 0.0, 1.0)
    out = np.empty(steps)
    for k in range(steps):
        pred = float(predict_batch(model.genome, model.topology, window[None, :])[0])
        out[k] = pred
        window = np.append(window[1:], pred)
    return model.normalizer.inverse(out)


def evaluate_forecaster(model: TrainedModel, series, fractions=None,
                        baselines: bool = False, bin_width: float = 0.01,
                        denormalized: bool = False) -> EvaluationReport:
    """Score a model (and optionally both baselines) on a series' test split.

    The series is windowed with the model's stored normalizer so the model
    sees the scale it was trained on. Metrics are on the normalized scale
    unless denormalized=True.
    """
    if fractions is None:
        fractions = model.split if model.split is not None else DEFAULT_SPLIT
    dataset, _ = build_dataset(series, model.topology.n_input, fractions,
                               normalizer=model.normalizer)
    if dataset.m <= dataset.val_end:
        raise ConfigError("test split is empty; nothing to evaluate")

    predictions = {
        MODEL_METHOD: predict_batch(model.genome, model.topology,
                                    dataset.test_inputs),
    }
    if baselines:
        predictions["persistence"] = baseline_persistence(dataset)[dataset.val_end:]
        predictions["linear_ar"] = baseline_linear_ar(dataset)[dataset.val_end:]

    actual = dataset.test_targets
    if denormalized:
        actual = model.normalizer.inverse(actual)
        predictions = {k: model.normalizer.inverse(v) for k, v in predictions.items()}

    reports = {name: evaluate_predictions(actual, preds, bin_width)
               for name, preds in predictions.items()}
    scores = {name: rep.rmse for name, rep in reports.items()}
    return EvaluationReport(
        reports=reports,
        normalized=normalized_rmse(scores, MODEL_METHOD),
        actual=actual,
        predictions=predictions,
    )
