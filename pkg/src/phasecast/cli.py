"""Command-line workflow: synth, train, predict, evaluate, sweep.

Option precedence is CLI flag > config file > built-in default. The config
file is TOML with any of the sections [data], [model], [training],
[output]; keys match the long option names with dashes replaced by
underscores. Every run writes a manifest.json with the fully resolved
configuration so outputs can be reproduced bit-exactly.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .errors import ConfigError, PhasecastError, TraceError
from .forecast import (
    evaluate_forecaster,
    forecast_next,
    train_forecaster,
)
from .model_io import load_model, save_model
from .optimizer import OptimizerConfig
from .pipeline import aggregate, ingest, synthetic_trace, write_trace_csv
from . import report

DEFAULTS = {
    "interval": 300.0,
    "fill": None,
    "window": 10,
    "hidden": 7,
    "epochs": 250,
    "population": 15,
    "seed": 0,
    "split": (0.75, 0.125, 0.125),
    "normalization": "train",
    "patience": 50,
    "cr_mean": 0.5,
    "cr_sigma": 0.1,
    "f_mean": 0.5,
    "f_sigma": 0.3,
    "mutation_learning_period": 10,
    "crossover_learning_period": 10,
    "bin_width": 0.01,
    "out": "phasecast-out",
}

WINDOW_RANGE = (2, 64)
HIDDEN_RANGE = (2, 64)


def _fail(exc: PhasecastError):
    click.echo(f"error {exc.tag}: {exc}", err=True)
    sys.exit(exc.exit_code)


def _load_config_file(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}") from exc
    flat = {}
    for key, value in doc.items():
        if isinstance(value, dict):
            flat.update(value)
        else:
            flat[key] = value
    return flat


def _resolve(cli_values: dict, file_cfg: dict) -> dict:
    cfg = dict(DEFAULTS)
    for key, value in file_cfg.items():
        if key not in DEFAULTS and key not in ("trace", "agg_mode"):
            raise ConfigError(f"unknown config key {key!r}")
        cfg[key] = value
    for key, value in cli_values.items():
        if value is not None:
            cfg[key] = value
    return cfg


def _parse_split(value) -> tuple[float, float, float]:
    if isinstance(value, (tuple, list)):
        parts = [float(v) for v in value]
    else:
        parts = [float(v) for v in str(value).split(",")]
    if len(parts) == 1:
        train = parts[0]
        if not 0.0 < train < 1.0:
            raise ConfigError(f"train fraction must be in (0, 1), got {train}")
        rest = (1.0 - train) / 2.0
        return (train, rest, rest)
    if len(parts) != 3:
        raise ConfigError(f"split needs 1 or 3 fractions, got {parts}")
    return (parts[0], parts[1], parts[2])


def _check_counts(window: int, hidden: int) -> None:
    if not WINDOW_RANGE[0] <= window <= WINDOW_RANGE[1]:
        raise ConfigError(
            f"window must lie in [{WINDOW_RANGE[0]}, {WINDOW_RANGE[1]}], got {window}")
    if not HIDDEN_RANGE[0] <= hidden <= HIDDEN_RANGE[1]:
        raise ConfigError(
            f"hidden must lie in [{HIDDEN_RANGE[0]}, {HIDDEN_RANGE[1]}], got {hidden}")


def _optimizer_config(cfg: dict, seed: int | None = None) -> OptimizerConfig:
    patience = cfg["patience"]
    if patience is not None and int(patience) <= 0:
        patience = None
    return OptimizerConfig(
        population_size=int(cfg["population"]),
        max_generations=int(cfg["epochs"]),
        cr_mean=float(cfg["cr_mean"]),
        cr_sigma=float(cfg["cr_sigma"]),
        f_mean=float(cfg["f_mean"]),
        f_sigma=float(cfg["f_sigma"]),
        mutation_learning_period=int(cfg["mutation_learning_period"]),
        crossover_learning_period=int(cfg["crossover_learning_period"]),
        rng_seed=int(cfg["seed"] if seed is None else seed),
        patience=None if patience is None else int(patience),
    )


def _load_series(cfg: dict) -> np.ndarray:
    if not cfg.get("trace"):
        raise TraceError("no trace file given (--trace or config key 'trace')")
    trace = ingest(cfg["trace"])
    if trace.n_malformed:
        click.echo(f"warning: skipped {trace.n_malformed} malformed rows", err=True)
    series = aggregate(trace, float(cfg["interval"]), cfg["agg_mode"],
                       fill=cfg.get("fill"))
    return series.values


def _write_manifest(outdir: Path, command: str, cfg: dict) -> None:
    doc = {
        "command": command,
        "config": {k: (list(v) if isinstance(v, tuple) else v)
                   for k, v in sorted(cfg.items())},
        "version": __version__,
    }
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _require_agg_mode(cfg: dict) -> None:
    if cfg.get("agg_mode") not in ("sum", "mean"):
        raise ConfigError(
            "aggregation mode is required: pass --agg-mode sum|mean "
            "(sum for arrival counts, mean for utilization)")


@click.group()
@click.version_option(__version__)
def main():
    """Workload forecasting with a qubit-phase network trained by
    self-balancing adaptive differential evolution."""


@main.command()
@click.option("--points", default=1000, show_default=True, help="Number of samples.")
@click.option("--interval", default=3600.0, show_default=True,
              help="Seconds between samples.")
@click.option("--period", default=24.0, show_default=True,
              help="Sine period in samples.")
@click.option("--noise", default=0.05, show_default=True,
              help="Gaussian noise sigma.")
@click.option("--trend", default=0.0, show_default=True,
              help="Linear increment per sample.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Output trace CSV path.")
def synth(points, interval, period, noise, trend, seed, out):
    """Generate a seeded synthetic trace (sine + trend + noise)."""
    try:
        trace = synthetic_trace(n_points=points, interval=interval, period=period,
                                noise_sigma=noise, trend=trend, seed=seed)
        write_trace_csv(trace, out)
    except PhasecastError as exc:
        _fail(exc)
    click.echo(f"wrote {points} points to {out}")


@main.command()
@click.option("--trace", type=click.Path(), help="Input trace CSV (.gz accepted).")
@click.option("--interval", type=float, help="Aggregation interval in seconds.")
@click.option("--agg-mode", type=click.Choice(["sum", "mean"]),
              help="Aggregate arrivals (sum) or utilization (mean).")
@click.option("--window", type=int, help="Input nodes n (window size).")
@click.option("--hidden", type=int, help="Hidden nodes p.")
@click.option("--epochs", type=int, help="Maximum generations.")
@click.option("--population", type=int, help="Population size.")
@click.option("--seed", type=int, help="Random seed.")
@click.option("--split", type=str,
              help="Train fraction (rest halved) or three comma fractions.")
@click.option("--patience", type=int, help="Early-stop patience; 0 disables.")
@click.option("--normalization", type=click.Choice(["train", "global"]),
              help="Fit scaling on the training portion only, or globally.")
@click.option("--out", type=click.Path(file_okay=False), help="Output directory.")
@click.option("--config", "config_path", type=click.Path(), help="TOML config file.")
def train(config_path, **cli_values):
    """Train a model on a trace and write model, history, and reports."""
    try:
        cfg = _resolve(cli_values, _load_config_file(config_path))
        cfg["split"] = _parse_split(cfg["split"])
        _require_agg_mode(cfg)
        _check_counts(int(cfg["window"]), int(cfg["hidden"]))
        series = _load_series(cfg)
        opt_cfg = _optimizer_config(cfg)

        run = train_forecaster(
            series, n=int(cfg["window"]), p=int(cfg["hidden"]), config=opt_cfg,
            fractions=cfg["split"], normalization=cfg["normalization"],
            interval=float(cfg["interval"]), agg_mode=cfg["agg_mode"])

        outdir = Path(cfg["out"])
        outdir.mkdir(parents=True, exist_ok=True)
        save_model(run.model, outdir / "model.json")
        report.write_history_csv(run.result.history, outdir / "history.csv")
        report.plot_history(run.result.history, outdir / "history.png")

        evaluation = evaluate_forecaster(run.model, series, cfg["split"],
                                         baselines=False,
                                         bin_width=float(cfg["bin_width"]))
        report.write_metrics_csv(evaluation.reports, evaluation.normalized,
                                 outdir / "metrics.csv")
        report.write_metrics_json(evaluation.reports, evaluation.normalized,
                                  outdir / "metrics.json")
        hist = evaluation.reports["model"].histogram
        report.write_histogram_csv(hist, outdir / "error_hist_model.csv")
        report.plot_error_histogram(hist, outdir / "error_hist_model.png")
        report.plot_forecast(evaluation.actual, evaluation.predictions,
                             outdir / "forecast.png")
        _write_manifest(outdir, "train", cfg)
    except PhasecastError as exc:
        _fail(exc)

    val = "n/a" if run.val_rmse != run.val_rmse else f"{run.val_rmse:.6f}"
    click.echo(f"train RMSE {run.train_rmse:.6f}  val RMSE {val}  "
               f"test RMSE {run.test_rmse:.6f}")
    click.echo(f"model and reports written to {outdir}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(),
              help="Trained model JSON.")
@click.option("--trace", type=click.Path(), help="Trace CSV for trailing history.")
@click.option("--values", type=str,
              help="Comma-separated raw values instead of a trace.")
@click.option("--steps", default=1, show_default=True,
              help="Number of steps to forecast.")
@click.option("--rolling/--no-rolling", default=False, show_default=True,
              help="Feed predictions back for multi-step forecasts.")
@click.option("--out", type=click.Path(dir_okay=False),
              help="Also write forecasts to this CSV.")
def predict(model_path, trace, values, steps, rolling, out):
    """Forecast the next value(s) from a model plus trailing history."""
    try:
        model = load_model(model_path)
        if (trace is None) == (values is None):
            raise ConfigError("pass exactly one of --trace or --values")
        if trace is not None:
            raw = ingest(trace)
            interval = model.interval or DEFAULTS["interval"]
            mode = model.agg_mode or "mean"
            history = aggregate(raw, float(interval), mode).values
        else:
            try:
                history = np.asarray([float(v) for v in values.split(",")])
            except ValueError as exc:
                raise ConfigError(f"cannot parse --values: {exc}") from exc
        forecasts = forecast_next(model, history, steps=steps, rolling=rolling)
    except PhasecastError as exc:
        _fail(exc)

    for value in forecasts:
        click.echo(repr(float(value)))
    if out:
        with open(out, "w") as fh:
            fh.write("step,forecast\n")
            for k, value in enumerate(forecasts, start=1):
                fh.write(f"{k},{float(value)!r}\n")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path())
@click.option("--trace", required=True, type=click.Path())
@click.option("--interval", type=float, help="Override stored aggregation interval.")
@click.option("--agg-mode", type=click.Choice(["sum", "mean"]),
              help="Override stored aggregation mode.")
@click.option("--split", type=str, help="Override stored split fractions.")
@click.option("--baselines/--no-baselines", default=False, show_default=True,
              help="Also score persistence and linear-AR baselines.")
@click.option("--denormalized", is_flag=True, default=False,
              help="Report metrics on the original scale.")
@click.option("--bin-width", type=float, help="Error histogram bin width.")
@click.option("--out", type=click.Path(file_okay=False), help="Output directory.")
def evaluate(model_path, trace, interval, agg_mode, split, baselines,
             denormalized, bin_width, out):
    """Score a model (and optionally baselines) on a trace's test split."""
    try:
        model = load_model(model_path)
        cfg = {
            "trace": trace,
            "interval": interval or model.interval or DEFAULTS["interval"],
            "agg_mode": agg_mode or model.agg_mode,
            "fill": None,
            "split": split if split is not None else
                     (model.split or DEFAULTS["split"]),
            "bin_width": bin_width or DEFAULTS["bin_width"],
            "out": out or DEFAULTS["out"],
            "model": str(model_path),
            "baselines": baselines,
            "denormalized": denormalized,
        }
        _require_agg_mode(cfg)
        cfg["split"] = _parse_split(cfg["split"])
        series = _load_series(cfg)
        evaluation = evaluate_forecaster(model, series, cfg["split"],
                                         baselines=baselines,
                                         bin_width=float(cfg["bin_width"]),
                                         denormalized=denormalized)

        outdir = Path(cfg["out"])
        outdir.mkdir(parents=True, exist_ok=True)
        report.write_metrics_csv(evaluation.reports, evaluation.normalized,
                                 outdir / "metrics.csv")
        report.write_metrics_json(evaluation.reports, evaluation.normalized,
                                  outdir / "metrics.json")
        for name, rep in evaluation.reports.items():
            report.write_histogram_csv(rep.histogram,
                                       outdir / f"error_hist_{name}.csv")
            report.plot_error_histogram(rep.histogram,
                                        outdir / f"error_hist_{name}.png",
                                        title=f"absolute error frequency: {name}")
        report.plot_forecast(evaluation.actual, evaluation.predictions,
                             outdir / "forecast.png")
        _write_manifest(outdir, "evaluate", cfg)
    except PhasecastError as exc:
        _fail(exc)

    click.echo(f"{'method':<14}{'rmse':>12}{'mae':>12}{'normalized':>12}")
    for name, rep in evaluation.reports.items():
        click.echo(f"{name:<14}{rep.rmse:>12.6f}{rep.mae:>12.6f}"
                   f"{evaluation.normalized[name]:>12.2f}")
    click.echo(f"reports written to {outdir}")


@main.command()
@click.option("--trace", type=click.Path(), help="Input trace CSV.")
@click.option("--interval", type=float)
@click.option("--agg-mode", type=click.Choice(["sum", "mean"]))
@click.option("--n-list", required=True, type=str,
              help="Comma-separated input-node counts.")
@click.option("--p-list", required=True, type=str,
              help="Comma-separated hidden-node counts (paired with --n-list).")
@click.option("--epochs", type=int)
@click.option("--population", type=int)
@click.option("--seed", type=int)
@click.option("--split", type=str)
@click.option("--patience", type=int)
@click.option("--normalization", type=click.Choice(["train", "global"]))
@click.option("--out", type=click.Path(file_okay=False))
@click.option("--config", "config_path", type=click.Path())
def sweep(config_path, n_list, p_list, **cli_values):
    """Train one model per (n, p) pair and tabulate RMSE and timing."""
    try:
        cfg = _resolve(cli_values, _load_config_file(config_path))
        cfg["split"] = _parse_split(cfg["split"])
        _require_agg_mode(cfg)
        try:
            ns = [int(v) for v in n_list.split(",")]
            ps = [int(v) for v in p_list.split(",")]
        except ValueError as exc:
            raise ConfigError(f"cannot parse sweep lists: {exc}") from exc
        if not ns or len(ns) != len(ps):
            raise ConfigError(
                f"--n-list and --p-list must pair up, got {len(ns)} vs {len(ps)}")
        series = _load_series(cfg)

        rows = []
        for n, p in sorted(zip(ns, ps)):
            cell_seed = int(np.random.SeedSequence(
                [int(cfg["seed"]), n, p]).generate_state(1)[0])
            row = {"n": n, "p": p}
            try:
                _check_counts(n, p)
                t0 = time.perf_counter()
                run = train_forecaster(
                    series, n=n, p=p,
                    config=_optimizer_config(cfg, seed=cell_seed),
                    fractions=cfg["split"], normalization=cfg["normalization"])
                row.update(
                    rmse=run.test_rmse,
                    train_time_ms=round((time.perf_counter() - t0) * 1000.0, 3),
                    generations_to_best=run.model.metadata["generations_to_best"],
                    status="ok")
            except PhasecastError as exc:
                row.update(status=f"failed: {exc.tag}")
                click.echo(f"cell ({n}, {p}) failed: {exc}", err=True)
            rows.append(row)

        outdir = Path(cfg["out"])
        outdir.mkdir(parents=True, exist_ok=True)
        report.write_sweep_csv(rows, outdir / "sweep.csv")
        report.plot_sweep(rows, outdir / "sweep.png")
        _write_manifest(outdir, "sweep", cfg)
    except PhasecastError as exc:
        _fail(exc)

    for row in rows:
        if row["status"] == "ok":
            click.echo(f"({row['n']:>2}, {row['p']:>2})  rmse {row['rmse']:.6f}  "
                       f"{row['train_time_ms']:.0f} ms  "
                       f"best at gen {row['generations_to_best']}")
        else:
            click.echo(f"({row['n']:>2}, {row['p']:>2})  {row['status']}")
    click.echo(f"sweep table written to {outdir}")


if __name__ == "__main__":
    main()
