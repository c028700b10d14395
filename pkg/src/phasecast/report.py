"""Report emission: delimited outputs (CSV/JSON) with matplotlib figures
rendered to files alongside them."""

from __future__ import annotations

import csv
import json

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import MetricReport
from .optimizer import GenerationRecord

HISTORY_COLUMNS = ["generation", "best_rmse", "mean_rmse",
                   "gamma1", "gamma2", "gamma3", "gamma4", "cr_mean"]


def write_history_csv(history: list[GenerationRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(HISTORY_COLUMNS)
        for rec in history:
            writer.writerow([rec.generation, repr(rec.best_rmse), repr(rec.mean_rmse)]
                            + [repr(g) for g in rec.gammas] + [repr(rec.cr_mean)])


def write_metrics_csv(reports: dict[str, MetricReport],
                      normalized: dict[str, float], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "rmse", "mae", "normalized_rmse"])
        for name, rep in reports.items():
            writer.writerow([name, repr(rep.rmse), repr(rep.mae),
                             repr(normalized[name])])


def write_metrics_json(reports: dict[str, MetricReport],
                       normalized: dict[str, float], path) -> None:
    doc = {
        name: {
            "rmse": rep.rmse,
            "mae": rep.mae,
            "normalized_rmse": normalized[name],
            "n_points": rep.n_points,
        }
        for name, rep in reports.items()
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_histogram_csv(histogram: list[tuple[float, int]], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_lower", "count"])
        for lower, count in histogram:
            writer.writerow([repr(lower), count])


def write_sweep_csv(rows: list[dict], path) -> None:
    columns = ["n", "p", "rmse", "train_time_ms", "generations_to_best", "status"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([row.get(c, "") for c in columns])


def plot_history(history: list[GenerationRecord], path) -> None:
    """Fitness curves on top, strategy-probability trajectory below."""
    gens = [r.generation for r in history]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax1.plot(gens, [r.best_rmse for r in history], label="best RMSE")
    ax1.plot(gens, [r.mean_rmse for r in history], label="mean RMSE", alpha=0.7)
    ax1.set_ylabel("RMSE")
    ax1.set_yscale("log")
    ax1.legend()
    ax1.grid(True, alpha=0.3)
    for k in range(4):
        ax2.plot(gens, [r.gammas[k] for r in history], label=f"gamma{k + 1}")
    ax2.set_xlabel("generation")
    ax2.set_ylabel("strategy probability")
    ax2.legend(ncol=4, fontsize=8)
    ax2.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_error_histogram(histogram: list[tuple[float, int]], path,
                         title: str = "absolute error frequency") -> None:
    if histogram:
        lowers = np.array([b[0] for b in histogram])
        counts = np.array([b[1] for b in histogram])
        width = float(np.min(np.diff(np.unique(lowers)))) if len(lowers) > 1 else 0.01
    else:
        lowers, counts, width = np.array([0.0]), np.array([0]), 0.01
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(lowers + width / 2, counts, width=width * 0.9)
    ax.set_xlabel("error (actual - predicted)")
    ax.set_ylabel("frequency")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_forecast(actual, predictions: dict[str, np.ndarray], path) -> None:
    """Actual series with each method's predictions overlaid."""
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.plot(np.asarray(actual), label="actual", color="black", linewidth=1.2)
    for name, preds in predictions.items():
        ax.plot(np.asarray(preds), label=name, alpha=0.8, linewidth=0.9)
    ax.set_xlabel("test step")
    ax.set_ylabel("value")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_sweep(rows: list[dict], path) -> None:
    done = [r for r in rows if r.get("status") == "ok"]
    fig, ax = plt.subplots(figsize=(7, 4))
    if done:
        labels = [f"({r['n']},{r['p']})" for r in done]
        ax.bar(labels, [r["rmse"] for r in done])
    ax.set_xlabel("(input nodes, hidden nodes)")
    ax.set_ylabel("test RMSE")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
