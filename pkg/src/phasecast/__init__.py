"""phasecast: workload forecasting with a qubit-phase neural network trained
by self-balancing adaptive differential evolution."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DomainError,
    EvaluationError,
    ModelFormatError,
    PhasecastError,
    ShapeError,
    TraceError,
    WindowError,
)
from .network import Topology, decode, encode, predict, predict_batch, sigmoid
from .optimizer import OptimizerConfig, TrainResult, train
from .pipeline import (
    AggregatedSeries,
    Normalizer,
    RawTrace,
    WindowedDataset,
    aggregate,
    ingest,
    make_windows,
    normalize,
    synthetic_trace,
)
from .metrics import (
    MetricReport,
    RankTable,
    baseline_linear_ar,
    baseline_persistence,
    error_histogram,
    friedman,
    mae,
    normalized_rmse,
    rmse,
)

__all__ = [
    "__version__",
    "AggregatedSeries",
    "ConfigError",
    "DomainError",
    "EvaluationError",
    "MetricReport",
    "ModelFormatError",
    "Normalizer",
    "OptimizerConfig",
    "PhasecastError",
    "RankTable",
    "RawTrace",
    "ShapeError",
    "Topology",
    "TraceError",
    "TrainResult",
    "WindowError",
    "WindowedDataset",
    "aggregate",
    "baseline_linear_ar",
    "baseline_persistence",
    "decode",
    "encode",
    "error_histogram",
    "friedman",
    "ingest",
    "mae",
    "make_windows",
    "normalize",
    "normalized_rmse",
    "predict",
    "predict_batch",
    "rmse",
    "sigmoid",
    "synthetic_trace",
    "train",
]
