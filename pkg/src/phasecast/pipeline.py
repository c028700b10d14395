"""Trace ingestion, interval aggregation, normalization, and windowing.

Input traces are CSVs with a header and `timestamp,value` columns
(integer/float epoch seconds or ISO-8601 timestamps, auto-detected;
gzip-compressed files accepted). Records are bucketed into fixed
intervals, min-max normalized, and arranged as overlapping stride-1
windows: row k of the input matrix is series[k .. k+n-1] and its target
is series[k+n]. Splits are chronological; time series are never shuffled.
"""

from __future__ import annotations

import csv
import gzip
import math
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .errors import ConfigError, DomainError, TraceError

MALFORMED_FRACTION_LIMIT = 0.01
DEFAULT_SPLIT = (0.75, 0.125, 0.125)


@dataclass
class RawTrace:
    """Timestamped records sorted ascending; values are non-negative."""

    timestamps: np.ndarray
    values: np.ndarray
    n_malformed: int = 0

    def __len__(self) -> int:
        return len(self.timestamps)


@dataclass
class AggregatedSeries:
    interval: float
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Normalizer:
    """Affine map of [d_min, d_max] onto [0, 1] and back."""

    d_min: float
    d_max: float

    def __post_init__(self):
        if not (math.isfinite(self.d_min) and math.isfinite(self.d_max)):
            raise DomainError("normalization bounds must be finite")
        if self.d_max <= self.d_min:
            raise DomainError(
                f"degenerate range: d_max ({self.d_max}) must exceed d_min ({self.d_min})")

    def transform(self, values):
        return (np.asarray(values, dtype=float) - self.d_min) / (self.d_max - self.d_min)

    def inverse(self, values):
        return np.asarray(values, dtype=float) * (self.d_max - self.d_min) + self.d_min


@dataclass
class WindowedDataset:
    """Stride-1 window matrix with chronological split boundaries."""

    inputs: np.ndarray   # (m, n)
    targets: np.ndarray  # (m,)
    train_end: int
    val_end: int

    @property
    def n(self) -> int:
        return self.inputs.shape[1]

    @property
    def m(self) -> int:
        return self.inputs.shape[0]

    @property
    def train_inputs(self):
        return self.inputs[:self.train_end]

    @property
    def train_targets(self):
        return self.targets[:self.train_end]

    @property
    def val_inputs(self):
        return self.inputs[self.train_end:self.val_end]

    @property
    def val_targets(self):
        return self.targets[self.train_end:self.val_end]

    @property
    def test_inputs(self):
        return self.inputs[self.val_end:]

    @property
    def test_targets(self):
        return self.targets[self.val_end:]


def _parse_timestamp(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        dt = datetime.fromisoformat(text)
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return dt.timestamp()


def _open_text(path):
    if str(path).endswith(".gz"):
        return gzip.open(path, "rt", newline="")
    return open(path, "r", newline="")


def ingest(path, timestamp_column: str = "timestamp",
           value_column: str = "value") -> RawTrace:
    """Read a trace CSV, sort by timestamp, and count malformed rows.

    A row is malformed when either field is missing, unparseable,
    non-finite, or the value is negative. More than 1% malformed rows
    aborts the run with the offending line numbers.
    """
    try:
        fh = _open_text(path)
    except OSError as exc:
        raise TraceError(f"cannot read trace file {path}: {exc}") from exc

    timestamps: list[float] = []
    values: list[float] = []
    bad_lines: list[int] = []
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except (StopIteration, UnicodeDecodeError, gzip.BadGzipFile) as exc:
            raise TraceError(f"trace file {path} is empty or unreadable") from exc
        header = [h.strip().lower() for h in header]
        try:
            ts_idx = header.index(timestamp_column)
            val_idx = header.index(value_column)
        except ValueError:
            raise TraceError(
                f"trace file {path} must have '{timestamp_column}' and "
                f"'{value_column}' columns, found {header}") from None
        for lineno, row in enumerate(reader, start=2):
            try:
                ts = _parse_timestamp(row[ts_idx].strip())
                val = float(row[val_idx])
                if not (math.isfinite(ts) and math.isfinite(val)) or val < 0:
                    raise ValueError
            except (ValueError, IndexError):
                bad_lines.append(lineno)
                continue
            timestamps.append(ts)
            values.append(val)

    total = len(timestamps) + len(bad_lines)
    if not timestamps:
        raise TraceError(f"trace file {path} contains no parseable records")
    if len(bad_lines) / total > MALFORMED_FRACTION_LIMIT:
        shown = ", ".join(str(n) for n in bad_lines[:20])
        more = "" if len(bad_lines) <= 20 else f" (+{len(bad_lines) - 20} more)"
        raise TraceError(
            f"{len(bad_lines)} of {total} rows malformed in {path} "
            f"(limit {MALFORMED_FRACTION_LIMIT:.0%}); lines {shown}{more}")

    ts_arr = np.asarray(timestamps)
    val_arr = np.asarray(values)
    order = np.argsort(ts_arr, kind="stable")
    return RawTrace(ts_arr[order], val_arr[order], n_malformed=len(bad_lines))


def aggregate(trace: RawTrace, interval: float, mode: str,
              fill: str | None = None) -> AggregatedSeries:
    """Bucket records into fixed intervals starting at the first timestamp.

    mode="sum" totals values per bucket (arrival counts); mode="mean"
    averages them (utilization). Empty buckets are zero-filled by default
    in sum mode and forward-filled in mean mode (a gap in a utilization
    trace is not a drop to zero); pass fill="zero" or fill="ffill" to
    override.
    """
    if interval <= 0:
        raise DomainError(f"aggregation interval must be > 0, got {interval}")
    if mode not in ("sum", "mean"):
        raise ConfigError(f"aggregation mode must be 'sum' or 'mean', got {mode!r}")
    if fill is None:
        fill = "zero" if mode == "sum" else "ffill"
    if fill not in ("zero", "ffill"):
        raise ConfigError(f"fill must be 'zero' or 'ffill', got {fill!r}")
    if len(trace) == 0:
        raise TraceError("cannot aggregate an empty trace")

    idx = ((trace.timestamps - trace.timestamps[0]) / interval).astype(int)
    n_buckets = int(idx[-1]) + 1
    sums = np.bincount(idx, weights=trace.values, minlength=n_buckets)
    counts = np.bincount(idx, minlength=n_buckets)

    if mode == "sum":
        values = sums
    else:
        values = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)

    # Bucket 0 always holds the first record, so forward fill never starves.
    empty = counts == 0
    if empty.any():
        if fill == "zero":
            values[empty] = 0.0
        else:
            for i in np.flatnonzero(empty):
                values[i] = values[i - 1]
    return AggregatedSeries(interval=float(interval), values=values)


def fit_normalizer(series) -> Normalizer:
    arr = np.asarray(series, dtype=float)
    if arr.size < 2 or np.unique(arr).size < 2:
        raise DomainError("series needs at least two distinct values to normalize")
    return Normalizer(d_min=float(arr.min()), d_max=float(arr.max()))


def normalize(series) -> tuple[np.ndarray, Normalizer]:
    """Min-max scale a series onto [0, 1]; returns the scaler for inversion."""
    norm = fit_normalizer(series)
    return norm.transform(series), norm


def make_windows(series, n: int, fractions=DEFAULT_SPLIT) -> WindowedDataset:
    """Arrange a series as stride-1 windows with a chronological split.

    fractions = (train, validation, test) must sum to 1; boundaries are
    floor(train * m) and floor(train * m) + floor(validation * m) rows.
    """
    series = np.asarray(series, dtype=float)
    if n < 1:
        raise ConfigError(f"window size must be >= 1, got {n}")
    if len(fractions) != 3 or abs(sum(fractions) - 1.0) > 1e-9:
        raise ConfigError(f"split fractions must sum to 1, got {tuple(fractions)}")
    if any(f < 0 for f in fractions):
        raise ConfigError(f"split fractions must be non-negative, got {tuple(fractions)}")
    if series.size <= n + 2:
        raise DomainError(
            f"series of length {series.size} is too short for windows of size {n}")

    m = series.size - n
    inputs = np.lib.stride_tricks.sliding_window_view(series, n)[:m].copy()
    targets = series[n:].copy()
    train_end = int(fractions[0] * m)
    val_end = train_end + int(fractions[1] * m)
    if not 0 < train_end < val_end <= m:
        raise ConfigError(
            f"split fractions {tuple(fractions)} leave an empty train or "
            f"validation portion for {m} windows")
    return WindowedDataset(inputs=inputs, targets=targets,
                           train_end=train_end, val_end=val_end)


def synthetic_trace(n_points: int = 1000, interval: float = 3600.0,
                    period: float = 24.0, noise_sigma: float = 0.05,
                    trend: float = 0.0, seed: int = 0,
                    start: float = 0.0) -> RawTrace:
    """Seeded sine-plus-trend trace with Gaussian noise, clipped at zero.

    The base signal 0.5 + 0.5*sin(2*pi*k/period) spans [0, 1]; trend is an
    increment per sample.
    """
    if n_points < 1:
        raise ConfigError(f"n_points must be >= 1, got {n_points}")
    rng = np.random.default_rng(seed)
    k = np.arange(n_points)
    values = 0.5 + 0.5 * np.sin(2 * np.pi * k / period) + trend * k
    values = values + rng.normal(0.0, noise_sigma, n_points)
    return RawTrace(timestamps=start + k * float(interval),
                    values=np.clip(values, 0.0, None))


def write_trace_csv(trace: RawTrace, path) -> None:
    """Write a trace in the documented `timestamp,value` format."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", "value"])
        for ts, val in zip(trace.timestamps, trace.values):
            writer.writerow([repr(float(ts)), repr(float(val))])


def dump_windows_csv(ds: WindowedDataset, path) -> None:
    """Portable CSV dump of the window matrix (reproducibility cache)."""
    n = ds.n
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i}" for i in range(n)] + ["target", "split"])
        for k in range(ds.m):
            split = ("train" if k < ds.train_end
                     else "val" if k < ds.val_end else "test")
            writer.writerow([repr(float(v)) for v in ds.inputs[k]]
                            + [repr(float(ds.targets[k])), split])


def load_windows_csv(path) -> WindowedDataset:
    """Inverse of dump_windows_csv."""
    with open(path, "r", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n = len(header) - 2
        inputs, targets, splits = [], [], []
        for row in reader:
            inputs.append([float(v) for v in row[:n]])
            targets.append(float(row[n]))
            splits.append(row[n + 1])
    splits_arr = np.asarray(splits)
    return WindowedDataset(
        inputs=np.asarray(inputs),
        targets=np.asarray(targets),
        train_end=int((splits_arr == "train").sum()),
        val_end=int((splits_arr != "test").sum()),
    )
