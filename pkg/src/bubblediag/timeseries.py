"""Time-series ingestion, alignment, resampling, and smoothing.

All series are strictly increasing in time with strictly positive finite
values; timestamps are seconds since the Unix epoch, UTC. Daily data is
pinned to 00:00 UTC. Every operation returns a new series; values are
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .errors import (
    EmptyOverlapError,
    EmptySeriesError,
    NonMonotoneTimestampsError,
    NonPositiveValueError,
    ParseError,
    SpanSearchFailedError,
    TooFewPointsError,
)
from .loess import loess_fit, span_for_df

HOUR = 3600.0
DAY = 86400.0


def parse_timestamp(text: str) -> float:
    """Parse an ISO-8601 date or datetime (UTC) to epoch seconds."""
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def format_timestamp(ts: float) -> str:
    """Format epoch seconds as ISO-8601 UTC, keeping sub-second digits only when present."""
    dt = datetime.fromtimestamp(ts, tz=timezone.utc)
    if dt.microsecond:
        return dt.strftime("%Y-%m-%dT%H:%M:%S.%f") + "Z"
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class TimeSeries:
    """Timestamped positive observations (price, market cap, active users).

    Invariants: timestamps strictly increasing, values finite and > 0,
    length >= 2. Arrays are copied and frozen at construction.
    """

    timestamps: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.float64).copy()
        vals = np.asarray(self.values, dtype=np.float64).copy()
        if ts.ndim != 1 or vals.ndim != 1 or len(ts) != len(vals):
            raise ValueError("timestamps and values must be 1-d arrays of equal length")
        if len(ts) < 2:
            raise EmptySeriesError(f"series needs at least 2 observations, got {len(ts)}")
        bad = np.nonzero(np.diff(ts) <= 0)[0]
        if bad.size:
            raise NonMonotoneTimestampsError(int(bad[0]) + 1)
        finite_pos = np.isfinite(vals) & (vals > 0)
        if not finite_pos.all():
            row = int(np.nonzero(~finite_pos)[0][0])
            raise NonPositiveValueError(row, float(vals[row]))
        ts.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def start(self) -> float:
        return float(self.timestamps[0])

    @property
    def end(self) -> float:
        return float(self.timestamps[-1])

    @property
    def span(self) -> float:
        return self.end - self.start

    def log_values(self) -> np.ndarray:
        return np.log(self.values)

    def restrict(self, lo: float, hi: float) -> "TimeSeries":
        """Sub-series on [lo, hi]; raises EmptySeriesError below 2 points."""
        mask = (self.timestamps >= lo) & (self.timestamps <= hi)
        if mask.sum() < 2:
            raise EmptySeriesError(f"restriction to [{lo}, {hi}] leaves {int(mask.sum())} points")
        return TimeSeries(self.timestamps[mask], self.values[mask])


def align(a: TimeSeries, b: TimeSeries) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Intersect two series on common timestamps.

    Returns (timestamps, a_values, b_values); raises EmptyOverlapError when
    the intersection is empty.
    """
    common, ia, ib = np.intersect1d(a.timestamps, b.timestamps, return_indices=True)
    if common.size == 0:
        raise EmptyOverlapError("series share no common timestamps")
    return common, a.values[ia], b.values[ib]


def load_series(
    path,
    *,
    timestamp_column: str = "timestamp",
    value_column: str = "value",
) -> TimeSeries:
    """Load a series from a headered CSV file.

    Timestamps must be ISO-8601 (date or datetime, UTC); values must be
    strictly positive decimals. Row numbers in errors are 1-based data rows
    (the header is row 0).
    """
    timestamps: list[float] = []
    values: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ParseError(0, timestamp_column, "missing header row")
        for col in (timestamp_column, value_column):
            if col not in reader.fieldnames:
                raise ParseError(0, col, "column not found in header")
        prev = -math.inf
        for row_num, row in enumerate(reader, start=1):
            raw_ts = row.get(timestamp_column)
            raw_val = row.get(value_column)
            if raw_ts is None or raw_ts.strip() == "":
                raise ParseError(row_num, timestamp_column, "empty")
            try:
                ts = parse_timestamp(raw_ts)
            except ValueError as exc:
                raise ParseError(row_num, timestamp_column, str(exc)) from exc
            if raw_val is None or raw_val.strip() == "":
                raise ParseError(row_num, value_column, "empty")
            try:
                val = float(raw_val)
            except ValueError as exc:
                raise ParseError(row_num, value_column, str(exc)) from exc
            if not math.isfinite(val) or val <= 0:
                raise NonPositiveValueError(row_num, raw_val)
            if ts <= prev:
                raise NonMonotoneTimestampsError(row_num)
            prev = ts
            timestamps.append(ts)
            values.append(val)
    if len(timestamps) < 2:
        raise EmptySeriesError(f"{path}: only {len(timestamps)} usable rows")
    return TimeSeries(np.array(timestamps), np.array(values))


def save_series(
    series: TimeSeries,
    path,
    *,
    timestamp_column: str = "timestamp",
    value_column: str = "value",
) -> None:
    """Write a series as CSV in the same dialect load_series reads.

    Values are written with shortest round-trip representation, so a
    load/save/load cycle is exact.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([timestamp_column, value_column])
        for ts, val in zip(series.timestamps, series.values):
            writer.writerow([format_timestamp(ts), repr(float(val))])


def market_cap(price: TimeSeries, circulating_supply: TimeSeries) -> TimeSeries:
    """Market capitalization: price times supply, on price timestamps.

    Supply is carried forward (step interpolation) to each price timestamp;
    price observations before the first supply observation are dropped.
    """
    idx = np.searchsorted(circulating_supply.timestamps, price.timestamps, side="right") - 1
    usable = idx >= 0
    if usable.sum() < 2:
        raise EmptyOverlapError("price and supply series do not overlap")
    ts = price.timestamps[usable]
    cap = price.values[usable] * circulating_supply.values[idx[usable]]
    return TimeSeries(ts, cap)


def resample(series: TimeSeries, interval: float) -> TimeSeries:
    """One observation per interval boundary (multiples of `interval` since epoch).

    Each boundary takes the last observation at or before it; boundaries
    before the first observation are dropped. Raises EmptySeriesError when
    fewer than two boundaries fall inside the span.
    """
    if interval <= 0:
        raise ValueError("interval must be positive")
    first = math.ceil(series.start / interval) * interval
    last = math.floor(series.end / interval) * interval
    n = int(round((last - first) / interval)) + 1 if last >= first else 0
    if n < 2:
        raise EmptySeriesError("fewer than two resample boundaries inside the series span")
    boundaries = first + interval * np.arange(n)
    idx = np.searchsorted(series.timestamps, boundaries, side="right") - 1
    keep = idx >= 0
    if keep.sum() < 2:
        raise EmptySeriesError("fewer than two boundaries have a prior observation")
    return TimeSeries(boundaries[keep], series.values[idx[keep]])


@dataclass(frozen=True)
class SmoothingSpec:
    """Target for the local-regression smoother.

    equivalent_df is the trace of the smoothing matrix to aim for (within
    +/-0.1). selection_mode 'information-criterion' picks the degrees of
    freedom by corrected AIC instead, ignoring equivalent_df.
    """

    equivalent_df: float = 5.0
    polynomial_degree: int = 1
    selection_mode: str = "fixed-df"

    def __post_init__(self):
        if self.polynomial_degree not in (1, 2):
            raise ValueError("polynomial_degree must be 1 or 2")
        if self.equivalent_df < self.polynomial_degree + 1:
            raise ValueError("equivalent_df must be >= polynomial_degree + 1")
        if self.selection_mode not in ("fixed-df", "information-criterion"):
            raise ValueError(f"unknown selection_mode {self.selection_mode!r}")


def smooth(series: TimeSeries, spec: SmoothingSpec) -> TimeSeries:
    """Loess-smooth a series in log space.

    Locally weighted polynomial regression with tricube weights is applied
    to ln(values) on the original timestamps and exponentiated back, which
    keeps the output positive and stabilizes multiplicative noise. In
    fixed-df mode the neighborhood size is tuned by bisection until the
    smoother-matrix trace matches spec.equivalent_df within 0.1.
    """
    n = len(series)
    if n <= spec.equivalent_df:
        raise TooFewPointsError(f"need more than {spec.equivalent_df} points, got {n}")
    x = series.timestamps
    y = series.log_values()
    if spec.selection_mode == "fixed-df":
        k = span_for_df(x, spec.polynomial_degree, spec.equivalent_df, tol=0.1)
        if k is None:
            raise SpanSearchFailedError(
                f"no neighborhood size reaches df={spec.equivalent_df} +/- 0.1 for n={n}"
            )
        fit = loess_fit(x, y, k, spec.polynomial_degree)
    else:
        fit = _aicc_select(x, y, spec.polynomial_degree)
    return TimeSeries(series.timestamps, np.exp(fit.fitted))


def _aicc_select(x: np.ndarray, y: np.ndarray, degree: int):
    """Pick the loess neighborhood size by corrected AIC over a size grid."""
    n = len(x)
    k_min = degree + 3
    candidates = sorted({max(k_min, int(round(n * f))) for f in np.geomspace(0.08, 1.0, 12)})
    best = None
    best_aicc = math.inf
    for k in candidates:
        if k > n:
            k = n
        fit = loess_fit(x, y, k, degree)
        tr = fit.trace
        if n - tr - 2 <= 0:
            continue
        sigma2 = max(np.mean((y - fit.fitted) ** 2), 1e-300)
        aicc = math.log(sigma2) + 1.0 + 2.0 * (tr + 1.0) / (n - tr - 2.0)
        if aicc < best_aicc:
            best_aicc = aicc
            best = fit
    if best is None:
        raise TooFewPointsError("series too short for information-criterion smoothing")
    return best
