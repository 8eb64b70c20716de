"""Series ingestion, log returns, descriptive statistics and profiles."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .errors import InputError

MIN_PAIR_LENGTH = 20


@dataclass(frozen=True)
class TimeSeries:
    """Ordered, finite, real-valued observations with optional timestamps."""

    values: np.ndarray
    label: str = ""
    timestamps: np.ndarray | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise InputError(f"series {self.label!r}: values must be one-dimensional")
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise InputError(f"series {self.label!r}: non-finite value at index {bad}")
        object.__setattr__(self, "values", vals)
        if self.timestamps is not None:
            ts = np.asarray(self.timestamps, dtype=np.int64)
            if ts.shape != vals.shape:
                raise InputError(
                    f"series {self.label!r}: {ts.size} timestamps for {vals.size} values"
                )
            if ts.size > 1 and not np.all(np.diff(ts) > 0):
                raise InputError(f"series {self.label!r}: timestamps not strictly increasing")
            object.__setattr__(self, "timestamps", ts)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class AlignedPair:
    """Two series of identical length (and identical timestamps, if any)."""

    x: TimeSeries
    y: TimeSeries

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise InputError(
                f"cannot align {self.x.label!r} (N={len(self.x)}) "
                f"with {self.y.label!r} (N={len(self.y)})"
            )
        if len(self.x) < MIN_PAIR_LENGTH:
            raise InputError(f"aligned pair too short: N={len(self.x)} < {MIN_PAIR_LENGTH}")
        if self.x.timestamps is not None and self.y.timestamps is not None:
            if not np.array_equal(self.x.timestamps, self.y.timestamps):
                raise InputError("timestamp sequences differ; no interpolation is performed")

    def __len__(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class DescriptiveStats:
    """Moment statistics plus the Jarque-Bera normality test.

    ``kurtosis`` is the raw fourth standardized moment (not excess), and
    skewness/kurtosis use the biased 1/N standardized-moment form.  For a
    zero-variance series the shape statistics are NaN and JB is skipped.
    """

    min: float
    max: float
    mean: float
    std_dev: float
    skewness: float
    kurtosis: float
    jarque_bera_statistic: float
    jarque_bera_p_value: float

    def to_dict(self) -> dict:
        return {
            "min": self.min,
            "max": self.max,
            "mean": self.mean,
            "std_dev": self.std_dev,
            "skewness": self.skewness,
            "kurtosis": self.kurtosis,
            "jarque_bera_statistic": self.jarque_bera_statistic,
            "jarque_bera_p_value": self.jarque_bera_p_value,
        }


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_csv(path, column) -> TimeSeries:
    """Load one column of a CSV file as a TimeSeries.

    ``column`` is either a header name or a 0-based integer index.  Comment
    lines starting with '#' are skipped; a single header row is
    auto-detected (first row whose cells are not all numeric).  Unparseable
    cells raise an error naming the offending row.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [
                row for row in csv.reader(fh)
                if row and any(c.strip() for c in row) and not row[0].lstrip().startswith("#")
            ]
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    if not rows:
        raise InputError(f"{path}: empty file")

    header = None
    if not all(_is_number(c.strip()) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]

    if isinstance(column, int) or (isinstance(column, str) and column.lstrip("-").isdigit()):
        idx = int(column)
        if idx < 0 or (rows and idx >= len(rows[0])):
            raise InputError(f"{path}: no column at index {idx}")
        label = header[idx] if header and idx < len(header) else f"col{idx}"
    else:
        if header is None or column not in header:
            raise InputError(f"{path}: no column named {column!r}")
        idx = header.index(column)
        label = column

    if len(rows) < 2:
        raise InputError(f"{path}: need at least 2 data rows, got {len(rows)}")

    values = np.empty(len(rows))
    offset = 2 if header is not None else 1  # 1-based file row of the first data row
    for i, row in enumerate(rows):
        if idx >= len(row):
            raise InputError(f"{path}: row {i + offset} has no column {idx}")
        cell = row[idx].strip()
        try:
            v = float(cell)
        except ValueError:
            raise InputError(f"{path}: non-numeric cell {cell!r} in row {i + offset}") from None
        if not np.isfinite(v):
            raise InputError(f"{path}: non-finite value {cell!r} in row {i + offset}")
        values[i] = v
    return TimeSeries(values, label=label)


def log_returns(prices: TimeSeries) -> TimeSeries:
    """First difference of log prices; output is one element shorter."""
    p = prices.values
    if p.size < 2:
        raise InputError(f"series {prices.label!r}: need at least 2 prices")
    nonpos = np.flatnonzero(p <= 0)
    if nonpos.size:
        raise InputError(
            f"series {prices.label!r}: non-positive price {p[nonpos[0]]} "
            f"at index {int(nonpos[0])}"
        )
    ts = prices.timestamps[1:] if prices.timestamps is not None else None
    return TimeSeries(np.diff(np.log(p)), label=prices.label, timestamps=ts)


def cumulative_profile(x: TimeSeries) -> TimeSeries:
    """Running sum of the series (the profile every detrending step works on)."""
    if len(x) < 1:
        raise InputError(f"series {x.label!r}: empty")
    return TimeSeries(np.cumsum(x.values), label=x.label, timestamps=x.timestamps)


def describe(r: TimeSeries) -> DescriptiveStats:
    """Descriptive statistics of a return series.

    Mean uses 1/N, std_dev uses 1/(N-1); skewness and kurtosis are the
    biased 1/N standardized moments with kurtosis reported raw.
    JB = N*(S^2/6 + (K-3)^2/24) with a chi2(2) tail p-value.
    """
    v = r.values
    if v.size < 8:
        raise InputError(f"series {r.label!r}: need at least 8 observations, got {v.size}")
    mean = float(v.mean())
    dev = v - mean
    m2 = float(np.mean(dev**2))
    if m2 == 0.0:
        return DescriptiveStats(
            min=float(v.min()), max=float(v.max()), mean=mean, std_dev=0.0,
            skewness=float("nan"), kurtosis=float("nan"),
            jarque_bera_statistic=float("nan"), jarque_bera_p_value=float("nan"),
        )
    skew = float(np.mean(dev**3) / m2**1.5)
    kurt = float(np.mean(dev**4) / m2**2)
    jb = v.size * (skew**2 / 6.0 + (kurt - 3.0) ** 2 / 24.0)
    return DescriptiveStats(
        min=float(v.min()),
        max=float(v.max()),
        mean=mean,
        std_dev=float(v.std(ddof=1)),
        skewness=skew,
        kurtosis=kurt,
        jarque_bera_statistic=jb,
        jarque_bera_p_value=float(chi2.sf(jb, 2)),
    )
