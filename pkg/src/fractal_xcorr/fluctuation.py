"""Moving-average detrended fluctuation functions and scale-wise coefficients.

The engine works on cumulative profiles.  For a window size s and position
parameter theta, the moving average at (1-based) position i averages the s
profile points from i-(s-1)+g to i+g where g = floor((s-1)*theta); the
residual profile - MA is defined for s-g <= i <= N-g.  The residual is then
cut into N_s = floor(N/s - 1) non-overlapping segments of length s, and the
segment root-mean-squares / sign-carrying mean cross products are aggregated
at order q.

The box-splitting competitor splits the profiles into floor(N/s) boxes from
the start and again from the end (both pooled), removes a least-squares
linear trend per box, and aggregates the same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFluctuationError, InputError
from .series import AlignedPair, TimeSeries, cumulative_profile

MIN_SCALE = 4


@dataclass(frozen=True)
class DetrendConfig:
    """Scale grid, fluctuation order and moving-average position."""

    scale_grid: tuple
    q: float = 2.0
    theta: float = 0.5

    def __post_init__(self):
        grid = tuple(int(s) for s in self.scale_grid)
        if not grid:
            raise InputError("empty scale grid")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise InputError("scale grid must be strictly increasing")
        if grid[0] < MIN_SCALE:
            raise InputError(f"smallest scale {grid[0]} < {MIN_SCALE}")
        if not 0.0 <= self.theta <= 1.0:
            raise InputError(f"theta={self.theta} outside [0, 1]")
        if self.q == 0:
            raise InputError("fluctuation order q must be nonzero")
        object.__setattr__(self, "scale_grid", grid)

    def check_length(self, n: int):
        if self.scale_grid[-1] > n // 4:
            raise InputError(
                f"largest scale {self.scale_grid[-1]} exceeds N/4 = {n // 4} for N={n}"
            )


@dataclass(frozen=True)
class FluctuationSet:
    """q-th-order fluctuation values of one (scale, q) cell.

    f_xy_q carries the sign of the segment cross products; n_skipped counts
    segments excluded for q < 0 because one of the RMS values vanished.
    """

    scale: int
    q: float
    f_x_q: float
    f_y_q: float
    f_xy_q: float
    n_segments: int
    n_skipped: int = 0


@dataclass(frozen=True)
class CorrelationProfile:
    """Scale-wise cross-correlation coefficients for one method and order."""

    method: str  # "q-DMCA" | "q-DCCA" | "DMCA"
    q: float
    points: tuple  # of (scale, rho, capped)

    def rho_at(self, scale: int) -> float:
        for s, rho, _ in self.points:
            if s == scale:
                return rho
        raise KeyError(f"scale {scale} not in profile")

    def to_records(self) -> list:
        return [
            {"scale": s, "q": self.q, "method": self.method, "rho": rho, "capped": capped}
            for s, rho, capped in self.points
        ]


@dataclass(frozen=True)
class WindowedSeries:
    """Values defined only on a contiguous index range of a parent series."""

    values: np.ndarray
    start: int  # 0-based index into the parent series of values[0]

    @property
    def stop(self) -> int:
        return self.start + self.values.size


def _as_array(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    return np.asarray(series, dtype=float)


def moving_average(profile, n: int, theta: float = 0.5) -> WindowedSeries:
    """Moving average of window n at position parameter theta.

    Returns the averages on the index range where the full window fits,
    i.e. positions floor((n-1)*(1-theta)) .. N-1-floor((n-1)*theta)
    (0-based); the window for position t spans t-ceil((n-1)*(1-theta)) ..
    t+floor((n-1)*theta).
    """
    x = _as_array(profile)
    N = x.size
    if not 2 <= n <= N:
        raise InputError(f"window {n} outside [2, {N}]")
    if not 0.0 <= theta <= 1.0:
        raise InputError(f"theta={theta} outside [0, 1]")
    g = math.floor((n - 1) * theta)
    ma = np.convolve(x, np.full(n, 1.0 / n), mode="valid")
    return WindowedSeries(ma, start=n - 1 - g)


def dma_residual(profile, s: int, theta: float = 0.5) -> WindowedSeries:
    """Profile minus its moving average, on the valid index range."""
    x = _as_array(profile)
    ma = moving_average(x, s, theta)
    return WindowedSeries(x[ma.start : ma.stop] - ma.values, start=ma.start)


def n_segments(N: int, s: int) -> int:
    """Number of residual segments: the integer part of N/s - 1."""
    return N // s - 1


def detrended_segments(profile, ma: WindowedSeries, s: int) -> np.ndarray:
    """Cut the residual profile - MA into n_segments rows of length s.

    Trailing residual points beyond n_segments * s are discarded.
    """
    x = _as_array(profile)
    resid = x[ma.start : ma.stop] - ma.values
    ns = n_segments(x.size, s)
    if ns < 1:
        raise InputError(f"scale {s} leaves no full segment for N={x.size}")
    return resid[: ns * s].reshape(ns, s)


def segment_rms(segment) -> float:
    """Root mean square of one residual segment."""
    seg = np.asarray(segment, dtype=float)
    return float(np.sqrt(np.mean(seg**2)))


def segment_cross(seg_x, seg_y) -> float:
    """Sign-carrying mean product of two residual segments."""
    a = np.asarray(seg_x, dtype=float)
    b = np.asarray(seg_y, dtype=float)
    if a.size != b.size:
        raise InputError(f"segment length mismatch: {a.size} vs {b.size}")
    return float(np.mean(a * b))


def _dma_segment_stats(px: np.ndarray, py: np.ndarray, s: int, theta: float):
    """Per-segment (rms_x, rms_y, cross) arrays for one scale."""
    N = px.size
    ns = n_segments(N, s)
    if ns < 1:
        raise InputError(f"scale {s} leaves no full segment for N={N}")
    rx = dma_residual(px, s, theta).values[: ns * s].reshape(ns, s)
    ry = dma_residual(py, s, theta).values[: ns * s].reshape(ns, s)
    fx = np.sqrt(np.mean(rx**2, axis=1))
    fy = np.sqrt(np.mean(ry**2, axis=1))
    cross = np.mean(rx * ry, axis=1)
    return fx, fy, cross


def _dcca_segment_stats(px: np.ndarray, py: np.ndarray, s: int):
    """Box stats for the box-splitting variant: forward and backward passes
    pooled, least-squares linear trend removed from each box."""
    N = px.size
    ns = N // s
    if ns < 1:
        raise InputError(f"scale {s} exceeds series length {N}")
    boxes_x = np.concatenate([px[: ns * s].reshape(ns, s), px[N - ns * s :].reshape(ns, s)])
    boxes_y = np.concatenate([py[: ns * s].reshape(ns, s), py[N - ns * s :].reshape(ns, s)])
    t = np.arange(s, dtype=float)
    t_dev = t - t.mean()
    var_t = np.mean(t_dev**2)

    def _detrend(boxes):
        means = boxes.mean(axis=1, keepdims=True)
        slopes = (boxes * t_dev).mean(axis=1, keepdims=True) / var_t
        return boxes - means - slopes * t_dev

    rx = _detrend(boxes_x)
    ry = _detrend(boxes_y)
    fx = np.sqrt(np.mean(rx**2, axis=1))
    fy = np.sqrt(np.mean(ry**2, axis=1))
    cross = np.mean(rx * ry, axis=1)
    return fx, fy, cross


def aggregate_q(scale: int, q: float, fx: np.ndarray, fy: np.ndarray,
                cross: np.ndarray) -> FluctuationSet:
    """Order-q aggregation of per-segment fluctuation statistics."""
    n_skipped = 0
    if q < 0:
        keep = (fx > 0) & (fy > 0)
        n_skipped = int(fx.size - keep.sum())
        if keep.sum() < 1:
            raise DegenerateFluctuationError(
                f"scale {scale}: every segment degenerate at q={q}"
            )
        fx, fy, cross = fx[keep], fy[keep], cross[keep]
    f_x_q = float(np.mean(fx**q))
    f_y_q = float(np.mean(fy**q))
    f_xy_q = float(np.mean(np.sign(cross) * np.abs(cross) ** (q / 2.0)))
    return FluctuationSet(scale=scale, q=q, f_x_q=f_x_q, f_y_q=f_y_q,
                          f_xy_q=f_xy_q, n_segments=fx.size, n_skipped=n_skipped)


def q_fluctuations(pair: AlignedPair, cfg: DetrendConfig) -> list:
    """q-th-order DMA fluctuation functions of a pair on the scale grid."""
    cfg.check_length(len(pair))
    px = np.cumsum(pair.x.values)
    py = np.cumsum(pair.y.values)
    out = []
    for s in cfg.scale_grid:
        fx, fy, cross = _dma_segment_stats(px, py, s, cfg.theta)
        out.append(aggregate_q(s, cfg.q, fx, fy, cross))
    return out


def q_fluctuations_dcca(pair: AlignedPair, scale_grid, q: float) -> list:
    """Box-splitting (linear-detrending) fluctuation functions of a pair."""
    cfg = DetrendConfig(scale_grid=tuple(scale_grid), q=q)
    cfg.check_length(len(pair))
    px = np.cumsum(pair.x.values)
    py = np.cumsum(pair.y.values)
    out = []
    for s in cfg.scale_grid:
        fx, fy, cross = _dcca_segment_stats(px, py, s)
        out.append(aggregate_q(s, q, fx, fy, cross))
    return out


def rho_q_dmca(fs: FluctuationSet):
    """Coefficient F_xy^q / sqrt(F_x^q F_y^q), reciprocal-capped to [-1, 1].

    Returns (rho, capped).  capped is True only when the raw ratio exceeded
    one in magnitude (the q < 0 regime) and its reciprocal was returned.
    """
    denom = fs.f_x_q * fs.f_y_q
    if denom <= 0.0:
        raise DegenerateFluctuationError(
            f"scale {fs.scale}: degenerate fluctuation (F_x^q*F_y^q = {denom})"
        )
    raw = fs.f_xy_q / math.sqrt(denom)
    if abs(raw) > 1.0:
        return 1.0 / raw, True
    return raw, False


def rho_dmca_classic(pair: AlignedPair, s: int, theta: float = 0.5) -> float:
    """Classic (second-order, whole-sample) DMCA coefficient at one scale.

    Variance and covariance are plain means of the residual products over
    the full valid index range, with no segmentation; this is why the
    coefficient equals 1 exactly for identical series while the q=2
    segment-averaged coefficient may differ by the trailing-point truncation.
    """
    DetrendConfig(scale_grid=(s,), theta=theta).check_length(len(pair))
    px = np.cumsum(pair.x.values)
    py = np.cumsum(pair.y.values)
    rx = dma_residual(px, s, theta).values
    ry = dma_residual(py, s, theta).values
    f2x = float(np.mean(rx**2))
    f2y = float(np.mean(ry**2))
    if f2x <= 0.0 or f2y <= 0.0:
        raise DegenerateFluctuationError(f"scale {s}: degenerate DMA variance")
    return float(np.mean(rx * ry)) / math.sqrt(f2x * f2y)


def correlation_profile(pair: AlignedPair, cfg: DetrendConfig,
                        method: str = "q-DMCA") -> CorrelationProfile:
    """Scale-wise coefficient profile for one of the two estimators."""
    if method == "q-DMCA":
        sets = q_fluctuations(pair, cfg)
    elif method == "q-DCCA":
        sets = q_fluctuations_dcca(pair, cfg.scale_grid, cfg.q)
    else:
        raise InputError(f"unknown method {method!r}")
    points = []
    for fs in sets:
        rho, capped = rho_q_dmca(fs)
        points.append((fs.scale, rho, capped))
    return CorrelationProfile(method=method, q=cfg.q, points=tuple(points))
