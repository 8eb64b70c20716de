"""Log-log scaling fits: generalized Hurst exponents and power-law coherency."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFluctuationError, InputError
from .fluctuation import (
    CorrelationProfile,
    DetrendConfig,
    q_fluctuations,
    q_fluctuations_dcca,
    rho_q_dmca,
    _dma_segment_stats,
    aggregate_q,
)
from .series import AlignedPair, TimeSeries

DEFAULT_GRID_POINTS = 20


@dataclass(frozen=True)
class ScalingFit:
    """OLS fit of ln(value) on ln(scale)."""

    exponent: float
    intercept: float
    r_squared: float
    fit_range: tuple  # (s_lo, s_hi)
    n_points: int

    def to_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "s_lo": self.fit_range[0],
            "s_hi": self.fit_range[1],
            "n_points": self.n_points,
        }


@dataclass(frozen=True)
class CoherencyEstimate:
    """Power-law coherency exponent with its underlying profile and fit."""

    h_rho: float
    per_scale_rho: CorrelationProfile
    fit: ScalingFit


def log_scales(lo: int, hi: int, num: int = DEFAULT_GRID_POINTS) -> tuple:
    """num log-spaced integers in [lo, hi], deduplicated after rounding."""
    if hi < lo:
        raise InputError(f"empty scale range [{lo}, {hi}]")
    grid = np.unique(
        np.clip(np.round(np.geomspace(lo, hi, num=num)).astype(int), lo, hi)
    )
    return tuple(int(s) for s in grid)


def fit_power_law(points, fit_range=None) -> ScalingFit:
    """Fit value ~ scale^exponent by OLS on the log-log pairs.

    ``points`` is a sequence of (scale, value) with value > 0; ``fit_range``
    restricts the fit to scales inside [s_lo, s_hi] (default: all points).
    """
    pts = [(int(s), float(v)) for s, v in points]
    if fit_range is None:
        fit_range = (min(s for s, _ in pts), max(s for s, _ in pts))
    lo, hi = int(fit_range[0]), int(fit_range[1])
    used = [(s, v) for s, v in pts if lo <= s <= hi]
    if len(used) < 3:
        raise InputError(f"need at least 3 points in fit range [{lo}, {hi}], got {len(used)}")
    for s, v in used:
        if v <= 0.0:
            raise InputError(f"non-positive value {v} at scale {s} inside fit range")
    ls = np.log([s for s, _ in used])
    lv = np.log([v for _, v in used])
    slope, intercept = np.polyfit(ls, lv, 1)
    resid = lv - (slope * ls + intercept)
    sst = float(np.sum((lv - lv.mean()) ** 2))
    r2 = 1.0 if sst == 0.0 else max(0.0, 1.0 - float(np.sum(resid**2)) / sst)
    return ScalingFit(
        exponent=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        fit_range=(lo, hi),
        n_points=len(used),
    )


def estimate_hurst(series: TimeSeries, cfg: DetrendConfig) -> ScalingFit:
    """Generalized Hurst exponent H(q) from the scaling of (F^q(s))^(1/q)."""
    cfg.check_length(len(series))
    profile = np.cumsum(series.values)
    # fluctuations at rounding-noise level (detrending annihilated the
    # profile) count as degenerate, not as a tiny but real amplitude
    floor = 1e-12 * (float(np.max(np.abs(profile))) + 1.0)
    points = []
    for s in cfg.scale_grid:
        fx, _, cross = _dma_segment_stats(profile, profile, s, cfg.theta)
        fs = aggregate_q(s, cfg.q, fx, fx, cross)
        value = fs.f_x_q ** (1.0 / cfg.q) if fs.f_x_q > 0.0 else 0.0
        if value <= floor:
            raise DegenerateFluctuationError(f"scale {s}: degenerate fluctuation")
        points.append((s, value))
    return fit_power_law(points)


def estimate_h_rho(pair: AlignedPair, cfg: DetrendConfig,
                   method: str = "q-DMCA") -> CoherencyEstimate:
    """Power-law coherency exponent from the scaling of rho^2(s).

    Regresses ln rho^2(s) on ln s over the config's scale grid; the
    coherency exponent is slope / (2q).  Capping is applied to rho before
    squaring.  Any rho(s) = 0 inside the range is an error.
    """
    if method == "q-DMCA":
        sets = q_fluctuations(pair, cfg)
    elif method == "q-DCCA":
        sets = q_fluctuations_dcca(pair, cfg.scale_grid, cfg.q)
    else:
        raise InputError(f"unknown method {method!r}")
    points = []
    rho_points = []
    for fs in sets:
        rho, capped = rho_q_dmca(fs)
        rho_points.append((fs.scale, rho, capped))
        if rho == 0.0:
            raise DegenerateFluctuationError(
                f"zero coherency in fit range at scale {fs.scale}"
            )
        points.append((fs.scale, rho**2))
    fit = fit_power_law(points)
    return CoherencyEstimate(
        h_rho=fit.exponent / (2.0 * cfg.q),
        per_scale_rho=CorrelationProfile(method=method, q=cfg.q, points=tuple(rho_points)),
        fit=fit,
    )
