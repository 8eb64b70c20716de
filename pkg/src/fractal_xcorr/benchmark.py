"""Monte Carlo comparison of the two coherency estimators.

Ensembles of mixed-correlated ARFIMA samples are generated per grid cell
(length x innovation correlation), the coherency exponent is estimated with
both the moving-average and the box-splitting method for each order q and
fit-range parameter, and bias / SD / MSE against the theoretical exponent
are reported.

Fit-range conventions: box-splitting runs parameterized by n_min fit scales
n_min .. N/5; moving-average runs parameterized by s_max fit scales
10 .. s_max.  Each range holds 20 log-spaced integer scales (deduplicated).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFluctuationError, InputError
from .fluctuation import _dcca_segment_stats, _dma_segment_stats, aggregate_q, rho_q_dmca
from .mc_arfima import McArfimaSpec, generate
from .scaling import fit_power_law, log_scales

DMCA_FIT_S_LO = 10  # lower fit bound when s_max is the swept parameter
DCCA_FIT_HI_DIVISOR = 5  # upper fit bound N/5 when n_min is the swept parameter
THEORETICAL_H_RHO = -0.2


@dataclass(frozen=True)
class BenchmarkConfig:
    lengths: tuple = (500, 1000, 5000)
    cross_corrs: tuple = (0.1, 0.5, 0.9)
    qs: tuple = (2.0, 4.0)
    replications: int = 200
    dcca_n_min: tuple = (10, 20, 50, 100)
    dmca_s_max: tuple = (20, 50, 100)
    master_seed: int = 0
    theta: float = 0.5
    truncation: int = 10_000

    def __post_init__(self):
        if self.replications < 10:
            raise InputError(f"replications={self.replications} < 10")


@dataclass(frozen=True)
class EstimatorReport:
    """Bias / SD / MSE of one estimator grid cell."""

    method: str  # "DMCA" | "DCCA"
    length: int
    cross_corr: float
    q: float
    range_param: int  # s_max for DMCA, n_min for DCCA
    bias: float
    sd: float
    mse: float
    n_effective: int

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "N": self.length,
            "cross_corr": self.cross_corr,
            "q": self.q,
            "range_param": self.range_param,
            "bias": self.bias,
            "sd": self.sd,
            "mse": self.mse,
            "n_effective": self.n_effective,
        }


def _cell_seed(master_seed: int, length: int, cross_corr: float, rep: int) -> int:
    # Stable, collision-free across the grid; replication seeds are
    # consecutive within a cell for reproducible parallel fan-out.
    mask = (1 << 64) - 1
    base = (master_seed * 0x9E3779B97F4A7C15) & mask
    base ^= (length * 0xBF58476D1CE4E5B9) & mask
    base ^= (int(round(cross_corr * 1000)) * 0x94D049BB133111EB) & mask
    return (base + rep) & ((1 << 63) - 1)


def _h_rho_from_stats(stats_by_scale: dict, scales, q: float) -> float:
    points = []
    for s in scales:
        fx, fy, cross = stats_by_scale[s]
        rho, _ = rho_q_dmca(aggregate_q(s, q, fx, fy, cross))
        if rho == 0.0:
            raise DegenerateFluctuationError(f"zero coherency in fit range at scale {s}")
        points.append((s, rho**2))
    return fit_power_law(points).exponent / (2.0 * q)


def _estimate_all(px, py, cfg: BenchmarkConfig, length: int):
    """Coherency estimates for every (method, q, range param) on one sample.

    Per-scale segment statistics are computed once per method and shared
    across orders and fit ranges.  Degenerate cells yield None.
    """
    dmca_grids = {p: log_scales(DMCA_FIT_S_LO, p) for p in cfg.dmca_s_max}
    dcca_hi = length // DCCA_FIT_HI_DIVISOR
    dcca_grids = {p: log_scales(p, dcca_hi) for p in cfg.dcca_n_min if p < dcca_hi}

    out = {}
    for method, grids, stat_fn in (
        ("DMCA", dmca_grids, lambda s: _dma_segment_stats(px, py, s, cfg.theta)),
        ("DCCA", dcca_grids, lambda s: _dcca_segment_stats(px, py, s)),
    ):
        cache = {}
        for s in sorted({s for g in grids.values() for s in g}):
            cache[s] = stat_fn(s)
        for param, scales in grids.items():
            for q in cfg.qs:
                try:
                    est = _h_rho_from_stats(cache, scales, q)
                except (DegenerateFluctuationError, InputError):
                    est = None
                out[(method, q, param)] = est
    return out


def run_benchmark(cfg: BenchmarkConfig, progress=None) -> list:
    """Bias/SD/MSE reports for the full config grid.

    Degenerate replications are excluded from a cell's statistics with
    n_effective recording how many completed.  Deterministic given
    cfg.master_seed.
    """
    reports = []
    for length in cfg.lengths:
        for rho in cfg.cross_corrs:
            estimates = {}  # key -> list of estimates
            for rep in range(cfg.replications):
                spec = McArfimaSpec(
                    cross_corr=rho, length=length, truncation=cfg.truncation,
                    seed=_cell_seed(cfg.master_seed, length, rho, rep),
                )
                sample = generate(spec)
                px = np.cumsum(sample.x.values)
                py = np.cumsum(sample.y.values)
                for key, est in _estimate_all(px, py, cfg, length).items():
                    estimates.setdefault(key, []).append(est)
            for (method, q, param), ests in sorted(estimates.items()):
                vals = np.array([e for e in ests if e is not None])
                if vals.size == 0:
                    continue
                bias = float(vals.mean() - THEORETICAL_H_RHO)
                sd = float(vals.std())  # population SD across replications
                reports.append(EstimatorReport(
                    method=method, length=length, cross_corr=rho, q=q,
                    range_param=param, bias=bias, sd=sd,
                    mse=bias**2 + sd**2, n_effective=int(vals.size),
                ))
                if progress is not None:
                    progress(reports[-1])
    return reports


STABILITY_FIT_RANGE = (10, 1000)


def stability_sweep(lengths, cfg: BenchmarkConfig) -> list:
    """Mean coherency estimate per length for both methods and orders.

    The fit range is held fixed across lengths (10 .. 1000, capped at N/5)
    so that the length-dependence of the means reflects estimator quality
    rather than a moving estimand.  Uses the last configured innovation
    correlation.  Returns records {method, q, N, mean_h_rho, n_effective}.
    """
    lo, hi = STABILITY_FIT_RANGE
    rho = cfg.cross_corrs[-1]
    records = []
    for length in lengths:
        grid = log_scales(lo, min(hi, length // DCCA_FIT_HI_DIVISOR))
        estimates = {}
        for rep in range(cfg.replications):
            spec = McArfimaSpec(
                cross_corr=rho, length=length, truncation=cfg.truncation,
                seed=_cell_seed(cfg.master_seed, length, rho, rep),
            )
            sample = generate(spec)
            px = np.cumsum(sample.x.values)
            py = np.cumsum(sample.y.values)
            for method, stat_fn in (
                ("DMCA", lambda s: _dma_segment_stats(px, py, s, cfg.theta)),
                ("DCCA", lambda s: _dcca_segment_stats(px, py, s)),
            ):
                cache = {s: stat_fn(s) for s in grid}
                for q in cfg.qs:
                    try:
                        est = _h_rho_from_stats(cache, grid, q)
                    except (DegenerateFluctuationError, InputError):
                        est = None
                    estimates.setdefault((method, q), []).append(est)
        for (method, q), ests in sorted(estimates.items()):
            vals = np.array([e for e in ests if e is not None])
            if vals.size == 0:
                continue
            records.append({
                "method": method, "q": q, "N": length,
                "mean_h_rho": float(vals.mean()),
                "n_effective": int(vals.size),
            })
    return records
