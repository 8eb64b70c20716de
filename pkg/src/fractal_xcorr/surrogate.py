"""IAAFT surrogates and the bootstrap hedge / safe-haven significance test.

The null hypothesis is destroyed cross-correlation: each member of the
surrogate ensemble pairs an independently randomized copy of x with an
independently randomized copy of y, each preserving its own value
distribution exactly and its power spectrum approximately.  The observed
scale-wise coefficient is then compared against the ensemble with a
two-tailed distance-from-mean p-value.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFluctuationError, InputError
from .fluctuation import DetrendConfig, _dma_segment_stats, aggregate_q, rho_q_dmca, q_fluctuations
from .series import AlignedPair, TimeSeries

MIN_SURROGATE_LENGTH = 32
MAX_REGENERATION_RETRIES = 10


@dataclass(frozen=True)
class IaaftConfig:
    max_iterations: int = 1000
    convergence_tol: float = 1e-8  # relative change in spectrum mismatch
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InputError(f"max_iterations={self.max_iterations} < 1")


@dataclass(frozen=True)
class SurrogateTestReport:
    scale: int
    q: float
    observed_rho: float
    surrogate_mean: float
    surrogate_values: np.ndarray
    p_value: float
    n_failed: int = 0  # surrogate pairs degenerate even after retries


def _iaaft_ensemble(x: np.ndarray, n_rows: int, cfg: IaaftConfig, rng) -> np.ndarray:
    """n_rows IAAFT surrogates of x, shape (n_rows, N).

    Each iteration imposes the original amplitude spectrum (keeping current
    phases), then rank-remaps onto the sorted original values, so the final
    output always carries the exact original value multiset.  A row stops
    iterating once the relative change of its spectrum mismatch falls below
    the tolerance.
    """
    N = x.size
    sorted_x = np.sort(x)
    target_amp = np.abs(np.fft.rfft(x))
    target_norm = np.linalg.norm(target_amp)
    cand = np.empty((n_rows, N))
    for i in range(n_rows):
        cand[i] = rng.permutation(x)
    prev = np.full(n_rows, np.inf)
    active = np.arange(n_rows)
    for _ in range(cfg.max_iterations):
        spec = np.fft.rfft(cand[active], axis=1)
        mismatch = np.linalg.norm(np.abs(spec) - target_amp, axis=1) / target_norm
        rel_change = np.abs(prev[active] - mismatch) / np.maximum(mismatch, 1e-300)
        prev[active] = mismatch
        keep = rel_change >= cfg.convergence_tol
        if not keep.any():
            break
        active = active[keep]
        phases = np.exp(1j * np.angle(spec[keep]))
        nxt = np.fft.irfft(target_amp * phases, n=N, axis=1)
        order = np.argsort(nxt, axis=1)
        nxt[np.arange(active.size)[:, None], order] = sorted_x[None, :]
        cand[active] = nxt
    return cand


def iaaft_surrogate(x: TimeSeries, cfg: IaaftConfig = IaaftConfig()) -> TimeSeries:
    """One IAAFT surrogate of x; deterministic given cfg.seed."""
    if len(x) < MIN_SURROGATE_LENGTH:
        raise InputError(f"series too short for surrogates: N={len(x)} < {MIN_SURROGATE_LENGTH}")
    rng = np.random.default_rng(cfg.seed)
    out = _iaaft_ensemble(x.values, 1, cfg, rng)[0]
    return TimeSeries(out, label=f"{x.label}-surrogate")


def _series_rng(seed: int, values: np.ndarray):
    digest = hashlib.sha256(np.ascontiguousarray(values).tobytes()).digest()
    return np.random.default_rng(
        np.random.SeedSequence([seed, int.from_bytes(digest[:8], "little")])
    )


def _rho_all_scales(px, py, cfg: DetrendConfig):
    """rho per scale, or None if any scale is degenerate."""
    rhos = []
    for s in cfg.scale_grid:
        fx, fy, cross = _dma_segment_stats(px, py, s, cfg.theta)
        try:
            rho, _ = rho_q_dmca(aggregate_q(s, cfg.q, fx, fy, cross))
        except DegenerateFluctuationError:
            return None
        rhos.append(rho)
    return rhos


def surrogate_test(pair: AlignedPair, cfg: DetrendConfig, n_surrogates: int = 1000,
                   iaaft: IaaftConfig = IaaftConfig()) -> list:
    """Two-tailed surrogate test of the scale-wise coefficient.

    p = (#{|rho_s - mean| >= |rho_obs - mean|} + 1) / (n + 1); the add-one
    correction keeps p strictly positive.  Degenerate surrogate pairs are
    regenerated with fresh seeds (capped), then counted out.
    """
    if n_surrogates < 100:
        raise InputError(f"n_surrogates={n_surrogates} < 100")
    if len(pair) < MIN_SURROGATE_LENGTH:
        raise InputError(f"pair too short for surrogates: N={len(pair)}")
    cfg.check_length(len(pair))

    px = np.cumsum(pair.x.values)
    py = np.cumsum(pair.y.values)
    observed = _rho_all_scales(px, py, cfg)
    if observed is None:
        raise DegenerateFluctuationError("degenerate fluctuation in the observed pair")

    # Streams are keyed on series content, not argument position, so that
    # swapping the pair yields the same surrogates and identical p-values.
    rng_x = _series_rng(iaaft.seed, pair.x.values)
    rng_y = _series_rng(iaaft.seed, pair.y.values)
    sx = _iaaft_ensemble(pair.x.values, n_surrogates, iaaft, rng_x)
    sy = _iaaft_ensemble(pair.y.values, n_surrogates, iaaft, rng_y)

    surr_rhos = np.empty((n_surrogates, len(cfg.scale_grid)))
    failed = np.zeros(n_surrogates, dtype=bool)
    for i in range(n_surrogates):
        rhos = _rho_all_scales(np.cumsum(sx[i]), np.cumsum(sy[i]), cfg)
        retries = 0
        while rhos is None and retries < MAX_REGENERATION_RETRIES:
            retries += 1
            sx[i] = _iaaft_ensemble(pair.x.values, 1, iaaft, rng_x)[0]
            sy[i] = _iaaft_ensemble(pair.y.values, 1, iaaft, rng_y)[0]
            rhos = _rho_all_scales(np.cumsum(sx[i]), np.cumsum(sy[i]), cfg)
        if rhos is None:
            failed[i] = True
        else:
            surr_rhos[i] = rhos

    reports = []
    ok = ~failed
    n_failed = int(failed.sum())
    for j, s in enumerate(cfg.scale_grid):
        vals = surr_rhos[ok, j]
        mean = float(vals.mean())
        dist_obs = abs(observed[j] - mean)
        count = int(np.sum(np.abs(vals - mean) >= dist_obs))
        reports.append(SurrogateTestReport(
            scale=s, q=cfg.q, observed_rho=observed[j], surrogate_mean=mean,
            surrogate_values=vals, p_value=(count + 1) / (vals.size + 1),
            n_failed=n_failed,
        ))
    return reports


def classify(report: SurrogateTestReport, alpha: float = 0.05) -> str:
    """Hedge (q=2) or safe-haven (q=4) classification of one scale.

    strong: significant and negative; weak: statistically indistinguishable
    from uncorrelated; none: significant and positive.
    """
    if report.q == 2:
        dimension = "hedge"
    elif report.q == 4:
        dimension = "safe haven"
    else:
        dimension = f"q={report.q:g} dependence"
    if report.p_value > alpha:
        return f"weak {dimension}"
    if report.observed_rho < 0:
        return f"strong {dimension}"
    return f"no {dimension}"


def stars(p_value: float) -> str:
    """Significance markers at the 1% / 5% / 10% levels."""
    if p_value <= 0.01:
        return "***"
    if p_value <= 0.05:
        return "**"
    if p_value <= 0.10:
        return "*"
    return ""
