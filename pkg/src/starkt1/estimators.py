"""Time, frequency-and-time, moving-average and frequency-ensemble estimators
of T1 and P1."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .protocol import SpectroscopyMap, T1TimeSeries


class EstimatorError(ValueError):
    pass


@dataclass(frozen=True)
class EstimatorConfig:
    delta_omega: float = 5.0  # MHz, half-width of the frequency window
    chi: float = 1.0  # MHz, ensemble frequency spacing
    n_slices: int = 1
    tau: float = 50.0  # us
    clip: bool = False  # clip saturated cells instead of dropping them

    def __post_init__(self):
        if self.delta_omega < 0:
            raise ValueError("delta_omega must be >= 0")
        if not 0 < self.chi:
            raise ValueError("chi must be > 0")
        if self.delta_omega > 0 and self.chi > 2 * self.delta_omega:
            raise ValueError("chi must not exceed 2 * delta_omega")
        if self.n_slices < 1:
            raise ValueError("n_slices must be >= 1")

    @property
    def n_samples(self) -> int:
        """Number of ensemble frequencies, ``delta_omega = (S - 1) / 2 * chi``."""
        return int(math.floor(2.0 * self.delta_omega / self.chi + 1e-9)) + 1

    def ensemble_offsets(self) -> np.ndarray:
        return -self.delta_omega + self.chi * np.arange(self.n_samples)


def heuristic_delta_omega(n_samples: int, chi: float) -> float:
    """Scan half-width needed for ``n_samples`` weakly correlated points spaced ``chi``."""
    return (n_samples - 1) / 2.0 * chi


@dataclass(frozen=True)
class EstimateResult:
    value: float
    sample_std: float
    n_used: int


def _result(values) -> EstimateResult:
    v = np.asarray(values, dtype=float).ravel()
    v = v[np.isfinite(v)]
    if v.size == 0:
        raise EstimatorError("no usable (non-missing) cells")
    std = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
    return EstimateResult(float(np.mean(v)), std, int(v.size))


def p1_to_t1(p1, tau: float):
    """``T1 = -tau / ln(P1)``; raises for P1 outside the open unit interval."""
    p = np.asarray(p1, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise EstimatorError("p1 must lie strictly between 0 and 1 to invert")
    t1 = -tau / np.log(p)
    return float(t1) if t1.ndim == 0 else t1


def t1_to_p1(t1, tau: float):
    out = np.exp(-tau / np.asarray(t1, dtype=float))
    return float(out) if out.ndim == 0 else out


def _cells_to_t1(p, tau: float, clip: bool, shots: int | None):
    """Cell-wise T1 with NaN for missing or (unless clipping) saturated cells."""
    p = np.array(p, dtype=float)
    if clip:
        eps = 0.5 / shots if shots else 1e-12
        p = np.where(np.isfinite(p), np.clip(p, eps, 1.0 - eps), p)
    else:
        p[(p <= 0) | (p >= 1)] = np.nan
    with np.errstate(divide="ignore", invalid="ignore"):
        return -tau / np.log(p)


def mean_p1_over_time(p1_series) -> EstimateResult:
    """Average of P1 at the bare qubit frequency over the long series."""
    return _result(p1_series)


def mean_t1_over_time(series: T1TimeSeries | np.ndarray) -> EstimateResult:
    t1 = series.t1 if isinstance(series, T1TimeSeries) else series
    return _result(t1)


def _window(smap: SpectroscopyMap, cfg: EstimatorConfig) -> np.ndarray:
    w = smap.shifts
    if cfg.delta_omega > min(-w.min(), w.max()) + 1e-9:
        raise EstimatorError(
            f"window +-{cfg.delta_omega} MHz exceeds grid span [{w.min()}, {w.max()}]")
    if cfg.n_slices > len(smap.times):
        raise EstimatorError(f"map has {len(smap.times)} slices, {cfg.n_slices} requested")
    cols = np.abs(w) <= cfg.delta_omega + 1e-9
    return smap.p1[: cfg.n_slices][:, cols]


def mean_p1_freq_time(smap: SpectroscopyMap, cfg: EstimatorConfig) -> EstimateResult:
    """Equal-weight P1 average over ``|shift| <= delta_omega`` and the first n slices."""
    return _result(_window(smap, cfg))


def mean_t1_freq_time(smap: SpectroscopyMap, cfg: EstimatorConfig) -> EstimateResult:
    """Average of cell-wise ``-tau / ln P1`` over the same window (convert, then average)."""
    cells = _window(smap, cfg)
    return _result(_cells_to_t1(cells, cfg.tau, cfg.clip, smap.grid.shots))


def ensemble_estimator(shifts, row, cfg: EstimatorConfig, shots: int | None = None) -> EstimateResult:
    """Frequency-ensemble T1 for one time slice.

    Samples the row at ``-delta_omega + j * chi`` for ``j = 0 .. S-1``, snapping
    each target to the nearest grid point within ``chi / 2``.
    """
    shifts = np.asarray(shifts, dtype=float)
    row = np.asarray(row, dtype=float)
    targets = cfg.ensemble_offsets()
    idx = np.abs(shifts[None, :] - targets[:, None]).argmin(axis=1)
    miss = np.abs(shifts[idx] - targets) > cfg.chi / 2.0 + 1e-9
    if np.any(miss):
        raise EstimatorError(
            f"no grid point within chi/2 of {targets[miss][0]:g} MHz")
    return _result(_cells_to_t1(row[idx], cfg.tau, cfg.clip, shots))


def moving_average(series, upto_n: int | None = None) -> np.ndarray:
    """Cumulative means; element k averages the first k+1 entries."""
    x = np.asarray(series, dtype=float)
    n = len(x) if upto_n is None else upto_n
    if n > len(x):
        raise EstimatorError(f"upto_n={n} exceeds series length {len(x)}")
    return np.cumsum(x[:n]) / np.arange(1, n + 1)


def single_instance_t1(smap: SpectroscopyMap, tau: float, slice_index: int = 0) -> float:
    """T1 inferred from the zero-shift cell of one scan."""
    j = int(np.argmin(np.abs(smap.shifts)))
    return p1_to_t1(smap.p1[slice_index, j], tau)
