"""Pearson correlation, the moving-average convergence simulation and its
closed-form approximation, and the R(delta_omega, n) surface."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..estimators import EstimatorConfig, EstimatorError, mean_t1_freq_time
from ..protocol import SpectroscopyMap


class CorrelationError(ValueError):
    pass


@dataclass(frozen=True)
class PearsonResult:
    r: float
    n_points: int


def pearson_r(x, y) -> PearsonResult:
    """Normalised covariance of two equal-length vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise CorrelationError(f"length mismatch: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise CorrelationError("need at least 2 points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = dx @ dx, dy @ dy
    if sxx == 0 or syy == 0:
        raise CorrelationError("zero variance input")
    r = float(dx @ dy / np.sqrt(sxx * syy))
    return PearsonResult(min(1.0, max(-1.0, r)), int(x.size))


def _pearson_rows(x, y):
    """Row-wise Pearson R along the last axis (no validation)."""
    dx = x - x.mean(-1, keepdims=True)
    dy = y - y.mean(-1, keepdims=True)
    return (dx * dy).sum(-1) / np.sqrt((dx * dx).sum(-1) * (dy * dy).sum(-1))


@dataclass(frozen=True)
class RSimConfig:
    n_qubits: int = 10
    alpha: float = 0.2  # measurement fluctuation, fraction of the qubit's mean T1
    beta_std: float = 0.1  # device spread, fraction of t1_mean
    n_devices: int = 200
    n_max: int = 160
    t1_mean: float = 100.0  # us

    def __post_init__(self):
        if min(self.n_qubits, self.n_devices, self.n_max) < 1:
            raise ValueError("counts must be positive")
        if not (0 <= self.alpha < 1 and 0 < self.beta_std < 1):
            raise ValueError("alpha and beta_std must lie in [0, 1)")
        if self.n_qubits < 2:
            raise ValueError("Pearson R needs at least 2 qubits")


@dataclass(frozen=True)
class RConvergence:
    n: np.ndarray  # 1..n_max
    mean_r: np.ndarray
    std_r: np.ndarray
    r: np.ndarray  # (n_devices, n_max)
    true_means: np.ndarray  # (n_devices, n_qubits)

    @property
    def betas(self) -> np.ndarray:
        """Relative deviation of each qubit's true mean from its device average."""
        dev = self.true_means.mean(axis=1, keepdims=True)
        return (self.true_means - dev) / dev


def simulate_r_convergence(cfg: RSimConfig, rng: np.random.Generator) -> RConvergence:
    """Monte Carlo of Pearson R between true qubit means and their running averages.

    Each device draws its qubits' long-time means from
    ``N(t1_mean, beta_std * t1_mean)``; each measurement is
    ``N(mean_k, alpha * mean_k)``.
    """
    shape = (cfg.n_devices, cfg.n_qubits)
    true = rng.normal(cfg.t1_mean, cfg.beta_std * cfg.t1_mean, shape)
    meas = rng.normal(true[:, None, :], cfg.alpha * true[:, None, :],
                      (cfg.n_devices, cfg.n_max, cfg.n_qubits))
    running = np.cumsum(meas, axis=1) / np.arange(1, cfg.n_max + 1)[None, :, None]
    if cfg.alpha == 0:
        r = np.ones((cfg.n_devices, cfg.n_max))
    else:
        r = _pearson_rows(running, true[:, None, :])
    std = r.std(axis=0, ddof=1) if cfg.n_devices > 1 else np.zeros(cfg.n_max)
    return RConvergence(np.arange(1, cfg.n_max + 1), r.mean(axis=0), std, r, true)


def analytic_r(betas, alpha: float, n_meas) -> np.ndarray | float:
    """Closed-form expected R for a device described by relative deviations ``betas``.

    ``(sum b^2 + a * sum b) / sqrt(sum b^2 * sum (b + a)^2)`` with ``a = alpha / sqrt(N)``.
    Broadcasts over ``n_meas``.
    """
    b = np.asarray(betas, dtype=float)
    if not np.any(b):
        raise CorrelationError("betas are all zero")
    a = alpha / np.sqrt(np.asarray(n_meas, dtype=float))
    s2 = np.sum(b**2)
    s1 = np.sum(b)
    # sum (b + a)^2 expanded so ``a`` may be an array
    out = (s2 + a * s1) / np.sqrt(s2 * (s2 + 2.0 * a * s1 + b.size * a**2))
    return float(out) if np.ndim(out) == 0 else out


def sample_analytic_r(betas: np.ndarray, alpha: float, n_meas) -> tuple[np.ndarray, np.ndarray]:
    """Mean and std over devices (rows of ``betas``) of :func:`analytic_r`."""
    vals = np.array([analytic_r(b, alpha, n_meas) for b in np.atleast_2d(betas)])
    std = vals.std(axis=0, ddof=1) if len(vals) > 1 else np.zeros_like(vals[0])
    return vals.mean(axis=0), std


@dataclass(frozen=True)
class RSurface:
    delta_omegas: np.ndarray
    n_slices: np.ndarray
    r: np.ndarray  # (len(delta_omegas), len(n_slices)); NaN where undefined


def r_vs_window(maps: Sequence[SpectroscopyMap], long_means, delta_omega_grid,
                n_grid, tau: float = 50.0) -> RSurface:
    """Pearson R between per-qubit frequency-time T1 averages and long-time means
    for every (delta_omega, n) pair."""
    long_means = np.asarray(long_means, dtype=float)
    if len(maps) != len(long_means):
        raise CorrelationError("need one long-time mean per map")
    if len(maps) < 2:
        raise CorrelationError("R is undefined for fewer than 2 qubits")
    dws = np.asarray(delta_omega_grid, dtype=float)
    ns = np.asarray(n_grid, dtype=int)
    surface = np.full((dws.size, ns.size), np.nan)
    for a, dw in enumerate(dws):
        for b, n in enumerate(ns):
            # chi plays no role in the window average
            cfg = EstimatorConfig(delta_omega=float(dw), chi=2 * dw if dw > 0 else 1.0,
                                  n_slices=int(n), tau=tau)
            try:
                est = [mean_t1_freq_time(m, cfg).value for m in maps]
                surface[a, b] = pearson_r(est, long_means).r
            except (EstimatorError, CorrelationError):
                continue
    return RSurface(dws, ns, surface)
