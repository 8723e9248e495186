"""Autocorrelation, augmented Dickey-Fuller and moment/normality tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from . import _mackinnon as mk


class SeriesError(ValueError):
    pass


def autocorrelation(series, max_lag: int) -> np.ndarray:
    """Sample ACF of the mean-detrended series, normalised so ``acf[0] == 1``.

    Uses the biased (1/n) autocovariance.
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < max_lag + 2:
        raise SeriesError(f"series of length {n} too short for max_lag={max_lag}")
    d = x - x.mean()
    c0 = d @ d
    if c0 == 0 or not np.isfinite(c0):
        raise SeriesError("zero-variance (or non-finite) series")
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(d, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1]
    acf = acov / c0
    acf[0] = 1.0
    return acf


@dataclass(frozen=True)
class FrequencyACF:
    lags: np.ndarray  # MHz
    acf: np.ndarray
    decorrelation_lag: float  # first lag (MHz) with acf < threshold; NaN if never


def frequency_autocorrelation(shifts, t1_row, branch: str = "negative",
                              max_lag: int | None = None, threshold: float = 0.2) -> FrequencyACF:
    """ACF along the frequency axis of one scan row (already converted to T1)."""
    w = np.asarray(shifts, dtype=float)
    y = np.asarray(t1_row, dtype=float)
    if branch == "negative":
        sel = w <= 0
    elif branch == "positive":
        sel = w >= 0
    else:
        raise ValueError("branch must be 'negative' or 'positive'")
    w, y = w[sel], y[sel]
    if np.any(~np.isfinite(y)):
        raise SeriesError("row contains missing cells")
    step = np.diff(w)
    if step.size == 0 or not np.allclose(step, step[0], rtol=1e-6):
        raise SeriesError("frequency branch must be uniformly spaced")
    max_lag = y.size // 2 if max_lag is None else max_lag
    acf = autocorrelation(y, max_lag)
    lags = np.arange(max_lag + 1) * step[0]
    below = np.nonzero(acf < threshold)[0]
    return FrequencyACF(lags, acf, float(lags[below[0]]) if below.size else math.nan)


# -- augmented Dickey-Fuller ----------------------------------------------

@dataclass(frozen=True)
class ADFResult:
    t_stat: float
    p_value: float
    lags_used: int
    trend: bool
    n_obs: int
    critical_values: dict = field(default_factory=dict)

    def rejects(self, level: float = 0.05) -> bool:
        return self.p_value < level


def mackinnon_p(t_stat: float, trend: bool = False) -> float:
    """Approximate p-value of a Dickey-Fuller tau statistic."""
    key = "ct" if trend else "c"
    if t_stat > mk.TAU_MAX[key]:
        return 1.0
    if t_stat < mk.TAU_MIN[key]:
        return 0.0
    coef = mk.TAU_SMALLP[key] if t_stat <= mk.TAU_STAR[key] else mk.TAU_LARGEP[key]
    z = sum(c * t_stat**i for i, c in enumerate(coef))
    return float(sps.norm.cdf(z))


def mackinnon_critical(n_obs: int, trend: bool = False) -> dict:
    key = "ct" if trend else "c"
    return {lvl: sum(b / n_obs**i for i, b in enumerate(coef))
            for lvl, coef in mk.CRITICAL_2010[key].items()}


def _adf_design(x, lags, nobs, trend):
    """Regressors for the last ``nobs`` differences with ``lags`` lagged differences."""
    dx = np.diff(x)
    y = dx[-nobs:]
    cols = [x[-nobs - 1 : -1]]
    for j in range(1, lags + 1):
        cols.append(dx[-nobs - j : len(dx) - j])
    cols.append(np.ones(nobs))
    if trend:
        cols.append(np.arange(1, nobs + 1, dtype=float))
    return np.column_stack(cols), y


def _ols(X, y):
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise SeriesError("singular ADF regression")
    resid = y - X @ coef
    return coef, float(resid @ resid)


def adf_test(series, trend: bool = False, max_lag: int | None = None,
             autolag: str | None = "bic") -> ADFResult:
    """Unit-root test on ``dy_i = a y_{i-1} + sum_j b_j dy_{i-j} + c (+ g i) + e_i``.

    The lag order is picked by BIC over ``0 .. max_lag`` on a common sample
    and the regression is then re-run on the longest sample for that order.
    ``max_lag`` defaults to ``floor(12 (n/100)^(1/4))``.
    """
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < 20:
        raise SeriesError("ADF needs at least 20 observations")
    if not np.all(np.isfinite(x)):
        raise SeriesError("series contains missing values")
    ntrend = 2 if trend else 1
    if max_lag is None:
        max_lag = int(math.floor(12.0 * (n / 100.0) ** 0.25))
    max_lag = max(0, min(n // 2 - ntrend - 1, max_lag))

    if autolag is None:
        lags = max_lag
    elif autolag.lower() == "bic":
        nobs = n - 1 - max_lag
        best = None
        for p in range(max_lag + 1):
            X, y = _adf_design(x, p, nobs, trend)
            _, ssr = _ols(X, y)
            bic = nobs * math.log(ssr / nobs) + X.shape[1] * math.log(nobs)
            if best is None or bic < best[0]:
                best = (bic, p)
        lags = best[1]
    else:
        raise ValueError("autolag must be 'bic' or None")

    nobs = n - 1 - lags
    X, y = _adf_design(x, lags, nobs, trend)
    coef, ssr = _ols(X, y)
    dof = nobs - X.shape[1]
    s2 = ssr / dof
    cov = s2 * np.linalg.inv(X.T @ X)
    t_stat = float(coef[0] / math.sqrt(cov[0, 0]))
    return ADFResult(t_stat, mackinnon_p(t_stat, trend), lags, trend, nobs,
                     mackinnon_critical(nobs, trend))


# -- moments ----------------------------------------------------------------

@dataclass(frozen=True)
class MomentsReport:
    mean: float
    std: float
    skew: float
    kurtosis: float  # excess
    skew_p: float
    kurtosis_p: float
    n: int


def moments_and_normality(series) -> MomentsReport:
    """First four moments plus D'Agostino skew and Anscombe-Glynn kurtosis tests."""
    x = np.asarray(series, dtype=float)
    x = x[np.isfinite(x)]
    if x.size < 20:
        raise SeriesError("need at least 20 observations")
    if np.ptp(x) == 0:
        raise SeriesError("zero-variance series")
    return MomentsReport(
        mean=float(x.mean()),
        std=float(x.std(ddof=1)),
        skew=float(sps.skew(x)),
        kurtosis=float(sps.kurtosis(x)),
        skew_p=float(sps.skewtest(x).pvalue),
        kurtosis_p=float(sps.kurtosistest(x).pvalue),
        n=int(x.size),
    )
