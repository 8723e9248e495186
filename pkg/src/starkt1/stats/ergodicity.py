"""Partition-ensemble ergodicity test with Welch t-tests and Wald-Wolfowitz runs tests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import stats as sps


class ErgodicityError(ValueError):
    pass


def welch_t_test(a, b, axis: int = -1) -> np.ndarray | float:
    """Two-sided Welch (unequal variance) t-test p-value along ``axis``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = a.shape[axis], b.shape[axis]
    if na < 2 or nb < 2:
        raise ErgodicityError("each sample needs at least 2 values")
    va = a.var(axis=axis, ddof=1) / na
    vb = b.var(axis=axis, ddof=1) / nb
    se2 = va + vb
    if np.any(se2 == 0):
        raise ErgodicityError("both samples have zero variance")
    t = (a.mean(axis=axis) - b.mean(axis=axis)) / np.sqrt(se2)
    df = se2**2 / (va**2 / (na - 1) + vb**2 / (nb - 1))
    p = 2.0 * sps.t.sf(np.abs(t), df)
    return float(p) if np.ndim(p) == 0 else p


def t_test_two_sample(a, b) -> float:
    return welch_t_test(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def runs_test(series, cutoff: float | None = None) -> tuple[float, float]:
    """Wald-Wolfowitz runs test around the median (or ``cutoff``).

    Values equal to the cutoff are dropped.  Returns ``(z, two-sided p)``; a
    sample with only one category gives ``(nan, 1.0)``.
    """
    x = np.asarray(series, dtype=float)
    c = np.median(x) if cutoff is None else cutoff
    s = x[x != c] > c
    n1, n2 = int(s.sum()), int((~s).sum())
    n = n1 + n2
    if n1 == 0 or n2 == 0:
        return float("nan"), 1.0
    runs = 1 + int(np.count_nonzero(s[1:] != s[:-1]))
    mean = 2.0 * n1 * n2 / n + 1.0
    var = 2.0 * n1 * n2 * (2.0 * n1 * n2 - n) / (n**2 * (n - 1))
    if var <= 0:
        return float("nan"), 1.0
    z = (runs - mean) / np.sqrt(var)
    return float(z), float(2.0 * sps.norm.sf(abs(z)))


@dataclass(frozen=True)
class PartitionResult:
    k: int
    m: int  # subset length
    ensemble_means: np.ndarray  # (m,)
    t_pvalues: np.ndarray  # (m,) ensemble at index i vs whole series
    runs_pvalues: np.ndarray  # (k,)
    dependent: np.ndarray  # (k,) bool, runs test rejects independence

    def rejection_fraction(self, level: float = 0.05) -> float:
        return float(np.mean(self.t_pvalues < level))


@dataclass(frozen=True)
class ErgodicityReport:
    series_mean: float
    partitions: dict  # k -> PartitionResult

    @property
    def k_max(self) -> int:
        return max(self.partitions)


def ergodicity_partition_test(series, k_range: Iterable[int], level: float = 0.05) -> ErgodicityReport:
    """Split the series into ``k`` equal contiguous subsets (tail dropped) for each k.

    The same-index ensembles across subsets are each compared to the whole
    series with a Welch t-test; every subset also gets a runs test.
    """
    x = np.asarray(series, dtype=float)
    x = x[np.isfinite(x)]
    ks = sorted(set(int(k) for k in k_range))
    if not ks or ks[0] < 2:
        raise ErgodicityError("k values must be >= 2")
    if x.size < 2 * ks[-1]:
        raise ErgodicityError(f"series of length {x.size} too short for k={ks[-1]}")
    out = {}
    for k in ks:
        m = x.size // k
        sub = x[: k * m].reshape(k, m)
        pvals = welch_t_test(sub.T, x[None, :], axis=-1)
        runs = np.array([runs_test(s)[1] for s in sub])
        out[k] = PartitionResult(k, m, sub.mean(axis=0), np.atleast_1d(pvals), runs, runs < level)
    return ErgodicityReport(float(x.mean()), out)
