"""TLS feature tracking in spectroscopy maps and linewidth / diffusivity extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import curve_fit

from .protocol import SpectroscopyMap

DEFAULT_THRESHOLD = 0.315


class LinewidthFitError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrackConfig:
    p_threshold: float = DEFAULT_THRESHOLD
    min_prominence: float = 0.02
    cluster_gap: float = 2.0  # MHz, gap separating auto-detected features
    windows: tuple[tuple[float, float], ...] | None = None  # user-declared feature windows

    def __post_init__(self):
        if not 0 < self.p_threshold < 1:
            raise ValueError("p_threshold must lie in (0, 1)")
        if self.min_prominence < 0:
            raise ValueError("min_prominence must be >= 0")


@dataclass(frozen=True)
class Feature:
    shift: float  # MHz
    p1: float


def _dip_prominence(y: np.ndarray, i: int) -> float:
    """Depth of the dip at ``i`` below the lower of its two bounding ridges.

    A side that reaches the edge of the row without meeting a deeper point does
    not constrain the dip.
    """
    v = y[i]
    ridges = []
    for step in (-1, 1):
        j, top = i + step, v
        while 0 <= j < y.size and y[j] >= v:
            top = max(top, y[j])
            j += step
        if 0 <= j < y.size:
            ridges.append(top)
    return math.inf if not ridges else min(ridges) - v


def extract_minima(shifts, row, cfg: TrackConfig = TrackConfig()) -> list[Feature]:
    """Local minima of a scan row strictly below the threshold, prominence filtered.

    Plateaus count once, at their centre.  Row ends are treated as bounded by
    higher values, so padding a row with values above threshold changes nothing.
    """
    w = np.asarray(shifts, dtype=float)
    y = np.asarray(row, dtype=float)
    if y.size < 3:
        raise ValueError("row needs at least 3 points")
    y = np.where(np.isfinite(y), y, np.inf)  # missing cells never form a dip
    feats = []
    i = 0
    while i < y.size:
        j = i
        while j + 1 < y.size and y[j + 1] == y[i]:
            j += 1
        left = y[i - 1] if i > 0 else math.inf
        right = y[j + 1] if j + 1 < y.size else math.inf
        if y[i] < cfg.p_threshold and left > y[i] and right > y[i]:
            c = (i + j) // 2
            if _dip_prominence(y, c) >= cfg.min_prominence:
                feats.append(Feature(float(w[c]), float(y[c])))
        i = j + 1
    return sorted(feats, key=lambda f: f.shift)


@dataclass
class TrackResult:
    times: np.ndarray
    features: list[list[Feature]]  # per slice
    windows: list[tuple[float, float]]
    assignments: list[np.ndarray] = field(default_factory=list)  # per window: positions
    assignment_times: list[np.ndarray] = field(default_factory=list)  # slice time of each position

    def positions(self) -> np.ndarray:
        return np.array([f.shift for fs in self.features for f in fs])

    def rows(self):
        """Flat ``(time, shift, p1)`` records in slice order."""
        return [(float(t), f.shift, f.p1) for t, fs in zip(self.times, self.features) for f in fs]


def cluster_positions(positions, gap: float = 2.0) -> list[tuple[float, float]]:
    """Group sorted positions into windows separated by more than ``gap`` MHz."""
    p = np.sort(np.asarray(positions, dtype=float))
    if p.size == 0:
        return []
    cuts = np.nonzero(np.diff(p) > gap)[0]
    starts = np.concatenate([[0], cuts + 1])
    ends = np.concatenate([cuts, [p.size - 1]])
    return [(float(p[s]), float(p[e])) for s, e in zip(starts, ends)]


def accumulate_tracks(smap: SpectroscopyMap, cfg: TrackConfig = TrackConfig()) -> TrackResult:
    """Extract minima from every slice and pool them into per-feature windows.

    Positions falling in several declared windows go to the nearest window
    centre; ties go to the window whose features have so far been deeper.
    """
    feats = [extract_minima(smap.shifts, row, cfg) for row in smap.p1]
    flat = [(float(t), f) for t, fs in zip(smap.times, feats) for f in fs]
    if cfg.windows is not None:
        windows = [tuple(map(float, w)) for w in cfg.windows]
    else:
        windows = cluster_positions([f.shift for _, f in flat], cfg.cluster_gap)
    buckets: list[list[float]] = [[] for _ in windows]
    stamps: list[list[float]] = [[] for _ in windows]
    depth: list[list[float]] = [[] for _ in windows]
    for t, f in flat:
        hits = [k for k, (lo, hi) in enumerate(windows) if lo <= f.shift <= hi]
        if not hits:
            continue
        if len(hits) > 1:
            dist = [abs(f.shift - 0.5 * sum(windows[k])) for k in hits]
            best = min(dist)
            tied = [k for k, d in zip(hits, dist) if d == best]
            hits = [min(tied, key=lambda k: np.mean(depth[k]) if depth[k] else math.inf)]
        buckets[hits[0]].append(f.shift)
        stamps[hits[0]].append(t)
        depth[hits[0]].append(f.p1)
    return TrackResult(np.asarray(smap.times), feats, windows, [np.array(b) for b in buckets],
                       [np.array(b) for b in stamps])


def position_histogram(positions, window: tuple[float, float], bin_width: float = 0.1):
    """Counts of positions in ``window``; returns ``(bin_centres, counts)``."""
    lo, hi = window
    nbins = max(1, int(math.ceil((hi - lo) / bin_width - 1e-9)))
    edges = lo + bin_width * np.arange(nbins + 1)
    counts, _ = np.histogram(np.asarray(positions, dtype=float), bins=edges)
    return 0.5 * (edges[1:] + edges[:-1]), counts.astype(float)


def gaussian(x, n_fit, mu, sigma):
    return n_fit * np.exp(-((x - mu) ** 2) / (2.0 * sigma**2))


@dataclass(frozen=True)
class LinewidthFit:
    mu: float
    sigma: float
    n_fit: float
    window: tuple[float, float]
    duration: float | None = None  # hours


def fit_linewidth(centres, counts, window: tuple[float, float] | None = None,
                  duration: float | None = None) -> LinewidthFit:
    """Least-squares Gaussian fit to a position histogram truncated to ``window``."""
    x = np.asarray(centres, dtype=float)
    c = np.asarray(counts, dtype=float)
    if window is None:
        window = (float(x.min()), float(x.max()))
    sel = (x >= window[0]) & (x <= window[1])
    x, c = x[sel], c[sel]
    if np.count_nonzero(c) < 5:
        raise LinewidthFitError(f"only {np.count_nonzero(c)} nonzero bins in window {window}")
    mu0 = float(np.sum(x * c) / c.sum())
    sd0 = float(np.sqrt(np.sum(c * (x - mu0) ** 2) / c.sum())) or float(np.ptp(x)) / 4
    try:
        popt, _ = curve_fit(gaussian, x, c, p0=(c.max(), mu0, sd0), maxfev=10000)
    except RuntimeError as exc:
        resid = c - gaussian(x, c.max(), mu0, sd0)
        raise LinewidthFitError(
            f"Gaussian fit did not converge ({exc}); start residual rms {np.sqrt(np.mean(resid**2)):.3g}"
        ) from exc
    n_fit, mu, sigma = popt
    if not np.all(np.isfinite(popt)):
        raise LinewidthFitError("Gaussian fit returned non-finite parameters")
    return LinewidthFit(float(mu), float(abs(sigma)), float(n_fit), tuple(map(float, window)), duration)


@dataclass(frozen=True)
class DiffusivityPair:
    d_k: float  # MHz hr^-1/2, from sigma = 2 D_K sqrt(t)
    d_1d: float  # MHz^2 / hr, from sigma = sqrt(2 D_1d t)


def diffusivities(sigma: float, duration: float) -> DiffusivityPair:
    if not (sigma > 0 and duration > 0):
        raise ValueError("sigma and duration must be positive")
    return DiffusivityPair(sigma / (2.0 * math.sqrt(duration)), sigma**2 / (2.0 * duration))


def fit_tracks(result: TrackResult, bin_width: float = 0.1, duration: float | None = None,
               pad: float = 0.5, upto: float | None = None) -> list[tuple[LinewidthFit, DiffusivityPair] | None]:
    """Gaussian fit and diffusivities for every window of a track result.

    Windows are widened by ``pad`` MHz each side; entries are None where the fit
    fails.  With ``upto`` only slices taken at or before that time (hours) are
    pooled.  ``duration`` defaults to the span of the slice times used.
    """
    times = result.times if upto is None else result.times[result.times <= upto]
    if duration is None:
        duration = float(times[-1] - times[0]) if len(times) > 1 else None
    out = []
    for (lo, hi), pos, ts in zip(result.windows, result.assignments, result.assignment_times):
        if upto is not None:
            pos = pos[ts <= upto]
        win = (lo - pad, hi + pad)
        try:
            centres, counts = position_histogram(pos, win, bin_width)
            fit = fit_linewidth(centres, counts, win, duration)
            pair = diffusivities(fit.sigma, duration) if duration else None
            out.append((fit, pair))
        except (LinewidthFitError, ValueError):
            out.append(None)
    return out


def linewidth_vs_time(result: TrackResult, bin_width: float = 0.1, pad: float = 0.5, min_slices: int = 2):
    """Refit every window on growing prefixes of the campaign.

    Returns ``(times, sigma)`` where ``sigma[i, k]`` is window k's fitted width
    using slices up to ``times[i]`` (NaN where the fit fails).  Under free
    diffusion sigma grows like sqrt(t); a bounded bath saturates.
    """
    ts = np.asarray(result.times)[max(min_slices, 2) - 1:]
    sig = np.full((ts.size, len(result.windows)), np.nan)
    for i, t in enumerate(ts):
        for k, fit in enumerate(fit_tracks(result, bin_width, pad=pad, upto=float(t))):
            if fit is not None:
                sig[i, k] = fit[0].sigma
    return ts, sig
