"""Measurement protocol emulation: Ramsey calibration, fixed-delay P1 scans,
full T1 decays and multi-qubit campaigns on a shared clock."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import (
    BathState,
    QubitModel,
    SignInfeasibleError,
    StarkTone,
    amplitude_for_shift,
    evolve_bath,
    initial_bath,
    relaxation_rate,
    stark_shift,
)

T1_DELAYS = np.geomspace(1.0, 500.0, 41)  # us
T1_SHOTS = 300


class FitError(RuntimeError):
    """A decay or fringe fit could not be performed on the sampled data."""


@dataclass(frozen=True)
class ScanGrid:
    shifts: np.ndarray  # MHz, ascending
    tau: float = 50.0  # us
    shots: int | None = 1000  # None -> noiseless probabilities
    detuning: float = 50.0  # |Delta_qs| in MHz, sign picked per branch

    def __post_init__(self):
        shifts = np.asarray(self.shifts, dtype=float)
        object.__setattr__(self, "shifts", shifts)
        if shifts.ndim != 1 or shifts.size == 0:
            raise ValueError("shifts must be a non-empty 1-d sequence")
        if np.any(np.diff(shifts) <= 0):
            raise ValueError("shifts must be strictly increasing")
        if not self.tau > 0:
            raise ValueError("tau must be > 0")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be >= 1")

    @classmethod
    def symmetric(cls, max_shift: float = 25.0, points_per_direction: int = 501,
                  tau: float = 50.0, shots: int | None = 1000,
                  detuning: float = 50.0) -> "ScanGrid":
        """Two sweep branches of ``points_per_direction`` points sharing the 0 point."""
        neg = np.linspace(-max_shift, 0.0, points_per_direction)
        pos = np.linspace(0.0, max_shift, points_per_direction)
        return cls(np.concatenate([neg[:-1], pos]), tau, shots, detuning)

    def __eq__(self, other):
        if not isinstance(other, ScanGrid):
            return NotImplemented
        return (np.array_equal(self.shifts, other.shifts) and self.tau == other.tau
                and self.shots == other.shots and self.detuning == other.detuning)

    __hash__ = None


@dataclass
class SpectroscopyMap:
    """P1 on a (time slice x frequency shift) grid; NaN marks a missing cell."""

    qubit_id: str
    times: np.ndarray  # hours
    grid: ScanGrid
    p1: np.ndarray  # (len(times), len(grid.shifts))

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.p1 = np.asarray(self.p1, dtype=float).reshape(len(self.times), len(self.grid.shifts))
        finite = self.p1[np.isfinite(self.p1)]
        if np.any((finite < 0) | (finite > 1)):
            raise ValueError("p1 values must lie in [0, 1]")

    @property
    def shifts(self) -> np.ndarray:
        return self.grid.shifts

    def __eq__(self, other):
        if not isinstance(other, SpectroscopyMap):
            return NotImplemented
        return (self.qubit_id == other.qubit_id and self.grid == other.grid
                and np.array_equal(self.times, other.times)
                and np.array_equal(self.p1, other.p1, equal_nan=True))


@dataclass
class T1TimeSeries:
    qubit_id: str
    times: np.ndarray  # hours
    t1: np.ndarray  # us, NaN for failed fits
    stderr: np.ndarray  # us

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.t1 = np.asarray(self.t1, dtype=float)
        self.stderr = np.asarray(self.stderr, dtype=float)
        if not (self.times.shape == self.t1.shape == self.stderr.shape):
            raise ValueError("times, t1 and stderr must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("timestamps must be strictly increasing")
        if np.any(self.t1[np.isfinite(self.t1)] <= 0):
            raise ValueError("t1 values must be positive")

    def __len__(self):
        return len(self.times)

    def __eq__(self, other):
        if not isinstance(other, T1TimeSeries):
            return NotImplemented
        return (self.qubit_id == other.qubit_id
                and np.array_equal(self.times, other.times)
                and np.array_equal(self.t1, other.t1, equal_nan=True)
                and np.array_equal(self.stderr, other.stderr, equal_nan=True))


def _sample(p, shots, rng):
    if shots is None:
        return np.asarray(p, dtype=float)
    return rng.binomial(shots, p) / shots


def measure_p1(qubit: QubitModel, bath: BathState, shift, tau: float,
               shots: int | None, rng: np.random.Generator):
    """Excited-state population after ``tau`` us with the qubit Stark shifted by ``shift``."""
    if shots is not None and shots < 1:
        raise ValueError("shots must be >= 1")
    p = np.exp(-relaxation_rate(qubit, bath, shift) * tau)
    out = _sample(p, shots, rng)
    return float(out) if np.ndim(out) == 0 else out


def scan_amplitudes(qubit: QubitModel, grid: ScanGrid, on_error: str = "raise") -> np.ndarray:
    """Drive amplitude per grid point; the tone sits above the qubit for negative
    shifts and below it for positive ones."""
    amps = np.full(grid.shifts.shape, np.nan)
    for j, w in enumerate(grid.shifts):
        det = -grid.detuning if w < 0 else grid.detuning
        try:
            amps[j] = amplitude_for_shift(w, qubit.delta_q, det)
        except SignInfeasibleError as exc:
            if on_error == "raise":
                raise SignInfeasibleError(f"grid point {j} (shift {w:g} MHz): {exc}") from exc
    return amps


def spectroscopy_scan(qubit: QubitModel, bath: BathState, grid: ScanGrid,
                      rng: np.random.Generator, on_error: str = "raise") -> np.ndarray:
    """One P1 row over the grid with the bath frozen for the duration of the scan.

    With ``on_error="missing"`` unreachable shifts become NaN instead of raising.
    """
    amps = scan_amplitudes(qubit, grid, on_error)
    ok = np.isfinite(amps)
    row = np.full(grid.shifts.shape, np.nan)
    p = np.exp(-relaxation_rate(qubit, bath, grid.shifts[ok]) * grid.tau)
    row[ok] = _sample(p, grid.shots, rng)
    return row


# -- Ramsey calibration ---------------------------------------------------

@dataclass(frozen=True)
class RamseyResult:
    shift: float  # MHz
    stderr: float
    delays: np.ndarray
    px: np.ndarray
    py: np.ndarray


def ramsey_calibrate(qubit: QubitModel, tone: StarkTone, rng: np.random.Generator,
                     delays: Sequence[float] | None = None, shots: int = 1000,
                     t2_star: float = 30.0) -> RamseyResult:
    """Estimate the Stark shift from X/Y-started Ramsey fringes.

    The two quadratures form an analytic signal whose unwrapped phase is
    regressed on delay.  Delays default to 128 points over 2 us, giving an
    unaliased range of about +-30 MHz.
    """
    t = np.linspace(0.0, 2.0, 128) if delays is None else np.asarray(delays, dtype=float)
    if t.size < 8:
        raise ValueError("need at least 8 Ramsey delays")
    true_shift = stark_shift(qubit.delta_q, tone.omega_s_amp, tone.delta_qs)
    contrast = np.exp(-t / t2_star)
    phase = 2.0 * np.pi * true_shift * t
    px = _sample(0.5 * (1.0 + contrast * np.cos(phase)), shots, rng)
    py = _sample(0.5 * (1.0 + contrast * np.sin(phase)), shots, rng)

    z = (2.0 * px - 1.0) + 1j * (2.0 * py - 1.0)
    noise = 1.0 / math.sqrt(shots)
    if np.mean(np.abs(z)) < 3.0 * noise:
        raise FitError(f"fringe contrast {np.mean(np.abs(z)):.3g} below 3x shot noise {noise:.3g}")
    ph = np.unwrap(np.angle(z))
    X = np.column_stack([np.ones_like(t), t])
    coef, *_ = np.linalg.lstsq(X, ph, rcond=None)
    resid = ph - X @ coef
    dof = max(t.size - 2, 1)
    s2 = resid @ resid / dof
    cov = s2 * np.linalg.inv(X.T @ X)
    shift = coef[1] / (2.0 * np.pi)
    return RamseyResult(float(shift), float(math.sqrt(cov[1, 1]) / (2.0 * np.pi)), t, px, py)


@dataclass(frozen=True)
class StarkCurve:
    amplitudes: np.ndarray
    shifts: np.ndarray
    stderr: np.ndarray
    coefficients: np.ndarray  # quadratic fit, highest power first
    curvature: float


def fit_stark_curve(qubit: QubitModel, delta_qs: float, amplitudes: Sequence[float],
                    rng: np.random.Generator, **ramsey_kwargs) -> StarkCurve:
    """Ramsey-calibrate a sweep of drive amplitudes and fit shift vs amplitude."""
    amps = np.asarray(amplitudes, dtype=float)
    res = [ramsey_calibrate(qubit, StarkTone(delta_qs, a), rng, **ramsey_kwargs) for a in amps]
    shifts = np.array([r.shift for r in res])
    err = np.array([r.stderr for r in res])
    w = 1.0 / np.maximum(err, 1e-12)
    coef = np.polyfit(amps, shifts, 2, w=w)
    return StarkCurve(amps, shifts, err, coef, float(coef[0]))


# -- T1 decays ------------------------------------------------------------

def fit_exponential_decay(delays, samples, max_iter: int = 200, tol: float = 1e-12):
    """Least-squares fit of ``A exp(-t / T1)`` to each row of ``samples``.

    Vectorised Levenberg-Marquardt over the leading axis.  Returns arrays
    ``(A, T1, T1_stderr)``; rows that do not converge to a positive decay
    rate get NaN.
    """
    t = np.asarray(delays, dtype=float)
    y = np.atleast_2d(np.asarray(samples, dtype=float))
    n = t.size
    # weighted log-linear start
    w = np.clip(y, 1e-3, None)
    ly = np.log(w)
    sw = w.sum(1)
    tm = (w * t).sum(1) / sw
    lm = (w * ly).sum(1) / sw
    slope = (w * (t - tm[:, None]) * (ly - lm[:, None])).sum(1) / (w * (t - tm[:, None]) ** 2).sum(1)
    k = np.clip(-slope, 1e-6, None)
    amp = np.exp(lm + k * tm)
    lam = np.full(len(y), 1e-3)

    def ssr_of(a, kk):
        r = y - a[:, None] * np.exp(-kk[:, None] * t)
        return (r * r).sum(1)

    ssr = ssr_of(amp, k)
    for _ in range(max_iter):
        e = np.exp(-k[:, None] * t)
        r = y - amp[:, None] * e
        ja = e
        jk = -amp[:, None] * t * e
        aa, ak, kk_ = (ja * ja).sum(1), (ja * jk).sum(1), (jk * jk).sum(1)
        ga, gk = (ja * r).sum(1), (jk * r).sum(1)
        a11, a22 = aa * (1 + lam), kk_ * (1 + lam)
        det = a11 * a22 - ak * ak
        da = (a22 * ga - ak * gk) / det
        dk = (a11 * gk - ak * ga) / det
        amp_new, k_new = amp + da, k + dk
        valid = (k_new > 0) & np.isfinite(k_new) & np.isfinite(amp_new)
        ssr_new = np.where(valid, ssr_of(amp_new, np.where(valid, k_new, 1.0)), np.inf)
        better = ssr_new < ssr
        rel = np.where(better, (ssr - ssr_new) / np.maximum(ssr, 1e-300), 0.0)
        amp = np.where(better, amp_new, amp)
        k = np.where(better, k_new, k)
        ssr = np.where(better, ssr_new, ssr)
        lam = np.where(better, lam / 3.0, lam * 4.0)
        done = (better & (rel < tol)) | (lam > 1e12)
        if np.all(done):
            break

    e = np.exp(-k[:, None] * t)
    ja, jk = e, -amp[:, None] * t * e
    aa, ak, kk_ = (ja * ja).sum(1), (ja * jk).sum(1), (jk * jk).sum(1)
    det = aa * kk_ - ak * ak
    s2 = ssr / max(n - 2, 1)
    var_k = s2 * aa / det
    t1 = 1.0 / k
    t1_err = np.sqrt(var_k) / k**2
    bad = ~np.isfinite(t1) | (k <= 0)
    t1[bad] = np.nan
    t1_err[bad] = np.nan
    return amp, t1, t1_err


def _t1_from_samples(samples, delays, shots):
    floor = 2.0 * 0.5 / math.sqrt(shots)
    samples = np.atleast_2d(samples)
    _, t1, err = fit_exponential_decay(delays, samples)
    dead = np.all(samples < floor, axis=1)
    t1[dead] = np.nan
    err[dead] = np.nan
    return t1, err, dead


def measure_t1(qubit: QubitModel, bath: BathState, rng: np.random.Generator,
               delays: Sequence[float] = T1_DELAYS, shots: int = T1_SHOTS) -> tuple[float, float]:
    """Full decay measurement at zero Stark shift; returns ``(T1, stderr)`` in us."""
    t = np.asarray(delays, dtype=float)
    rate = relaxation_rate(qubit, bath, 0.0)
    samples = rng.binomial(shots, np.exp(-rate * t)) / shots
    t1, err, dead = _t1_from_samples(samples, t, shots)
    if dead[0]:
        raise FitError("all decay samples below twice the shot-noise floor")
    if not np.isfinite(t1[0]):
        raise FitError("exponential fit did not converge")
    return float(t1[0]), float(err[0])


# -- campaigns ------------------------------------------------------------

@dataclass(frozen=True)
class Schedule:
    t1_days: int = 0
    t1_interval_hr: float = 24.0
    n_scans: int = 0
    scan_interval_hr: float = 3.5
    scan_start_hr: float = 0.0

    def __post_init__(self):
        if self.t1_days < 0 or self.n_scans < 0:
            raise ValueError("t1_days and n_scans must be >= 0")
        if not (self.t1_interval_hr > 0 and self.scan_interval_hr > 0):
            raise ValueError("intervals must be positive")

    @staticmethod
    def scans_spanning(hours: float, interval: float) -> int:
        """Number of scans started at 0, interval, ... that fit within ``hours``."""
        return int(math.floor(hours / interval + 1e-9)) + 1

    @classmethod
    def default_campaign(cls) -> "Schedule":
        return cls(t1_days=250, n_scans=cls.scans_spanning(272.0, 3.5), scan_interval_hr=3.5)

    def t1_times(self) -> np.ndarray:
        return np.arange(self.t1_days) * self.t1_interval_hr

    def scan_times(self) -> np.ndarray:
        return self.scan_start_hr + np.arange(self.n_scans) * self.scan_interval_hr


@dataclass
class CampaignResult:
    t1_series: list[T1TimeSeries]
    maps: list[SpectroscopyMap]
    seed: int | None = None


def _run_qubit(qubit: QubitModel, schedule: Schedule, grid: ScanGrid,
               seed_seq: np.random.SeedSequence, t1_delays, t1_shots):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    bath = initial_bath(qubit, rng, stationary=True)
    t1_times, scan_times = schedule.t1_times(), schedule.scan_times()
    # T1 before scan at equal times
    events = sorted([(t, 0, i) for i, t in enumerate(t1_times)]
                    + [(t, 1, j) for j, t in enumerate(scan_times)])
    decays = np.empty((len(t1_times), len(t1_delays)))
    rows = np.full((len(scan_times), len(grid.shifts)), np.nan)
    for time, kind, idx in events:
        if time > bath.time:
            bath = evolve_bath(qubit, bath, time - bath.time, rng)
        if kind == 0:
            rate = relaxation_rate(qubit, bath, 0.0)
            decays[idx] = rng.binomial(t1_shots, np.exp(-rate * t1_delays)) / t1_shots
        else:
            rows[idx] = spectroscopy_scan(qubit, bath, grid, rng, on_error="missing")
    if len(t1_times):
        t1, err, _ = _t1_from_samples(decays, t1_delays, t1_shots)
    else:
        t1 = err = np.zeros(0)
    series = T1TimeSeries(qubit.qubit_id, t1_times, t1, err)
    smap = SpectroscopyMap(qubit.qubit_id, scan_times, grid, rows)
    return series, smap


def run_campaign(device: Sequence[QubitModel], schedule: Schedule, seed: int,
                 grid: ScanGrid | None = None, workers: int = 1,
                 t1_delays: Sequence[float] = T1_DELAYS, t1_shots: int = T1_SHOTS) -> CampaignResult:
    """Simulate daily T1 measurements and periodic spectroscopy scans.

    Every qubit owns a child stream spawned from ``seed`` so the result does not
    depend on ``workers``.  Failed fits and unreachable scan cells are NaN.
    """
    if seed is None:
        raise ValueError("an explicit seed is required")
    grid = ScanGrid.symmetric() if grid is None else grid
    children = np.random.SeedSequence(seed).spawn(len(device))
    delays = np.asarray(t1_delays, dtype=float)
    args = [(q, schedule, grid, c, delays, t1_shots) for q, c in zip(device, children)]
    if workers > 1 and len(device) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_run_qubit, *zip(*args)))
    else:
        out = [_run_qubit(*a) for a in args]
    return CampaignResult([s for s, _ in out], [m for _, m in out], seed)
