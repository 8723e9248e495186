"""Qubit, Stark tone and TLS bath model.

All frequencies are cyclic (``x / 2pi``) and expressed in MHz, times in
microseconds for relaxation and in hours for the bath clock.  Relaxation rates
are returned in 1/us.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

# Converts a Lorentzian golden-rule rate written with cyclic MHz couplings
# into 1/us.  This is the only place the factor enters.
RATE_PER_MHZ = 2.0 * math.pi

DEFAULT_POLE_GUARD = 1.0  # MHz


class PoleProximityError(ValueError):
    """Stark tone placed too close to a singularity of the shift formula."""


class SignInfeasibleError(ValueError):
    """Requested Stark shift has a sign the tone detuning cannot produce."""


@dataclass(frozen=True)
class TlsDefect:
    """A single two-level defect.

    ``mu_freq`` is the mean position relative to the bare qubit frequency (MHz),
    ``coupling_g`` and ``hwhm`` are in MHz.  The spectral diffusion is an
    Ornstein-Uhlenbeck process with rate ``ou_theta`` (1/hr) and strength
    ``ou_sigma`` (MHz/sqrt(hr)).
    """

    mu_freq: float
    coupling_g: float
    hwhm: float
    ou_theta: float = 0.0
    ou_sigma: float = 0.0

    def __post_init__(self):
        if self.coupling_g < 0:
            raise ValueError(f"coupling_g must be >= 0, got {self.coupling_g}")
        if not self.hwhm > 0:
            raise ValueError(f"hwhm must be > 0, got {self.hwhm}")
        if self.ou_theta < 0 or self.ou_sigma < 0:
            raise ValueError("ou_theta and ou_sigma must be >= 0")

    @property
    def stationary_std(self) -> float:
        """Standard deviation of the stationary frequency law (inf if theta == 0)."""
        if self.ou_theta == 0:
            return 0.0 if self.ou_sigma == 0 else math.inf
        return self.ou_sigma / math.sqrt(2.0 * self.ou_theta)


@dataclass(frozen=True)
class QubitModel:
    omega_q: float  # GHz
    delta_q: float  # MHz, anharmonicity
    gamma_0: float  # 1/us
    bath: tuple[TlsDefect, ...] = ()
    qubit_id: str = "Q0"

    def __post_init__(self):
        if not self.omega_q > 0:
            raise ValueError(f"omega_q must be > 0, got {self.omega_q}")
        if not self.delta_q < 0:
            raise ValueError(f"delta_q must be negative for a transmon, got {self.delta_q}")
        if self.gamma_0 < 0:
            raise ValueError(f"gamma_0 must be >= 0, got {self.gamma_0}")
        object.__setattr__(self, "bath", tuple(self.bath))

    @property
    def background_t1(self) -> float:
        return math.inf if self.gamma_0 == 0 else 1.0 / self.gamma_0

    def without_defect(self, index: int) -> "QubitModel":
        bath = self.bath[:index] + self.bath[index + 1 :]
        return replace(self, bath=bath)


@dataclass(frozen=True)
class StarkTone:
    """Off-resonant drive; ``delta_qs = omega_q - omega_s`` in MHz."""

    delta_qs: float
    omega_s_amp: float
    flat_duration: float = 50.0  # us
    rise_sigma: float = 10.0  # ns, gaussian-square with 2 sigma rise/fall

    def __post_init__(self):
        if self.omega_s_amp < 0:
            raise ValueError("omega_s_amp must be >= 0")
        if self.delta_qs == 0:
            raise ValueError("delta_qs must be nonzero")


@dataclass
class BathState:
    time: float  # hours
    freqs: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.freqs = np.asarray(self.freqs, dtype=float)

    def copy(self) -> "BathState":
        return BathState(self.time, self.freqs.copy())


def _check_poles(delta_q: float, delta_qs: float, guard: float) -> None:
    if abs(delta_qs) < guard or abs(delta_q + delta_qs) < guard:
        raise PoleProximityError(
            f"tone detuning {delta_qs} MHz is within {guard} MHz of a pole "
            f"(0 or {-delta_q} MHz)"
        )


def stark_shift(delta_q, omega_s_amp, delta_qs, guard: float = DEFAULT_POLE_GUARD):
    """Duffing-oscillator AC Stark shift of the 0-1 transition (MHz).

    Works elementwise on ``omega_s_amp``.
    """
    _check_poles(delta_q, delta_qs, guard)
    amp = np.asarray(omega_s_amp, dtype=float)
    shift = delta_q * amp**2 / (2.0 * delta_qs * (delta_q + delta_qs))
    return float(shift) if shift.ndim == 0 else shift


def shift_per_amp2(delta_q: float, delta_qs: float, guard: float = DEFAULT_POLE_GUARD) -> float:
    """Curvature of the Stark shift, i.e. shift / amplitude**2."""
    return stark_shift(delta_q, 1.0, delta_qs, guard)


def amplitude_for_shift(target, delta_q: float, delta_qs: float,
                        guard: float = DEFAULT_POLE_GUARD):
    """Drive amplitude producing ``target`` MHz of Stark shift."""
    k = shift_per_amp2(delta_q, delta_qs, guard)
    tgt = np.asarray(target, dtype=float)
    bad = tgt * k < 0
    if np.any(bad):
        sign = "negative" if k < 0 else "positive"
        offending = tgt[bad] if tgt.ndim else tgt
        raise SignInfeasibleError(
            f"detuning {delta_qs} MHz only produces {sign} shifts; "
            f"requested {np.atleast_1d(offending)[0]:g} MHz"
        )
    amp = np.sqrt(tgt / k) if k != 0 else np.zeros_like(tgt)
    return float(amp) if amp.ndim == 0 else amp


def relaxation_rate(qubit: QubitModel, bath: BathState, probe_offset):
    """Total relaxation rate (1/us) with the qubit shifted by ``probe_offset`` MHz.

    Each defect contributes a Lorentzian ``2 g^2 G / (G^2 + d^2)``; ``probe_offset``
    may be an array.
    """
    freqs = np.asarray(bath.freqs, dtype=float)
    if freqs.shape != (len(qubit.bath),):
        raise ValueError(
            f"bath has {freqs.size} frequencies but qubit {qubit.qubit_id} "
            f"has {len(qubit.bath)} defects"
        )
    x = np.asarray(probe_offset, dtype=float)
    rate = np.full(x.shape, float(qubit.gamma_0))
    if freqs.size:
        g = np.array([d.coupling_g for d in qubit.bath])
        hw = np.array([d.hwhm for d in qubit.bath])
        detuning = x[..., None] - freqs
        rate = rate + RATE_PER_MHZ * np.sum(2.0 * g**2 * hw / (hw**2 + detuning**2), axis=-1)
    return float(rate) if rate.ndim == 0 else rate


def _ou_arrays(qubit: QubitModel):
    mu = np.array([d.mu_freq for d in qubit.bath], dtype=float)
    theta = np.array([d.ou_theta for d in qubit.bath], dtype=float)
    sigma = np.array([d.ou_sigma for d in qubit.bath], dtype=float)
    return mu, theta, sigma


def ou_transition(f, mu, theta, sigma, dt):
    """Mean and std of the exact OU transition density after ``dt`` hours."""
    f, mu, theta, sigma = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (f, mu, theta, sigma)))
    decay = np.exp(-theta * dt)
    mean = mu + (f - mu) * decay
    # theta -> 0 limit of sigma^2 (1 - e^{-2 theta dt}) / (2 theta) is sigma^2 dt
    with np.errstate(divide="ignore", invalid="ignore"):
        var = np.where(theta > 0, sigma**2 * -np.expm1(-2.0 * theta * dt) / (2.0 * theta),
                       sigma**2 * dt)
    return mean, np.sqrt(var)


def evolve_bath(qubit: QubitModel, bath: BathState, dt: float,
                rng: np.random.Generator) -> BathState:
    """Advance every defect frequency by ``dt`` hours using the exact OU update."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    mu, theta, sigma = _ou_arrays(qubit)
    mean, std = ou_transition(bath.freqs, mu, theta, sigma, dt)
    eta = rng.standard_normal(mean.shape)
    return BathState(bath.time + dt, mean + std * eta)


def initial_bath(qubit: QubitModel, rng: np.random.Generator | None = None,
                 stationary: bool = True, time: float = 0.0) -> BathState:
    """Bath at ``time``: defects at their means, or drawn from the stationary law."""
    mu, theta, sigma = _ou_arrays(qubit)
    if not stationary or rng is None:
        return BathState(time, mu.copy())
    std = np.array([d.stationary_std for d in qubit.bath], dtype=float)
    std = np.where(np.isfinite(std), std, 0.0)
    return BathState(time, mu + std * rng.standard_normal(mu.shape))


def random_bath(rng: np.random.Generator, n_defects: int = 20, span: float = 30.0,
                coupling_range: tuple[float, float] = (0.01, 0.06),
                hwhm_range: tuple[float, float] = (0.3, 1.5),
                theta: float = 1.0 / 24.0,
                stationary_std_range: tuple[float, float] = (1.0, 4.0)) -> tuple[TlsDefect, ...]:
    """Draw a bath of defects spread uniformly over ``+-span`` MHz.

    Couplings and linewidths are log-uniform within their ranges; every defect
    shares the mean-reversion rate ``theta`` (1/hr) and gets a stationary
    frequency spread drawn log-uniformly from ``stationary_std_range`` (MHz).
    """
    def loguniform(lo, hi, size):
        return np.exp(rng.uniform(np.log(lo), np.log(hi), size))

    mu = rng.uniform(-span, span, n_defects)
    g = loguniform(*coupling_range, n_defects)
    hw = loguniform(*hwhm_range, n_defects)
    std = loguniform(*stationary_std_range, n_defects)
    sig = std * np.sqrt(2.0 * theta)
    return tuple(
        TlsDefect(float(m), float(c), float(h), float(theta), float(s))
        for m, c, h, s in zip(mu, g, hw, sig)
    )


def random_device(n_qubits: int, rng: np.random.Generator, *,
                  omega_q: float = 5.0, delta_q: float = -340.0,
                  t1_background: tuple[float, float] = (200.0, 400.0),
                  coupling_scale: tuple[float, float] = (0.7, 1.4),
                  **bath_kwargs) -> list[QubitModel]:
    """A synthetic device whose qubits differ in background T1 and TLS coupling.

    ``t1_background`` and ``coupling_scale`` are log-uniform ranges that stand in
    for qubit-to-qubit process variation.
    """
    qubits = []
    for k in range(n_qubits):
        t1_bg = math.exp(rng.uniform(math.log(t1_background[0]), math.log(t1_background[1])))
        scale = math.exp(rng.uniform(math.log(coupling_scale[0]), math.log(coupling_scale[1])))
        bath = random_bath(rng, **bath_kwargs)
        bath = tuple(replace(d, coupling_g=d.coupling_g * scale) for d in bath)
        qubits.append(QubitModel(omega_q=omega_q, delta_q=delta_q, gamma_0=1.0 / t1_bg,
                                 bath=bath, qubit_id=f"Q{k}"))
    return qubits


def bath_from_freqs(freqs: Sequence[float], time: float = 0.0) -> BathState:
    return BathState(time, np.asarray(freqs, dtype=float))
