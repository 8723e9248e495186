import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from starkt1.model import (
    RATE_PER_MHZ,
    BathState,
    PoleProximityError,
    QubitModel,
    SignInfeasibleError,
    TlsDefect,
    amplitude_for_shift,
    bath_from_freqs,
    evolve_bath,
    initial_bath,
    ou_transition,
    random_bath,
    random_device,
    relaxation_rate,
    stark_shift,
)

import oracles


def test_stark_shift_zero_drive():
    assert stark_shift(-340.0, 0.0, -50.0) == 0.0


def test_stark_shift_hand_value():
    got = stark_shift(-340.0, 30.0, -50.0)
    assert got == pytest.approx(-7.846153846153846, rel=1e-12)
    assert got == pytest.approx(oracles.stark_shift_exact(-340, 30, -50), rel=1e-12)


def test_tone_above_qubit_gives_negative_shift():
    assert stark_shift(-340.0, 60.0, -50.0) < 0
    assert stark_shift(-340.0, 60.0, 50.0) > 0


@pytest.mark.parametrize("dqs", [0.5, -0.5, 339.5, 340.0])
def test_pole_guard(dqs):
    with pytest.raises(PoleProximityError):
        stark_shift(-340.0, 10.0, dqs)


def test_pole_guard_configurable():
    stark_shift(-340.0, 10.0, 0.5, guard=0.1)
    with pytest.raises(PoleProximityError):
        stark_shift(-340.0, 10.0, 5.0, guard=10.0)


@given(amp=st.floats(0.0, 200.0), dqs=st.sampled_from([-80.0, -50.0, -20.0, 20.0, 50.0, 400.0]))
def test_quadratic_and_even(amp, dqs):
    s1 = stark_shift(-340.0, amp, dqs)
    assert stark_shift(-340.0, 2 * amp, dqs) == pytest.approx(4 * s1, rel=1e-12, abs=1e-300)
    assert stark_shift(-340.0, -amp, dqs) == s1


@given(dq=st.floats(-500, -50), dqs=st.floats(-1000, 1000), amp=st.floats(1, 100))
def test_sign_rule(dq, dqs, amp):
    if abs(dqs) < 1 or abs(dq + dqs) < 1:
        return
    s = stark_shift(dq, amp, dqs)
    assert np.sign(s) == -np.sign(dqs * (dq + dqs))


def test_amplitude_for_shift_examples():
    assert amplitude_for_shift(0.0, -340.0, -50.0) == 0.0
    assert amplitude_for_shift(-7.846153846153846, -340.0, -50.0) == pytest.approx(30.0, rel=1e-12)
    with pytest.raises(SignInfeasibleError, match="negative"):
        amplitude_for_shift(5.0, -340.0, -50.0)


@given(target=st.floats(0.001, 40.0), dqs=st.sampled_from([-50.0, 50.0, -120.0, 25.0]))
def test_amplitude_round_trip(target, dqs):
    sign = np.sign(stark_shift(-340.0, 1.0, dqs))
    t = sign * target
    amp = amplitude_for_shift(t, -340.0, dqs)
    assert stark_shift(-340.0, amp, dqs) == pytest.approx(t, rel=1e-9)


def test_amplitude_vectorised():
    tg = np.array([-1.0, -5.0, -20.0])
    amps = amplitude_for_shift(tg, -340.0, -50.0)
    np.testing.assert_allclose(stark_shift(-340.0, amps, -50.0), tg, rtol=1e-12)


def _qubit(defects, gamma_0=0.005):
    return QubitModel(5.0, -340.0, gamma_0, tuple(TlsDefect(0.0, g, hw) for g, hw in defects))


def test_rate_empty_bath():
    q = QubitModel(5.0, -340.0, 0.01)
    assert relaxation_rate(q, BathState(0.0), 3.0) == 0.01


def test_rate_on_resonance_and_half_width():
    q = _qubit([(0.05, 0.4)])
    bath = bath_from_freqs([-8.0])
    peak = RATE_PER_MHZ * 2 * 0.05**2 / 0.4
    assert relaxation_rate(q, bath, -8.0) == pytest.approx(0.005 + peak, rel=1e-14)
    assert relaxation_rate(q, bath, -8.4) == pytest.approx(0.005 + peak / 2, rel=1e-14)


def test_rate_matches_loop_oracle():
    rng = np.random.default_rng(3)
    bath_def = random_bath(rng)
    q = QubitModel(5.0, -340.0, 0.004, bath_def)
    b = initial_bath(q, rng)
    xs = rng.uniform(-30, 30, 100)
    got = relaxation_rate(q, b, xs)
    want = [oracles.rate(0.004, [(d.coupling_g, d.hwhm) for d in bath_def], b.freqs, x) for x in xs]
    np.testing.assert_allclose(got, want, rtol=1e-12)


def test_rate_bath_mismatch():
    q = _qubit([(0.05, 0.4)])
    with pytest.raises(ValueError, match="frequencies"):
        relaxation_rate(q, bath_from_freqs([1.0, 2.0]), 0.0)


@settings(max_examples=50)
@given(seed=st.integers(0, 2**32 - 1), drop=st.integers(0, 19))
def test_removing_defect_never_raises_rate(seed, drop):
    rng = np.random.default_rng(seed)
    q = QubitModel(5.0, -340.0, 0.003, random_bath(rng))
    b = initial_bath(q, rng)
    xs = np.linspace(-30, 30, 301)
    full = relaxation_rate(q, b, xs)
    q2 = q.without_defect(drop)
    b2 = bath_from_freqs(np.delete(b.freqs, drop))
    assert np.all(relaxation_rate(q2, b2, xs) <= full)
    assert np.all(full >= q.gamma_0)


def test_invalid_types():
    with pytest.raises(ValueError):
        TlsDefect(0.0, -0.1, 0.5)
    with pytest.raises(ValueError):
        TlsDefect(0.0, 0.1, 0.0)
    with pytest.raises(ValueError):
        QubitModel(5.0, 100.0, 0.01)
    with pytest.raises(ValueError):
        QubitModel(5.0, -340.0, -0.01)


def test_frozen_bath():
    q = QubitModel(5.0, -340.0, 0.01, (TlsDefect(2.0, 0.05, 0.5),))
    b = bath_from_freqs([2.7])
    b2 = evolve_bath(q, b, 10.0, np.random.default_rng(0))
    assert b2.freqs[0] == 2.7
    assert b2.time == 10.0


def test_evolve_requires_positive_dt():
    q = QubitModel(5.0, -340.0, 0.01, (TlsDefect(2.0, 0.05, 0.5, 0.1, 0.2),))
    with pytest.raises(ValueError):
        evolve_bath(q, bath_from_freqs([0.0]), 0.0, np.random.default_rng(0))


def test_ou_transition_moments_monte_carlo():
    mu, theta, sigma, f0, dt = 1.5, 0.2, 0.8, -2.0, 3.0
    q = QubitModel(5.0, -340.0, 0.01, (TlsDefect(mu, 0.05, 0.5, theta, sigma),))
    draws = np.array([evolve_bath(q, bath_from_freqs([f0]), dt, np.random.default_rng(s)).freqs[0]
                      for s in range(10_000)])
    m = mu + (f0 - mu) * math.exp(-theta * dt)
    v = sigma**2 / (2 * theta) * (1 - math.exp(-2 * theta * dt))
    n = draws.size
    assert abs(draws.mean() - m) < 3 * math.sqrt(v / n)
    # var of sample variance for a normal is 2 v^2 / (n - 1)
    assert abs(draws.var(ddof=1) - v) < 3 * v * math.sqrt(2 / (n - 1))


def test_ou_long_dt_is_stationary():
    mean, std = ou_transition(5.0, 1.0, 0.5, 0.6, 1e4)
    assert mean == pytest.approx(1.0)
    assert std == pytest.approx(0.6 / math.sqrt(1.0), rel=1e-12)


def test_ou_theta_zero_is_brownian():
    mean, std = ou_transition(0.3, 0.0, 0.0, 0.5, 4.0)
    assert mean == 0.3 and std == pytest.approx(1.0)


def test_ou_trajectory_acf():
    theta, dt = 0.25, 1.0
    q = QubitModel(5.0, -340.0, 0.01, (TlsDefect(0.0, 0.05, 0.5, theta, 1.0),))
    rng = np.random.default_rng(11)
    b = initial_bath(q, rng)
    traj = np.empty(10_000)
    for i in range(traj.size):
        b = evolve_bath(q, b, dt, rng)
        traj[i] = b.freqs[0]
    lags = np.arange(1, 11)
    acf = np.array(oracles.acf(list(traj), 10))[1:]
    model = np.exp(-theta * lags * dt)
    r2 = 1 - np.sum((acf - model) ** 2) / np.sum((acf - acf.mean()) ** 2)
    assert r2 > 0.95


def test_determinism():
    dev1 = random_device(3, np.random.default_rng(5))
    dev2 = random_device(3, np.random.default_rng(5))
    assert dev1 == dev2
    q = dev1[0]
    b1 = evolve_bath(q, initial_bath(q, np.random.default_rng(1)), 2.0, np.random.default_rng(2))
    b2 = evolve_bath(q, initial_bath(q, np.random.default_rng(1)), 2.0, np.random.default_rng(2))
    assert b1.freqs.tobytes() == b2.freqs.tobytes()


def test_random_bath_shape():
    bath = random_bath(np.random.default_rng(0))
    assert len(bath) == 20
    assert all(-30 <= d.mu_freq <= 30 for d in bath)
    assert all(0.01 <= d.coupling_g <= 0.06 for d in bath)


def test_initial_bath_at_means():
    q = QubitModel(5.0, -340.0, 0.01, (TlsDefect(2.0, 0.05, 0.5, 0.1, 0.3),))
    assert initial_bath(q, stationary=False).freqs[0] == 2.0
