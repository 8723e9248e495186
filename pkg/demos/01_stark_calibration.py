"""Stark-shift calibration.

Drive a qubit off-resonantly, measure the frequency shift with Ramsey
fringes and compare it with the dispersive formula.  Then fit the shift
against drive amplitude to recover the quadratic coefficient used to
convert a target shift into a tone amplitude.
"""

import numpy as np

from starkt1 import QubitModel, StarkTone, amplitude_for_shift, stark_shift
from starkt1.model import shift_per_amp2
from starkt1.protocol import fit_stark_curve, ramsey_calibrate

qubit = QubitModel(omega_q=5.0, delta_q=-340.0, gamma_0=1 / 100.0)
rng = np.random.default_rng(0)

# -- one tone ------------------------------------------------------------------
# 50 MHz below the qubit with amplitude 30 pushes it down by ~7.85 MHz
tone = StarkTone(delta_qs=-50.0, omega_s_amp=30.0)
print(f"analytic shift      : {stark_shift(qubit.delta_q, 30.0, -50.0):+.4f} MHz")
r = ramsey_calibrate(qubit, tone, rng, shots=10_000)
print(f"Ramsey estimate     : {r.shift:+.4f} +- {r.stderr:.4f} MHz")

# -- both signs ------------------------------------------------------------------
# a tone above the qubit shifts it up; each side only reaches one sign
for target in (-20.0, -5.0, 5.0, 20.0):
    dqs = -50.0 if target < 0 else 50.0
    amp = amplitude_for_shift(target, qubit.delta_q, dqs)
    r = ramsey_calibrate(qubit, StarkTone(dqs, amp), rng, shots=10_000)
    print(f"target {target:+6.1f} MHz  amp {amp:6.2f}  measured {r.shift:+8.3f}")

# -- quadratic curve -----------------------------------------------------------
amps = np.linspace(5, 45, 9)
curve = fit_stark_curve(qubit, -50.0, amps, rng, shots=10_000)
print(f"fitted curvature    : {curve.curvature:.6f} MHz per amp^2")
print(f"dispersive value    : {shift_per_amp2(qubit.delta_q, -50.0):.6f}")
