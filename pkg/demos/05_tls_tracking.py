"""Tracking defects through repeated Stark scans.

Seven defects diffuse in frequency over 175 hours of scans taken every
3.5 hours.  Dips in each scan are collected, grouped per defect, histogrammed
and fitted with a Gaussian whose width gives the diffusion constants.
"""

import math

import numpy as np

from starkt1 import QubitModel, Schedule, TlsDefect, run_campaign
from starkt1.tracking import TrackConfig, accumulate_tracks, fit_tracks

theta = 1 / 24.0  # 1/hr, mean reversion
centres = [-19.3, -16.9, -7.9, -0.97, 1.2, 9.9, 22.6]
widths = [0.65, 0.55, 1.06, 0.16, 0.23, 1.03, 0.78]  # stationary std, MHz
bath = tuple(TlsDefect(c, 0.05, 0.3, theta, w * math.sqrt(2 * theta)) for c, w in zip(centres, widths))
qubit = QubitModel(5.0, -340.0, 1 / 250.0, bath)

res = run_campaign([qubit], Schedule(n_scans=Schedule.scans_spanning(175, 3.5)), 11)
smap = res.maps[0]
print(f"{smap.p1.shape[0]} scans x {smap.p1.shape[1]} shifts")

# neighbouring defects wander into each other's range, so windows are
# declared at the midpoints instead of auto-clustered
edges = [-25.0] + [0.5 * (a + b) for a, b in zip(centres, centres[1:])] + [25.0]
tracks = accumulate_tracks(smap, TrackConfig(windows=tuple(zip(edges[:-1], edges[1:]))))

print("  window (MHz)      hits   mu     sigma   D_K        D_1d")
for (lo, hi), pos, fit in zip(tracks.windows, tracks.assignments, fit_tracks(tracks)):
    if fit is None:
        print(f"  [{lo:6.1f},{hi:6.1f}]  {pos.size:4d}   fit failed")
        continue
    lw, d = fit
    print(f"  [{lo:6.1f},{hi:6.1f}]  {pos.size:4d}  {lw.mu:6.2f}  {lw.sigma:5.2f}  {d.d_k:.3e}  {d.d_1d:.3e}")
