"""Which short measurement best predicts a qubit's long-time T1?

Simulate a 10-qubit device whose TLS defects wander in frequency, measure
daily T1 for 250 days plus one Stark-swept scan, and compare how well two
quick estimates rank the qubits against their 250-day averages:

* a single T1 measurement on day one
* the T1 averaged over a +-5 MHz window of the Stark scan
"""

import numpy as np

from starkt1 import EstimatorConfig, Schedule, mean_t1_freq_time, random_device, run_campaign
from starkt1.stats import pearson_r

cfg = EstimatorConfig(delta_omega=5.0)
r_window, r_single = [], []

for seed in range(20):
    device = random_device(10, np.random.default_rng([seed, 1]))
    res = run_campaign(device, Schedule(t1_days=250, n_scans=1), seed)
    long = [np.nanmean(s.t1) for s in res.t1_series]
    window = [mean_t1_freq_time(m, cfg).value for m in res.maps]
    single = [s.t1[0] for s in res.t1_series]
    r_window.append(pearson_r(window, long).r)
    r_single.append(pearson_r(single, long).r)
    if seed == 0:
        print("qubit  long-time  window  day-one  (us)")
        for q, a, b, c in zip(device, long, window, single):
            print(f"{q.qubit_id:>5}  {a:9.1f}  {b:6.1f}  {c:7.1f}")

print(f"\nmean R over 20 devices: window {np.mean(r_window):.3f}, "
      f"single {np.mean(r_single):.3f}")
