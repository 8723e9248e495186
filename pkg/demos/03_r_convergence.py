"""How many repeated measurements before a device's T1 ranking is trustworthy?

Each qubit has a true mean T1 and every measurement scatters around it by
20%.  Pearson R between running averages and the true means climbs with the
number of repeats N.  The closed-form expectation (sampled over the same
device spreads) is printed alongside the Monte Carlo.
"""

import numpy as np

from starkt1.stats import RSimConfig, sample_analytic_r, simulate_r_convergence

for n_qubits in (10, 4):
    cfg = RSimConfig(n_qubits=n_qubits)
    conv = simulate_r_convergence(cfg, np.random.default_rng(0))
    analytic, _ = sample_analytic_r(conv.betas, cfg.alpha, conv.n)
    print(f"\n{n_qubits} qubits, {cfg.n_devices} devices")
    print("   N   <R> MC   std    analytic")
    for n in (1, 2, 5, 10, 20, 40, 80, 160):
        i = n - 1
        print(f"{n:4d}   {conv.mean_r[i]:.3f}   {conv.std_r[i]:.3f}   {analytic[i]:.3f}")
