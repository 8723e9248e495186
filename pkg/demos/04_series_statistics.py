"""Statistics of daily T1 series.

A 250-day T1 record is examined for memory (autocorrelation), stationarity
(augmented Dickey-Fuller), its shape (skew and kurtosis), and whether time
averages can stand in for ensemble averages (partition ergodicity test).
"""

import numpy as np

from starkt1 import Schedule, random_device, run_campaign
from starkt1.stats import adf_test, autocorrelation, ergodicity_partition_test, moments_and_normality

device = random_device(3, np.random.default_rng([7, 1]))
res = run_campaign(device, Schedule(t1_days=250), 7)

for s in res.t1_series:
    x = s.t1[np.isfinite(s.t1)]
    print(f"\n== {s.qubit_id}: mean {x.mean():.1f} us, std {x.std(ddof=1):.1f} us")

    acf = autocorrelation(x, 10)
    print("ACF lags 0-10:", np.array2string(acf, precision=2))

    adf = adf_test(x)
    print(f"ADF t={adf.t_stat:.2f} p={adf.p_value:.1e} lags={adf.lags_used} "
          f"-> {'stationary' if adf.rejects(0.05) else 'unit root not rejected'}")

    m = moments_and_normality(x)
    print(f"skew {m.skew:+.2f} (p={m.skew_p:.2f}), excess kurtosis {m.kurtosis:+.2f} (p={m.kurtosis_p:.2f})")

    erg = ergodicity_partition_test(x, [2, 5, 10])
    for k, p in erg.partitions.items():
        print(f"  k={k:2d}: {p.rejection_fraction():.0%} of ensemble indices differ from the time mean, "
              f"{p.dependent.sum()}/{k} subsets fail the runs test")

# a drifting series for contrast: subsets are monotone, so runs tests flag them
drift = ergodicity_partition_test(np.arange(250.0), [5])
print("\nlinear drift, k=5: runs test flags", drift.partitions[5].dependent.sum(), "of 5 subsets")
