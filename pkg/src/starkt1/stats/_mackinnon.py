"""Response-surface constants for Dickey-Fuller tau statistics (one I(1) series).

p-values: MacKinnon, J.G. (1994), "Approximate asymptotic distribution
functions for unit-root and cointegration tests", J. Bus. Econ. Stat. 12(2).
The p-value is ``Phi(poly(tau))`` with the small-p polynomial below ``tau_star``
and the large-p polynomial above it; coefficients are lowest order first.

Critical values: MacKinnon, J.G. (2010), "Critical values for cointegration
tests", Queen's Economics Dept. WP 1227; ``cv = b0 + b1/T + b2/T^2 + b3/T^3``.

Key ``"c"`` is the constant-only regression, ``"ct"`` constant plus linear trend.
"""

TAU_MAX = {"c": 2.74, "ct": 0.70}
TAU_MIN = {"c": -18.83, "ct": -16.18}
TAU_STAR = {"c": -1.61, "ct": -2.89}

TAU_SMALLP = {
    "c": (2.1659, 1.4412, 0.038269),
    "ct": (3.2512, 1.6047, 0.049588),
}

TAU_LARGEP = {
    "c": (1.7339, 0.93202, -0.12745, -0.010368),
    "ct": (2.5261, 0.61654, -0.37956, -0.060285),
}

CRITICAL_2010 = {
    "c": {
        "1%": (-3.43035, -6.5393, -16.786, -79.433),
        "5%": (-2.86154, -2.8903, -4.234, -40.04),
        "10%": (-2.56677, -1.5384, -2.809, 0.0),
    },
    "ct": {
        "1%": (-3.95877, -9.0531, -28.428, -134.155),
        "5%": (-3.41049, -4.3904, -9.036, -45.374),
        "10%": (-3.12705, -2.5856, -3.925, -22.38),
    },
}
