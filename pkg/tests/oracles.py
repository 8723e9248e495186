"""Independent brute-force reference implementations.

Plain Python loops with ``math.fsum``; nothing here imports the package, so a
shared bug cannot hide on both sides of a comparison.
"""

import math
from fractions import Fraction


def stark_shift_exact(delta_q, amp, delta_qs):
    dq, a, d = Fraction(delta_q), Fraction(amp), Fraction(delta_qs)
    return float(dq * a * a / (2 * d * (dq + d)))


def rate(gamma_0, defects, freqs, x):
    """defects: list of (g, hwhm)."""
    terms = [gamma_0]
    for (g, hw), f in zip(defects, freqs):
        terms.append(2 * math.pi * 2 * g * g * hw / (hw * hw + (x - f) ** 2))
    return math.fsum(terms)


def mean(values):
    v = [x for x in values if x == x]
    return math.fsum(v) / len(v)


def freq_time_p1(shifts, p1_rows, delta_omega, n_slices):
    total, count = [], 0
    for i in range(n_slices):
        for j, w in enumerate(shifts):
            if abs(w) <= delta_omega + 1e-9 and p1_rows[i][j] == p1_rows[i][j]:
                total.append(p1_rows[i][j])
                count += 1
    return math.fsum(total) / count


def freq_time_t1(shifts, p1_rows, delta_omega, n_slices, tau):
    vals = []
    for i in range(n_slices):
        for j, w in enumerate(shifts):
            p = p1_rows[i][j]
            if abs(w) <= delta_omega + 1e-9 and 0 < p < 1:
                vals.append(-tau / math.log(p))
    return math.fsum(vals) / len(vals)


def ensemble_t1(shifts, row, delta_omega, chi, tau):
    s = int(math.floor(2 * delta_omega / chi + 1e-9)) + 1
    vals = []
    for j in range(s):
        target = -delta_omega + j * chi
        best = min(range(len(shifts)), key=lambda k: abs(shifts[k] - target))
        p = row[best]
        if 0 < p < 1:
            vals.append(-tau / math.log(p))
    return math.fsum(vals) / len(vals)


def prefix_means(values):
    out = []
    for k in range(1, len(values) + 1):
        out.append(math.fsum(values[:k]) / k)
    return out


def acf(values, max_lag):
    n = len(values)
    m = math.fsum(values) / n
    d = [v - m for v in values]
    c0 = math.fsum(x * x for x in d)
    out = []
    for k in range(max_lag + 1):
        out.append(math.fsum(d[i] * d[i + k] for i in range(n - k)) / c0)
    return out


def pearson(x, y):
    n = len(x)
    mx, my = math.fsum(x) / n, math.fsum(y) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def analytic_r(betas, alpha, n):
    a = alpha / math.sqrt(n)
    s2 = math.fsum(b * b for b in betas)
    num = s2 + a * math.fsum(betas)
    den = math.sqrt(s2 * math.fsum((b + a) ** 2 for b in betas))
    return num / den


def runs_count(values, cutoff):
    signs = [v > cutoff for v in values if v != cutoff]
    runs = 1
    for a, b in zip(signs, signs[1:]):
        if a != b:
            runs += 1
    return runs, sum(signs), len(signs) - sum(signs)
