"""Reference computations that share no code with the package.

They lean on scipy (Boost special functions, adaptive quadrature) and on
elementary identities, so agreement with them is evidence rather than
self-consistency.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate, special, stats


def binom_upper_tail(n, k, p):
    """P(X >= k) for X ~ Bin(n, p) by direct summation."""
    return math.fsum(math.comb(n, j) * p**j * (1 - p) ** (n - j) for j in range(k, n + 1))


def split_quad(f, lo, hi, epsrel=1e-11):
    """Adaptive quadrature on [lo, hi] split geometrically towards both ends.

    Beta kernels with shape < 1 are nearly singular close to 0 or 1; the
    geometric breakpoints let quad resolve them.
    """
    w = hi - lo
    cuts = sorted({lo, hi, *(lo + w * 10.0**-k for k in range(1, 15)), *(hi - w * 10.0**-k for k in range(1, 15))})
    cuts = [c for c in cuts if lo <= c <= hi]
    with warnings.catch_warnings():
        # slivers near an endpoint cannot always reach epsrel; they carry no weight
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return math.fsum(integrate.quad(f, u, v, epsabs=1e-15, epsrel=epsrel, limit=200)[0]
                         for u, v in zip(cuts[:-1], cuts[1:]) if v > u)


def trunc_beta_pdf(p, a, b, lower, upper):
    mass = special.betainc(a, b, upper) - special.betainc(a, b, lower)
    if p < lower or p > upper:
        return 0.0
    return stats.beta.pdf(p, a, b) / mass


def predictive_pmf_quad(n, y, a, b, lower=0.0, upper=1.0):
    """Integral of Bin(y | n, p) against the truncated Beta density."""
    mass = special.betainc(a, b, upper) - special.betainc(a, b, lower)

    def f(p):
        return stats.binom.pmf(y, n, p) * stats.beta.pdf(p, a, b)

    # the integrand peaks near y/n; give quad that breakpoint
    pts = [min(max(y / n, lower), upper)]
    val, _ = integrate.quad(f, lower, upper, points=pts, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val / mass


def log_bf_two_sided_direct(n, p0, a, b):
    """ln BF01 of the point-null test at every y via scipy's gammaln."""
    y = np.arange(n + 1, dtype=float)
    lb = special.gammaln(a) + special.gammaln(b) - special.gammaln(a + b)
    lby = special.gammaln(a + y) + special.gammaln(b + n - y) - special.gammaln(a + b + n)
    return y * np.log(p0) + (n - y) * np.log1p(-p0) + lb - lby


def log_bf_one_sided_recurrence(n, p0, a, b):
    """ln BF01 of the directional test at every y, without a continued fraction.

    With T(y) = I_x(a+y, b+n-y) and x = p0, consecutive values differ by a
    single Beta-binomial-like term:

        T(j) - T(j+1) = x**(a+j) (1-x)**(b+n-j-1) Gamma(a+b+n) / (Gamma(a+j+1) Gamma(b+n-j))

    so T(y) and 1 - T(y) are sums of positive terms anchored at T(n) and
    1 - T(0), which scipy supplies.  Both sums are accumulated in log space.
    """
    x = p0
    A, B = a, b + n
    j = np.arange(n, dtype=float)
    t = ((A + j) * math.log(x) + (B - j - 1) * math.log1p(-x)
         + special.gammaln(A + B) - special.gammaln(A + j + 1) - special.gammaln(B - j))
    with np.errstate(divide="ignore"):
        log_t_end = math.log(special.betainc(a + n, b, x)) if special.betainc(a + n, b, x) > 0 else -math.inf
        log_c_start = math.log(special.betaincc(a, b + n, x)) if special.betaincc(a, b + n, x) > 0 else -math.inf
    cum = np.concatenate(([-np.inf], np.logaddexp.accumulate(t))) if n else np.array([-np.inf])
    rev = np.concatenate((np.logaddexp.accumulate(t[::-1])[::-1], [-np.inf])) if n else np.array([-np.inf])
    log_i = np.logaddexp(log_t_end, rev)
    log_c = np.logaddexp(log_c_start, cum)
    prior = math.log(special.betaincc(a, b, x)) - math.log(special.betainc(a, b, x))
    return log_i - log_c + prior


def brute_force_lbf(config, n):
    from bfdesign.bayesfactor import OneSided

    t, pr = config.test, config.analysis
    if isinstance(t, OneSided):
        return log_bf_one_sided_recurrence(n, t.p0, pr.a, pr.b)
    return log_bf_two_sided_direct(n, t.p0, pr.a, pr.b)


# Golden values of the phase II informativeness sweep as printed:
# (a_d, b_d, n, power %, type-I %, FP %, FT1E %)
TABLE1_K10 = [
    (1.0, 1, 110, 90.05, 0.16, 99.63, 2.47),
    (2.3, 3, 196, 90.12, 0.24, 100.00, 2.44),
    (3.7, 5, 183, 90.18, 0.35, 100.00, 2.47),
    (5.0, 7, 170, 90.15, 0.46, 99.99, 2.48),
    (6.3, 9, 157, 90.25, 0.56, 99.98, 2.48),
    (7.7, 11, 132, 90.31, 0.75, 99.92, 2.70),
    (9.0, 13, 123, 90.25, 0.80, 99.84, 2.56),
    (10.3, 15, 111, 90.24, 0.99, 99.70, 2.79),
    (11.7, 17, 106, 90.45, 0.97, 99.55, 2.53),
    (13.0, 19, 98, 90.35, 1.12, 99.30, 2.66),
    (14.3, 21, 94, 90.49, 1.22, 99.14, 2.72),
    (15.7, 23, 86, 90.36, 1.37, 98.67, 2.84),
    (17.0, 25, 85, 90.06, 1.23, 98.37, 2.47),
    (18.3, 27, 85, 90.45, 1.27, 98.37, 2.47),
    (19.7, 29, 81, 90.46, 1.35, 97.98, 2.51),
    (21.0, 31, 81, 90.78, 1.39, 97.98, 2.51),
    (22.3, 33, 77, 90.39, 1.46, 97.50, 2.54),
    (23.7, 35, 77, 90.87, 1.50, 97.50, 2.54),
    (25.0, 37, 73, 90.33, 1.57, 96.89, 2.57),
]

TABLE1_K3 = [
    (1.0, 1, 61, 90.49, 0.94, 98.24, 8.79),
    (2.3, 3, 108, 90.37, 1.24, 99.92, 8.09),
    (3.7, 5, 112, 90.38, 1.61, 99.94, 7.79),
    (5.0, 7, 99, 90.17, 2.13, 99.85, 7.92),
    (6.3, 9, 90, 90.05, 2.48, 99.71, 7.70),
    (7.7, 11, 82, 90.38, 3.12, 99.54, 8.29),
    (9.0, 13, 74, 90.58, 3.82, 99.29, 8.92),
    (10.3, 15, 73, 90.59, 3.62, 99.10, 7.95),
    (11.7, 17, 65, 90.44, 4.27, 98.60, 8.50),
    (13.0, 19, 61, 90.53, 4.73, 98.24, 8.79),
    (14.3, 21, 60, 90.17, 4.29, 97.79, 7.72),
    (15.7, 23, 60, 90.65, 4.45, 97.79, 7.72),
    (17.0, 25, 56, 90.42, 4.81, 97.22, 7.95),
    (18.3, 27, 56, 90.81, 4.94, 97.22, 7.95),
    (19.7, 29, 52, 90.37, 5.29, 96.50, 8.17),
    (21.0, 31, 52, 90.69, 5.41, 96.50, 8.17),
    (22.3, 33, 52, 90.99, 5.51, 96.50, 8.17),
    (23.7, 35, 48, 90.30, 5.84, 95.58, 8.38),
    (25.0, 37, 48, 90.54, 5.93, 95.58, 8.38),
]


def random_config(rng, continuous_k=True):
    """A random but valid design configuration."""
    from bfdesign.bayesfactor import AnalysisPrior
    from bfdesign.design import DesignConfig
    from bfdesign.priors import PointMass, TruncatedBeta

    p0 = float(rng.uniform(0.2, 0.8))
    analysis = AnalysisPrior(float(rng.uniform(0.5, 5)), float(rng.uniform(0.5, 5)))
    if continuous_k:
        k = float(math.exp(rng.uniform(math.log(1 / 30), math.log(0.5))))
    else:
        k = float(rng.choice([1 / 3, 1 / 10]))
    ad, bd = float(rng.uniform(0.5, 10)), float(rng.uniform(0.5, 10))
    point = rng.uniform() < 0.3
    if rng.uniform() < 0.5:
        if point:
            h0 = PointMass(float(rng.uniform(0.05, p0)))
            h1 = PointMass(float(rng.uniform(p0, 0.95)))
        else:
            h0 = TruncatedBeta(ad, bd, 0.0, p0)
            h1 = TruncatedBeta(ad, bd, p0, 1.0)
        return DesignConfig.one_sided(p0, k, analysis, h0, h1)
    h1 = PointMass(float(rng.uniform(0.05, 0.95))) if point else TruncatedBeta(ad, bd)
    return DesignConfig.point_null(p0, k, analysis, h1)
