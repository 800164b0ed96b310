"""Prior-predictive distribution of the success count y out of n trials.

Under a truncated Beta prior the predictive is a truncated Beta-binomial:

    f(y) = C(n, y) B(a+y, b+n-y) [I_u - I_l](a+y, b+n-y) / (B(a, b) [I_u - I_l](a, b))

and under a point mass it is the binomial pmf.  Everything is computed in
log space and exponentiated last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import specfun
from .errors import DomainError
from .priors import PointMass, TruncatedBeta


@dataclass(frozen=True)
class PredictiveSpec:
    n: int
    prior: TruncatedBeta | PointMass

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))


def log_binom_coef(n, y):
    """ln C(n, y) = -ln(n+1) - ln B(y+1, n-y+1); ``y`` may be an array."""
    y = np.asarray(y, dtype=float)
    out = -math.log(n + 1.0) - specfun.log_beta(y + 1.0, n - y + 1.0)
    return float(out) if np.ndim(out) == 0 else out


def _check_y(n, y):
    if np.ndim(y) == 0:
        if isinstance(y, bool) or int(y) != y or not 0 <= y <= n:
            raise DomainError(f"y must be an integer in [0, {n}], got {y!r}")
        return
    y = np.asarray(y)
    if np.any((y < 0) | (y > n) | (np.floor(y) != y)):
        raise DomainError(f"y must hold integers in [0, {n}]")


def _logpmf(n, prior, y):
    y = np.asarray(y, dtype=float)
    lc = log_binom_coef(n, y)
    if isinstance(prior, PointMass):
        p = prior.p
        return lc + y * math.log(p) + (n - y) * math.log1p(-p)
    a, b = prior.a, prior.b
    ap = a + y
    bp = b + n - y
    lmass = specfun.log_interval_mass(prior.lower, prior.upper, ap, bp)
    return lc + specfun.log_beta(ap, bp) + lmass - specfun.log_beta(a, b) - prior.log_mass


def prior_predictive_logpmf(spec: PredictiveSpec, y):
    """Log prior-predictive probability of ``y`` successes (scalar or array)."""
    _check_y(spec.n, y)
    out = _logpmf(spec.n, spec.prior, y)
    return float(out) if np.ndim(out) == 0 else out


def prior_predictive_pmf(spec: PredictiveSpec, y):
    out = np.exp(prior_predictive_logpmf(spec, y))
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=256)
def _support_logpmf(n, prior):
    out = _logpmf(n, prior, np.arange(n + 1))
    out.setflags(write=False)
    return out


def support_logpmf(n, prior):
    """Read-only array of log pmf values for y = 0..n (cached)."""
    return _support_logpmf(int(n), prior)


def region_logpmf(n, prior, ys):
    """Log pmf at the integer array ``ys`` without validation or caching."""
    return np.atleast_1d(_logpmf(int(n), prior, np.asarray(ys, dtype=float)))
