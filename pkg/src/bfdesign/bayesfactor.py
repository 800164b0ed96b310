"""Closed-form Bayes factors BF01 for a binomial proportion.

Two tests are supported:

* :class:`OneSided` -- H0: p <= p0 against H1: p > p0, with the analysis
  prior Beta(a, b) truncated to [0, p0] under H0 and to [p0, 1] under H1;
* :class:`PointNull` -- H0: p = p0 against H1: p != p0 with Beta(a, b)
  under H1.

All values are natural logs.  The ``*_cont`` variants accept real ``y``
and are the continuous extensions used for root finding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import DomainError


def _check_p0(p0):
    if isinstance(p0, bool) or not isinstance(p0, (int, float)) or not 0.0 < p0 < 1.0:
        raise DomainError(f"p0 must lie in (0, 1), got {p0!r}")
    return float(p0)


@dataclass(frozen=True)
class OneSided:
    p0: float

    def __post_init__(self):
        object.__setattr__(self, "p0", _check_p0(self.p0))

    name = "one-sided"


@dataclass(frozen=True)
class PointNull:
    p0: float

    def __post_init__(self):
        object.__setattr__(self, "p0", _check_p0(self.p0))

    name = "two-sided"


TestSpec = OneSided | PointNull


@dataclass(frozen=True)
class AnalysisPrior:
    """Beta(a, b) analysis prior shared by both hypotheses."""

    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        for name in ("a", "b"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not (math.isfinite(v) and v > 0):
                raise DomainError(f"analysis prior {name} must be finite and positive, got {v!r}")
            object.__setattr__(self, name, float(v))


def _check_data(y, n, allow_zero_n=False):
    if isinstance(n, bool) or int(n) != n or n < (0 if allow_zero_n else 1):
        raise DomainError(f"n must be a {'nonnegative' if allow_zero_n else 'positive'} integer, got {n!r}")
    if np.ndim(y) == 0:
        if isinstance(y, bool) or int(y) != y or not 0 <= y <= n:
            raise DomainError(f"y must be an integer in [0, {n}], got {y!r}")
    else:
        y = np.asarray(y)
        if np.any((y < 0) | (y > n) | (np.floor(y) != y)):
            raise DomainError(f"y must hold integers in [0, {n}]")


def log_bf01_one_sided_cont(y, n, p0, prior: AnalysisPrior):
    """ln BF01 for H0: p <= p0, real ``y`` in [0, n] allowed.

    BF01 is the posterior odds of p <= p0 divided by the prior odds, both
    under the untruncated Beta analysis prior.  The logs of I and 1 - I are
    each accurate, so the ratio never cancels.
    """
    li, lc = specfun.log_reg_inc_beta_pair(p0, prior.a + np.asarray(y, dtype=float),
                                           prior.b + n - np.asarray(y, dtype=float))
    li0, lc0 = specfun.log_reg_inc_beta_pair(p0, prior.a, prior.b)
    with np.errstate(invalid="ignore"):
        out = (li - lc) + (lc0 - li0)
    return float(out) if np.ndim(out) == 0 else out


def log_bf01_two_sided_cont(y, n, p0, prior: AnalysisPrior):
    """ln BF01 for H0: p = p0, real ``y`` in [0, n] allowed."""
    y = np.asarray(y, dtype=float)
    out = (y * math.log(p0) + (n - y) * math.log1p(-p0)
           + specfun.log_beta(prior.a, prior.b) - specfun.log_beta(prior.a + y, prior.b + n - y))
    return float(out) if np.ndim(out) == 0 else out


def log_bf01_one_sided(y, n, p0, prior: AnalysisPrior = AnalysisPrior()):
    """ln BF01 of the directional test.

    Returns -inf or +inf only when the posterior mass below p0 is 0 or 1 at
    working precision; see :func:`is_saturated`.
    """
    _check_data(y, n)
    return log_bf01_one_sided_cont(y, n, _check_p0(p0), prior)


def log_bf01_two_sided(y, n, p0, prior: AnalysisPrior = AnalysisPrior()):
    """ln BF01 of the point-null test; ``n = 0`` gives 0."""
    _check_data(y, n, allow_zero_n=True)
    return log_bf01_two_sided_cont(y, n, _check_p0(p0), prior)


def is_saturated(log_bf):
    """True where a log Bayes factor overflowed to +/-inf."""
    return np.isinf(log_bf)


def log_bf01(test: TestSpec, y, n, prior: AnalysisPrior = AnalysisPrior()):
    if isinstance(test, OneSided):
        return log_bf01_one_sided(y, n, test.p0, prior)
    if isinstance(test, PointNull):
        return log_bf01_two_sided(y, n, test.p0, prior)
    raise TypeError(f"unknown test {test!r}")


def bf01(test: TestSpec, y, n, prior: AnalysisPrior = AnalysisPrior()):
    return np.exp(log_bf01(test, y, n, prior))


def log_bf01_cont(test: TestSpec, y, n, prior: AnalysisPrior):
    if isinstance(test, OneSided):
        return log_bf01_one_sided_cont(y, n, test.p0, prior)
    return log_bf01_two_sided_cont(y, n, test.p0, prior)


def log_bf01_support(test: TestSpec, n, prior: AnalysisPrior):
    """ln BF01 at every y = 0..n, as an array."""
    return np.atleast_1d(log_bf01(test, np.arange(n + 1), n, prior))


class ScalarLogBF:
    """Fast scalar ln BF01(y) at fixed (test, n, prior) for root finding.

    Skips argument validation and uses the pure-``math`` kernels; values
    agree with :func:`log_bf01` to rounding error.
    """

    def __init__(self, test: TestSpec, n, prior: AnalysisPrior):
        self.n = n
        self.a = prior.a
        self.b = prior.b
        self.p0 = test.p0
        self.one_sided = isinstance(test, OneSided)
        if self.one_sided:
            li0, lc0 = specfun._log_inc_beta_pair(self.p0, self.a, self.b)
            self.offset = lc0 - li0
        else:
            self.offset = specfun._log_beta(self.a, self.b)
            self.lp = math.log(self.p0)
            self.lq = math.log1p(-self.p0)

    def __call__(self, y):
        a = self.a + y
        b = self.b + self.n - y
        if self.one_sided:
            li, lc = specfun._log_inc_beta_pair(self.p0, a, b)
            return (li - lc) + self.offset
        return y * self.lp + (self.n - y) * self.lq + self.offset - specfun._log_beta(a, b)
