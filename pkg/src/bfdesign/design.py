"""Critical regions, exact operating characteristics and sample-size search.

Decision regions are level sets of ln BF01 over y = 0..n.  For the
directional test ln BF01 is strictly decreasing in y, and for the point
null it is strictly concave, so every level set is a tail, a pair of tails
or an interval.  Boundaries are located by Brent's method on the
continuous extension in y and then settled by evaluating BF01 at the
neighbouring integers, so the result is exactly the integer set.

Operating characteristics are sums of the exact prior-predictive pmf over
those regions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq
from scipy.special import digamma

from . import bayesfactor as bfm
from .bayesfactor import AnalysisPrior, OneSided, PointNull
from .errors import DomainError, NotAttainableError
from .predictive import region_logpmf
from .priors import PointMass, TruncatedBeta

# Probabilities closer than this to a target count as equal to it.  The
# flat-prior point-null power is a ratio of integers, so exact ties occur.
TIE_TOL = 1e-10
# ln BF01 values this close to a threshold are ties and join neither the
# "below" nor the "above" set.  Exact ties such as BF01 = 1 at y = n/2 under
# p0 = 1/2 otherwise land on either side depending on rounding.
LOG_BF_TIE = 1e-12
K_MIN = 1e-8
K_MAX = 1.0
LOG_K_TOL = 1e-6


def _flat_truncation(analysis, lower, upper):
    return TruncatedBeta(analysis.a, analysis.b, lower, upper)


@dataclass(frozen=True)
class DesignConfig:
    """Everything that fixes the operating characteristics at a given n."""

    test: OneSided | PointNull
    analysis: AnalysisPrior
    design_h0: TruncatedBeta | PointMass
    design_h1: TruncatedBeta | PointMass
    k: float
    indecisive_band: tuple = (1.0 / 3.0, 3.0)

    def __post_init__(self):
        if not isinstance(self.test, (OneSided, PointNull)):
            raise DomainError(f"unknown test {self.test!r}")
        if not (isinstance(self.k, (int, float)) and math.isfinite(self.k) and self.k > 0):
            raise DomainError(f"evidence threshold k must be positive and finite, got {self.k!r}")
        object.__setattr__(self, "k", float(self.k))
        lo, hi = self.indecisive_band
        if not (0 < lo < hi and math.isfinite(hi)):
            raise DomainError(f"indecisive band needs 0 < lo < hi, got {self.indecisive_band!r}")
        object.__setattr__(self, "indecisive_band", (float(lo), float(hi)))
        p0 = self.test.p0
        if isinstance(self.test, OneSided):
            if _support(self.design_h0)[1] > p0:
                raise DomainError(f"H0 design prior must be supported within [0, {p0}]")
            if _support(self.design_h1)[0] < p0:
                raise DomainError(f"H1 design prior must be supported within [{p0}, 1]")
        else:
            if not (isinstance(self.design_h0, PointMass) and self.design_h0.p == p0):
                raise DomainError(f"point-null H0 design prior must be point:{p0}")

    @classmethod
    def one_sided(cls, p0, k, analysis=None, design_h0=None, design_h1=None, **kw):
        """Directional test; design priors default to the truncated analysis prior."""
        analysis = analysis or AnalysisPrior()
        design_h0 = design_h0 or _flat_truncation(analysis, 0.0, p0)
        design_h1 = design_h1 or _flat_truncation(analysis, p0, 1.0)
        return cls(OneSided(p0), analysis, design_h0, design_h1, k, **kw)

    @classmethod
    def point_null(cls, p0, k, analysis=None, design_h1=None, **kw):
        """Point-null test; the H1 design prior defaults to the analysis prior."""
        analysis = analysis or AnalysisPrior()
        design_h1 = design_h1 or TruncatedBeta(analysis.a, analysis.b)
        return cls(PointNull(p0), analysis, PointMass(p0), design_h1, k, **kw)

    def with_k(self, k):
        return replace(self, k=k)


def _support(prior):
    if isinstance(prior, PointMass):
        return prior.p, prior.p
    return prior.lower, prior.upper


@dataclass(frozen=True)
class Region:
    """A subset of {0..n} stored as sorted, disjoint, non-adjacent runs."""

    n: int
    intervals: tuple = ()

    @classmethod
    def from_mask(cls, mask):
        mask = np.asarray(mask, dtype=bool)
        n = mask.size - 1
        padded = np.concatenate(([False], mask, [False]))
        edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
        runs = tuple((int(s), int(e) - 1) for s, e in zip(edges[::2], edges[1::2]))
        return cls(n, runs)

    @classmethod
    def from_runs(cls, n, runs):
        mask = np.zeros(n + 1, dtype=bool)
        for lo, hi in runs:
            if lo <= hi:
                mask[max(lo, 0):min(hi, n) + 1] = True
        return cls.from_mask(mask)

    def mask(self):
        m = np.zeros(self.n + 1, dtype=bool)
        for lo, hi in self.intervals:
            m[lo:hi + 1] = True
        return m

    def indices(self):
        if not self.intervals:
            return np.zeros(0, dtype=int)
        return np.concatenate([np.arange(lo, hi + 1) for lo, hi in self.intervals])

    def __contains__(self, y):
        return any(lo <= y <= hi for lo, hi in self.intervals)

    def __len__(self):
        return sum(hi - lo + 1 for lo, hi in self.intervals)

    def __and__(self, other):
        return Region.from_mask(self.mask() & other.mask())

    def __or__(self, other):
        return Region.from_mask(self.mask() | other.mask())

    def complement(self):
        return Region.from_mask(~self.mask())

    @property
    def kind(self):
        runs = self.intervals
        if not runs:
            return "empty"
        if runs == ((0, self.n),):
            return "full"
        if len(runs) == 1:
            lo, hi = runs[0]
            if hi == self.n:
                return "upper-tail"
            if lo == 0:
                return "lower-tail"
            return "interval"
        if len(runs) == 2 and runs[0][0] == 0 and runs[1][1] == self.n:
            return "two-tail"
        return "union"

    @property
    def y_crit(self):
        """Smallest y of an upper-tail (or full) region, else None."""
        if self.kind in ("upper-tail", "full"):
            return self.intervals[-1][0]
        return None

    def __str__(self):
        if not self.intervals:
            return "{}"
        parts = [f"{lo}..{hi}" if hi > lo else f"{lo}" for lo, hi in self.intervals]
        return "{" + ", ".join(parts) + "}"


class Metric(enum.Enum):
    POWER = "power"
    TYPE1 = "t1e"
    H0_EVIDENCE = "h0evidence"

    @property
    def higher_is_better(self):
        return self is not Metric.TYPE1


@dataclass(frozen=True)
class OperatingCharacteristics:
    n: int
    power: float
    type1: float
    h0_evidence: float
    indecisive_h0: float
    indecisive_h1: float

    def metric(self, metric: Metric):
        return {Metric.POWER: self.power, Metric.TYPE1: self.type1,
                Metric.H0_EVIDENCE: self.h0_evidence}[metric]


# ---------------------------------------------------------------------------
# level sets of ln BF01


class _Evaluator:
    """Cached integer and continuous evaluations of ln BF01 at fixed n."""

    def __init__(self, config, n):
        self.n = n
        self.cont = bfm.ScalarLogBF(config.test, n, config.analysis)
        self._cache = {}

    def at(self, y):
        v = self._cache.get(y)
        if v is None:
            v = self._cache[y] = self.cont(float(y))
        return v


def _first_true(pred, f, lo, hi):
    """First integer in [lo, hi] where the monotone (false->true) ``pred``
    holds, or hi + 1.  ``f`` is a continuous function changing sign near
    the boundary; it only provides the starting guess."""
    if lo > hi or pred(lo):
        return lo
    if not pred(hi):
        return hi + 1
    try:
        r = brentq(f, lo, hi, xtol=1e-9, rtol=4 * np.finfo(float).eps)
        c = min(max(math.ceil(r), lo + 1), hi)
    except ValueError:
        c = None
    if c is None:
        # the two code paths disagree about the sign at an endpoint; bisect on integers
        a, b = lo, hi
        while b - a > 1:
            mid = (a + b) // 2
            if pred(mid):
                b = mid
            else:
                a = mid
        return b
    while c - 1 > lo and pred(c - 1):
        c -= 1
    while not pred(c):
        c += 1
    return c


def _argmax_integer(config, n, ev):
    """Integer maximizer of ln BF01 on 0..n (0 for the directional test)."""
    if isinstance(config.test, OneSided):
        return 0
    p0, a, b = config.test.p0, config.analysis.a, config.analysis.b
    slope0 = math.log(p0) - math.log1p(-p0)

    def g(y):
        return slope0 - digamma(a + y) + digamma(b + n - y)

    if g(0.0) <= 0.0:
        return 0
    if g(float(n)) >= 0.0:
        return n
    ys = brentq(g, 0.0, float(n), xtol=1e-10)
    lo = min(max(math.floor(ys), 0), n)
    hi = min(lo + 1, n)
    return hi if ev.at(hi) > ev.at(lo) else lo


def level_set(config, n, log_t, below, method="root"):
    """{y : ln BF01(y) < log_t} if ``below`` else {y : ln BF01(y) > log_t}.

    Values within LOG_BF_TIE of ``log_t`` count as equal to it.

    ``method="scan"`` evaluates every y; ``"root"`` locates the boundaries by
    root finding.  Both return the same region.
    """
    n = _check_n(n)
    log_t = log_t - LOG_BF_TIE if below else log_t + LOG_BF_TIE
    if method == "scan":
        lbf = bfm.log_bf01_support(config.test, n, config.analysis)
        return Region.from_mask(lbf < log_t if below else lbf > log_t)
    if method != "root":
        raise ValueError(f"unknown method {method!r}")
    ev = _Evaluator(config, n)
    m = _argmax_integer(config, n, ev)

    def f(y):
        return ev.cont(y) - log_t

    if below:
        if ev.at(m) < log_t:
            return Region(n, ((0, n),))
        # left branch: ln BF rises towards m, so "below" holds on a prefix
        left_end = _first_true(lambda y: not ev.at(y) < log_t, lambda y: -f(y), 0, m) - 1
        right_start = _first_true(lambda y: ev.at(y) < log_t, f, m, n)
        return Region.from_runs(n, [(0, left_end), (right_start, n)])
    if not ev.at(m) > log_t:
        return Region(n, ())
    start = _first_true(lambda y: ev.at(y) > log_t, f, 0, m)
    end = _first_true(lambda y: not ev.at(y) > log_t, lambda y: -f(y), m, n) - 1
    return Region.from_runs(n, [(start, end)])


def _check_n(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return int(n)


def rejection_set(config, n, method="root"):
    """Exactly {y : BF01(y) < k}."""
    return level_set(config, n, math.log(config.k), below=True, method=method)


def acceptance_set(config, n, method="root"):
    """Exactly {y : BF01(y) > 1/k}."""
    return level_set(config, n, -math.log(config.k), below=False, method=method)


def indecisive_set(config, n, method="root"):
    """{y : lo < BF01(y) < hi} for the configured indecisive band."""
    lo, hi = config.indecisive_band
    return (level_set(config, n, math.log(lo), below=False, method=method)
            & level_set(config, n, math.log(hi), below=True, method=method))


def region_probability(region, prior, n):
    """Prior-predictive probability of ``region`` under ``prior``."""
    n = _check_n(n)
    if region.n != n:
        raise DomainError(f"region is over 0..{region.n}, not 0..{n}")
    if not region.intervals:
        return 0.0
    total = float(np.sum(np.exp(region_logpmf(n, prior, region.indices()))))
    return min(max(total, 0.0), 1.0)


def operating_characteristics(config, n, method="root"):
    n = _check_n(n)
    rej = rejection_set(config, n, method)
    acc = acceptance_set(config, n, method)
    ind = indecisive_set(config, n, method)
    return OperatingCharacteristics(
        n=n,
        power=region_probability(rej, config.design_h1, n),
        type1=region_probability(rej, config.design_h0, n),
        h0_evidence=region_probability(acc, config.design_h0, n),
        indecisive_h0=region_probability(ind, config.design_h0, n),
        indecisive_h1=region_probability(ind, config.design_h1, n),
    )


def metric_value(config, n, metric: Metric, method="root"):
    """Only the one probability ``metric`` needs."""
    if metric is Metric.POWER:
        return region_probability(rejection_set(config, n, method), config.design_h1, n)
    if metric is Metric.TYPE1:
        return region_probability(rejection_set(config, n, method), config.design_h0, n)
    return region_probability(acceptance_set(config, n, method), config.design_h0, n)


def meets_target(metric: Metric, value, target, strict=True):
    """Whether ``value`` satisfies the calibration inequality.

    Power and compelling-null evidence must exceed the target (strictly when
    ``strict``), the type-I error may not exceed it.  Values within TIE_TOL
    of the target are treated as equal to it.
    """
    if metric is Metric.TYPE1:
        return value <= target + TIE_TOL
    if strict:
        return value > target + TIE_TOL
    return value >= target - TIE_TOL


@dataclass(frozen=True)
class SampleSizeQuery:
    metric: Metric
    target: float
    n_min: int = 1
    n_max: int = 100000
    stability_window: int = 10
    strict: bool = True

    def __post_init__(self):
        if not 0.0 < self.target < 1.0:
            raise DomainError(f"target must lie in (0, 1), got {self.target}")
        if not 1 <= self.n_min <= self.n_max:
            raise DomainError(f"need 1 <= n_min <= n_max, got {self.n_min}, {self.n_max}")
        if self.stability_window < 0:
            raise DomainError("stability window must be nonnegative")


@dataclass(frozen=True)
class SampleSizeResult:
    n: int
    characteristics: OperatingCharacteristics
    checked: tuple = field(default=(), repr=False)


def find_sample_size(config, query: SampleSizeQuery, method="root"):
    """Smallest n whose metric meets the target at n and at the next
    ``stability_window`` sample sizes as well.

    n advances one at a time: the metric oscillates in n, so bisection
    over n would be unsound.
    """
    metric = query.metric
    best = None
    run_start = None
    values = []
    n = query.n_min
    while True:
        if run_start is None and n > query.n_max:
            break
        v = metric_value(config, n, metric, method)
        values.append((n, v))
        if best is None or (v > best if metric.higher_is_better else v < best):
            best = v
        if meets_target(metric, v, query.target, query.strict):
            if run_start is None:
                run_start = n
            if n - run_start >= query.stability_window:
                window = tuple(val for m, val in values if m >= run_start)
                return SampleSizeResult(run_start, operating_characteristics(config, run_start, method),
                                        window)
        else:
            run_start = None
        n += 1
    direction = "above" if metric.higher_is_better else "at most"
    raise NotAttainableError(
        f"{metric.value} never stays {direction} {query.target} for {query.stability_window} "
        f"further sample sizes with n <= {query.n_max}; best value seen {best!r}", best=best)


def find_threshold(config, n, metric: Metric, target, k_min=K_MIN, k_max=K_MAX, strict=True):
    """Most stringent evidence threshold k meeting ``target`` at this n.

    Power and compelling-null evidence: the smallest k (largest 1/k) whose
    metric meets the target.  Type-I error: the largest k whose error stays
    at or below the target, i.e. the calibration boundary.  Bisection over
    ln k; the returned value always satisfies the target.
    """
    n = _check_n(n)
    if not 0.0 < target < 1.0:
        raise DomainError(f"target must lie in (0, 1), got {target}")

    def ok(log_k):
        v = metric_value(config.with_k(math.exp(log_k)), n, metric)
        return meets_target(metric, v, target, strict)

    lo, hi = math.log(k_min), math.log(k_max)
    if metric is Metric.TYPE1:
        # satisfied for small k
        if not ok(lo):
            raise NotAttainableError(f"type-I error exceeds {target} even at k={k_min}")
        if ok(hi):
            return k_max
        good, bad = lo, hi
    else:
        # satisfied for large k
        if not ok(hi):
            best = metric_value(config.with_k(k_max), n, metric)
            raise NotAttainableError(f"{metric.value} stays below {target} for every k <= {k_max}",
                                     best=best)
        if ok(lo):
            return k_min
        good, bad = hi, lo
    while abs(good - bad) > LOG_K_TOL:
        mid = 0.5 * (good + bad)
        if ok(mid):
            good = mid
        else:
            bad = mid
    return math.exp(good)


def curve(config, n_values, method="root"):
    """Operating characteristics for each n in ``n_values``."""
    return [operating_characteristics(config, int(n), method) for n in n_values]
