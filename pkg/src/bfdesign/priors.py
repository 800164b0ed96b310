"""Truncated Beta and point-mass priors for a binomial success probability."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import specfun
from .errors import DegenerateCenteringError, DomainError


@dataclass(frozen=True)
class TruncatedBeta:
    """Beta(a, b) restricted to [lower, upper] and renormalized."""

    a: float
    b: float
    lower: float = 0.0
    upper: float = 1.0

    def __post_init__(self):
        for name in ("a", "b", "lower", "upper"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise DomainError(f"{name} must be a finite real, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.a <= 0 or self.b <= 0:
            raise DomainError(f"shape parameters must be positive, got a={self.a}, b={self.b}")
        if not 0.0 <= self.lower < self.upper <= 1.0:
            raise DomainError(f"need 0 <= lower < upper <= 1, got [{self.lower}, {self.upper}]")
        if self.log_mass == -math.inf:
            raise DomainError("truncation interval carries no probability mass")

    @cached_property
    def log_mass(self):
        """ln[I_upper(a, b) - I_lower(a, b)]."""
        return specfun.log_interval_mass(self.lower, self.upper, self.a, self.b)

    @property
    def is_truncated(self):
        return self.lower > 0.0 or self.upper < 1.0

    def __str__(self):
        return format_prior(self)


@dataclass(frozen=True)
class PointMass:
    """All prior mass on a single success probability ``p``."""

    p: float

    def __post_init__(self):
        p = self.p
        if isinstance(p, bool) or not isinstance(p, (int, float)) or not 0.0 < p < 1.0:
            raise DomainError(f"point mass location must lie in (0, 1), got {p!r}")
        object.__setattr__(self, "p", float(p))

    def __str__(self):
        return format_prior(self)


DesignPrior = TruncatedBeta | PointMass


def _check_p(p, name="p"):
    if np.ndim(p) == 0:
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {p}")
        return
    p = np.asarray(p, dtype=float)
    if not np.all((p >= 0.0) & (p <= 1.0)):
        raise DomainError(f"{name} must lie in [0, 1]")


def _edge_density(prior, shape):
    # limit of the Beta density at 0 (shape = a) or 1 (shape = b)
    if shape < 1.0:
        return math.inf
    if shape == 1.0:
        return math.exp(-specfun.log_beta(prior.a, prior.b) - prior.log_mass)
    return 0.0


def trunc_beta_pdf(prior: TruncatedBeta, p):
    """Density of the truncated Beta prior; zero outside [lower, upper].

    At the open-boundary points p = 0 and p = 1 the Beta density is taken as
    its limit (0, the constant, or +inf).
    """
    _check_p(p)
    if np.ndim(p) == 0:
        p = float(p)
        if not prior.lower <= p <= prior.upper:
            return 0.0
        if p == 0.0 or p == 1.0:
            return _edge_density(prior, prior.a if p == 0.0 else prior.b)
        return math.exp(specfun.log_beta_pdf(p, prior.a, prior.b) - prior.log_mass)
    p = np.asarray(p, dtype=float)
    out = np.zeros(p.shape)
    inside = (p >= prior.lower) & (p <= prior.upper)
    interior = inside & (p > 0.0) & (p < 1.0)
    if np.any(interior):
        out[interior] = np.exp(specfun.log_beta_pdf(p[interior], prior.a, prior.b) - prior.log_mass)
    out[inside & (p == 0.0)] = _edge_density(prior, prior.a)
    out[inside & (p == 1.0)] = _edge_density(prior, prior.b)
    return out


def trunc_beta_cdf(prior: TruncatedBeta, x):
    """CDF of the truncated Beta prior, clamped to [0, 1]."""
    _check_p(x, "x")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.where(x >= prior.upper, 1.0, 0.0)
    inside = (x > prior.lower) & (x < prior.upper)
    if np.any(inside):
        lm = specfun.log_interval_mass(prior.lower, x[inside], prior.a, prior.b)
        out[inside] = np.clip(np.exp(lm - prior.log_mass), 0.0, 1.0)
    return float(out[0]) if scalar else out


def trunc_beta_mean(prior: TruncatedBeta):
    """Mean a/(a+b) * mass(a+1, b) / mass(a, b) of the truncated Beta."""
    a, b = prior.a, prior.b
    lm1 = specfun.log_interval_mass(prior.lower, prior.upper, a + 1.0, b)
    mean = a / (a + b) * math.exp(lm1 - prior.log_mass)
    return min(max(mean, prior.lower), prior.upper)


def trunc_beta_mode(prior: TruncatedBeta):
    """Mode of the truncated Beta: the interior Beta mode clamped to the support."""
    if prior.a <= 1.0 or prior.b <= 1.0:
        raise DomainError(
            f"Beta({prior.a}, {prior.b}) has no unique interior mode; need a > 1 and b > 1")
    m = (prior.a - 1.0) / (prior.a + prior.b - 2.0)
    return min(max(m, prior.lower), prior.upper)


def mode_centered_a(p1, b_d):
    """Shape ``a`` placing the Beta(a, b_d) mode at ``p1``."""
    if not 0.0 < p1 < 1.0:
        raise DomainError(f"p1 must lie in (0, 1), got {p1}")
    if not b_d > 1.0:
        raise DomainError(f"mode centering needs b_d > 1, got {b_d}")
    a = (p1 * (b_d - 2.0) + 1.0) / (1.0 - p1)
    if a <= 1.0:
        raise DegenerateCenteringError(
            f"centering at p1={p1} with b_d={b_d} gives a_d={a} <= 1, which has no interior mode")
    return a


def mean_centered_b(p1, a_d):
    """Shape ``b`` giving the untruncated Beta(a_d, b) mean ``p1``."""
    if not 0.0 < p1 < 1.0:
        raise DomainError(f"p1 must lie in (0, 1), got {p1}")
    if not a_d > 0.0:
        raise DomainError(f"a_d must be positive, got {a_d}")
    return (1.0 - p1) * a_d / p1


def scale_informativeness(a, b, m):
    """Return (m*a, m*b): same mean, variance shrinking like 1/m."""
    if not (a > 0 and b > 0 and m > 0):
        raise DomainError("a, b and m must all be positive")
    return m * a, m * b


def sample_many(prior, u):
    """Map uniforms ``u`` in (0, 1) to prior draws by inverse CDF.

    This is the deterministic core of :func:`sample`; Monte Carlo code
    calls it with a whole vector of uniforms.
    """
    u = np.asarray(u, dtype=float)
    if isinstance(prior, PointMass):
        return np.full(u.shape, prior.p)
    a, b = prior.a, prior.b
    lo = specfun.reg_inc_beta(prior.lower, a, b)
    hi = specfun.reg_inc_beta(prior.upper, a, b)
    q = np.clip(lo + u * (hi - lo), 0.0, 1.0)
    x = specfun.inv_reg_inc_beta(q, a, b)
    return np.clip(x, prior.lower, prior.upper)


def sample(prior, rng):
    """One draw from ``prior`` using one uniform from ``rng``.

    A uniform is consumed even for a point mass, so that the position in
    the stream never depends on the prior type.
    """
    u = rng.uniform()
    if isinstance(prior, PointMass):
        return prior.p
    return float(sample_many(prior, np.array([u]))[0])


_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_BETA_RE = re.compile(rf"^beta:({_NUM}),({_NUM})(?:,({_NUM}),({_NUM}))?$")
_POINT_RE = re.compile(rf"^point:({_NUM})$")


def parse_prior(text):
    """Parse ``beta:a,b[,l,u]`` or ``point:p`` into a prior object."""
    s = text.strip().replace(" ", "")
    m = _BETA_RE.match(s)
    if m:
        a, b, lo, up = m.groups()
        if lo is None:
            return TruncatedBeta(float(a), float(b))
        return TruncatedBeta(float(a), float(b), float(lo), float(up))
    m = _POINT_RE.match(s)
    if m:
        return PointMass(float(m.group(1)))
    raise DomainError(f"cannot parse prior {text!r}; expected 'beta:a,b[,l,u]' or 'point:p'")


def format_prior(prior):
    """Inverse of :func:`parse_prior`, using shortest round-trip reprs."""
    if isinstance(prior, PointMass):
        return f"point:{prior.p!r}"
    core = f"beta:{prior.a!r},{prior.b!r}"
    if prior.is_truncated:
        core += f",{prior.lower!r},{prior.upper!r}"
    return core
