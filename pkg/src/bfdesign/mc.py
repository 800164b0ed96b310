"""Seeded Monte Carlo estimates of the operating characteristics.

Simulation i draws p_i from the design prior of the chosen hypothesis and
then y_i ~ Bin(n, p_i), both by inversion.  Every simulation consumes
exactly two uniforms from the stream: the first for p_i (ignored for a
point mass), the second for y_i.  The indicator of the event is evaluated
with the closed-form Bayes factor, independently of the root-finding
engine in :mod:`bfdesign.design`.

With ``chunks=1`` the whole run is one xoshiro256** stream seeded with
``seed``.  With ``chunks=C > 1`` the simulations are split into C
contiguous blocks; block c uses the stream seeded with
``derive_seed(seed, c)`` and the blocks are advanced together as numpy
lanes.  Results are deterministic for a fixed (seed, nsim, chunks).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import bayesfactor as bfm
from .design import LOG_BF_TIE
from .errors import DomainError
from .priors import PointMass, sample_many
from .rng import LaneGenerator, Xoshiro256, derive_seed

_BLOCK = 8192


class Hypothesis(enum.Enum):
    H0 = "H0"
    H1 = "H1"


class Event(enum.Enum):
    REJECTION = "rejection"
    H0_EVIDENCE = "h0evidence"
    INDECISIVE = "indecisive"


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    mcse: float
    nsim: int
    seed: int
    chunks: int = 1

    @classmethod
    def from_count(cls, hits, nsim, seed, chunks=1):
        est = hits / nsim
        return cls(est, math.sqrt(est * (1.0 - est) / nsim), nsim, seed, chunks)


def _uniform_pairs(nsim, seed, chunks):
    """(u_p, u_y) arrays of length nsim in simulation order."""
    if chunks == 1:
        u = Xoshiro256(seed).uniforms(2 * nsim)
        return u[0::2], u[1::2]
    sizes = np.full(chunks, nsim // chunks)
    sizes[: nsim % chunks] += 1
    steps = int(sizes.max())
    lanes = LaneGenerator([derive_seed(seed, c) for c in range(chunks)])
    up = np.empty((steps, chunks))
    uy = np.empty((steps, chunks))
    for s in range(steps):
        up[s] = lanes.uniform()
        uy[s] = lanes.uniform()
    # chunk c owns simulations [start_c, start_c + sizes[c]) in order
    keep = np.arange(steps)[:, None] < sizes[None, :]
    return up.T[keep.T], uy.T[keep.T]


def binomial_inversion(n, p, u):
    """Smallest y with P(Y <= y) >= u for Y ~ Bin(n, p), elementwise."""
    p = np.asarray(p, dtype=float)
    u = np.asarray(u, dtype=float)
    ys = np.arange(n + 1)
    lcoef = gammaln(n + 1.0) - gammaln(ys + 1.0) - gammaln(n - ys + 1.0)
    out = np.empty(u.size, dtype=np.int64)
    if np.all(p == p.flat[0]):
        q = float(p.flat[0])
        cdf = np.cumsum(np.exp(lcoef + ys * math.log(q) + (n - ys) * math.log1p(-q)))
        return np.minimum(np.searchsorted(cdf, u, side="left"), n)
    for start in range(0, u.size, _BLOCK):
        pb = p[start:start + _BLOCK, None]
        logpmf = lcoef[None, :] + ys[None, :] * np.log(pb) + (n - ys)[None, :] * np.log1p(-pb)
        cdf = np.cumsum(np.exp(logpmf), axis=1)
        below = cdf < u[start:start + _BLOCK, None]
        out[start:start + _BLOCK] = np.minimum(below.sum(axis=1), n)
    return out


def simulate_counts(config, n, hypothesis: Hypothesis, nsim, seed, chunks=1):
    """The simulated success counts y_1..y_nsim."""
    if isinstance(nsim, bool) or int(nsim) != nsim or nsim < 1:
        raise DomainError(f"nsim must be a positive integer, got {nsim!r}")
    if isinstance(chunks, bool) or int(chunks) != chunks or not 1 <= chunks <= nsim:
        raise DomainError(f"chunks must be an integer in [1, nsim], got {chunks!r}")
    prior = config.design_h0 if hypothesis is Hypothesis.H0 else config.design_h1
    up, uy = _uniform_pairs(int(nsim), seed, int(chunks))
    p = np.full(up.shape, prior.p) if isinstance(prior, PointMass) else sample_many(prior, up)
    return binomial_inversion(int(n), p, uy)


def _event_mask(config, n, event: Event):
    lbf = bfm.log_bf01_support(config.test, n, config.analysis)
    eps = LOG_BF_TIE
    if event is Event.REJECTION:
        return lbf < math.log(config.k) - eps
    if event is Event.H0_EVIDENCE:
        return lbf > -math.log(config.k) + eps
    lo, hi = config.indecisive_band
    return (lbf > math.log(lo) + eps) & (lbf < math.log(hi) - eps)


def mc_probability(config, n, hypothesis: Hypothesis, event: Event, nsim, seed, chunks=1):
    """Monte Carlo estimate of P(event | hypothesis) at sample size n."""
    if nsim < 100:
        raise DomainError(f"nsim must be at least 100, got {nsim}")
    y = simulate_counts(config, n, hypothesis, nsim, seed, chunks)
    hits = int(np.count_nonzero(_event_mask(config, n, event)[y]))
    return MCEstimate.from_count(hits, int(nsim), int(seed), int(chunks))


@dataclass(frozen=True)
class MCCharacteristics:
    n: int
    power: MCEstimate
    type1: MCEstimate
    h0_evidence: MCEstimate
    indecisive_h0: MCEstimate
    indecisive_h1: MCEstimate


def mc_characteristics(config, n, nsim, seed, chunks=1):
    """All five characteristics; one simulation run per hypothesis.

    The H0 run uses ``seed`` and the H1 run ``derive_seed(seed, -1)``, so
    the two hypotheses never share uniforms.
    """
    if nsim < 100:
        raise DomainError(f"nsim must be at least 100, got {nsim}")
    seeds = {Hypothesis.H0: int(seed), Hypothesis.H1: derive_seed(seed, -1)}
    masks = {e: _event_mask(config, n, e) for e in Event}
    est = {}
    for hyp, sd in seeds.items():
        y = simulate_counts(config, n, hyp, nsim, sd, chunks)
        for e, m in masks.items():
            est[hyp, e] = MCEstimate.from_count(int(np.count_nonzero(m[y])), int(nsim), sd, int(chunks))
    return MCCharacteristics(
        n=int(n),
        power=est[Hypothesis.H1, Event.REJECTION],
        type1=est[Hypothesis.H0, Event.REJECTION],
        h0_evidence=est[Hypothesis.H0, Event.H0_EVIDENCE],
        indecisive_h0=est[Hypothesis.H0, Event.INDECISIVE],
        indecisive_h1=est[Hypothesis.H1, Event.INDECISIVE],
    )
