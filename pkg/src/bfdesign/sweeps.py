"""Informativeness sweep for the phase II example.

Design priors Beta(a_d, b_d) are mode-centred at p1 and truncated to
[0, p0] under H0 and [p0, 1] under H1; the analysis prior is flat.  For
each odd b_d the sweep finds the smallest n with Bayesian power above the
target, then reports power and type-I error at that n together with their
point-prior counterparts at p1 and p0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bayesfactor import AnalysisPrior, OneSided
from .design import DesignConfig, Metric, SampleSizeQuery, find_sample_size, operating_characteristics
from .priors import PointMass, TruncatedBeta, mode_centered_a

TABLE1_B_VALUES = tuple(range(1, 38, 2))


@dataclass(frozen=True)
class SweepRow:
    a_d: float
    b_d: float
    n: int
    power: float
    type1: float
    freq_power: float
    freq_type1: float


def centred_a(p1, b_d, decimals=None):
    """a_d placing the mode at p1; b_d = 1 is the flat prior (a_d = 1)."""
    a = 1.0 if b_d == 1 else mode_centered_a(p1, b_d)
    return a if decimals is None else round(a, decimals)


def sweep_row(k, b_d, p0=0.2, p1=0.4, target=0.9, ad_decimals=None, strict=True):
    a_d = centred_a(p1, b_d, ad_decimals)
    config = DesignConfig(OneSided(p0), AnalysisPrior(), TruncatedBeta(a_d, b_d, 0.0, p0),
                          TruncatedBeta(a_d, b_d, p0, 1.0), k)
    res = find_sample_size(config, SampleSizeQuery(Metric.POWER, target, strict=strict))
    point = DesignConfig(OneSided(p0), AnalysisPrior(), PointMass(p0), PointMass(p1), k)
    freq = operating_characteristics(point, res.n)
    oc = res.characteristics
    return SweepRow(a_d, float(b_d), res.n, oc.power, oc.type1, freq.power, freq.type1)


def table1(k, b_values=TABLE1_B_VALUES, p0=0.2, p1=0.4, target=0.9, ad_decimals=None, strict=True):
    """One block of the sweep: a :class:`SweepRow` per b_d."""
    return [sweep_row(k, b, p0, p1, target, ad_decimals, strict) for b in b_values]
