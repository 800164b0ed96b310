"""Bayes-factor sample-size design for tests on a binomial proportion."""

from .bayesfactor import AnalysisPrior, OneSided, PointNull, bf01, log_bf01
from .design import (
    DesignConfig,
    Metric,
    OperatingCharacteristics,
    Region,
    SampleSizeQuery,
    acceptance_set,
    find_sample_size,
    find_threshold,
    operating_characteristics,
    region_probability,
    rejection_set,
)
from .errors import ConvergenceError, DegenerateCenteringError, DomainError, NotAttainableError
from .priors import PointMass, TruncatedBeta, parse_prior

__version__ = "0.1.0"

__all__ = [
    "AnalysisPrior",
    "ConvergenceError",
    "DegenerateCenteringError",
    "DesignConfig",
    "DomainError",
    "Metric",
    "NotAttainableError",
    "OneSided",
    "OperatingCharacteristics",
    "PointMass",
    "PointNull",
    "Region",
    "SampleSizeQuery",
    "TruncatedBeta",
    "acceptance_set",
    "bf01",
    "find_sample_size",
    "find_threshold",
    "log_bf01",
    "operating_characteristics",
    "parse_prior",
    "region_probability",
    "rejection_set",
]
