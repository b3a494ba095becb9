"""Entropy estimation and Kullback-Leibler goodness-of-fit tests for Type-II censored data."""

__version__ = "0.1.0"

from .estimator import CensoredEntropyEstimator, ExponentialityTest
from .estimators import (
    EntropyEstimate,
    EntropyKind,
    SmoothedSample,
    estimate_entropy,
    exact_reference_hbar,
    fhat,
    harmonic_mean,
    hbar1,
    hbar2,
    moving_average_smooth,
    park_hbar,
    vasicek,
)
from .exceptions import (
    CensKLError,
    DegenerateSpacingError,
    DomainError,
    ParameterError,
    TableMissError,
    TableParseError,
    TieError,
)
from .gof import (
    TestOutcome,
    TestStatisticKind,
    brain_shapiro,
    compute_statistic,
    decide,
    mle_theta,
    run_test,
    statistic_t,
    statistic_t1,
    statistic_t2,
)
from .sampling import (
    AlternativeCatalogEntry,
    CensoredSample,
    DistributionSpec,
    Family,
    HazardClass,
    alternative_catalog,
    sample,
    type2_censor,
)
from .tables import (
    CriticalValueTable,
    default_table,
    embedded_critical_value,
    load_table,
    save_table,
    window_for,
)

__all__ = [
    "AlternativeCatalogEntry",
    "CensKLError",
    "CensoredEntropyEstimator",
    "CensoredSample",
    "CriticalValueTable",
    "DegenerateSpacingError",
    "DistributionSpec",
    "DomainError",
    "EntropyEstimate",
    "EntropyKind",
    "ExponentialityTest",
    "Family",
    "HazardClass",
    "ParameterError",
    "SmoothedSample",
    "TableMissError",
    "TableParseError",
    "TestOutcome",
    "TestStatisticKind",
    "TieError",
    "alternative_catalog",
    "brain_shapiro",
    "compute_statistic",
    "decide",
    "default_table",
    "embedded_critical_value",
    "estimate_entropy",
    "exact_reference_hbar",
    "fhat",
    "harmonic_mean",
    "hbar1",
    "hbar2",
    "load_table",
    "mle_theta",
    "moving_average_smooth",
    "park_hbar",
    "run_test",
    "sample",
    "save_table",
    "statistic_t",
    "statistic_t1",
    "statistic_t2",
    "type2_censor",
    "vasicek",
    "window_for",
]
