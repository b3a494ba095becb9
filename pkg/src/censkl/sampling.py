"""Random variates for the exponential null and the lifetime alternatives.

All samplers take an explicit :class:`numpy.random.Generator`; nothing here
touches global random state.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._validation import check_sizes
from .exceptions import ParameterError, TieError


class Family(str, Enum):
    EXPONENTIAL = "exponential"
    CHI_SQUARE = "chi_square"
    GAMMA = "gamma"
    WEIBULL = "weibull"
    GENERALIZED_EXPONENTIAL = "generalized_exponential"
    UNIFORM = "uniform"
    BETA = "beta"
    LOG_NORMAL = "log_normal"


class HazardClass(str, Enum):
    DECREASING = "decreasing"
    INCREASING = "increasing"
    NON_MONOTONE = "non_monotone"


_NEEDS_SHAPE1 = {
    Family.CHI_SQUARE,
    Family.GAMMA,
    Family.WEIBULL,
    Family.GENERALIZED_EXPONENTIAL,
    Family.BETA,
    Family.LOG_NORMAL,
}


@dataclass(frozen=True)
class DistributionSpec:
    """A lifetime distribution with its shape parameters.

    ``shape1`` is the degrees of freedom (chi-square), the shape (gamma,
    Weibull, generalized exponential, first Beta shape) or the log-scale
    sigma (log-normal). ``shape2`` is only used as the second Beta shape.
    ``scale`` multiplies every draw.
    """

    family: Family
    shape1: float | None = None
    shape2: float | None = None
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not np.isfinite(self.scale) or self.scale <= 0:
            raise ParameterError(f"scale must be positive, got {self.scale}")
        if self.family in _NEEDS_SHAPE1:
            if self.shape1 is None or not self.shape1 > 0:
                raise ParameterError(
                    f"{self.family.value} needs a positive shape1, got {self.shape1}"
                )
        if self.family is Family.BETA:
            if self.shape2 is None or not self.shape2 > 0:
                raise ParameterError(f"beta needs a positive shape2, got {self.shape2}")

    def label(self):
        params = [f"{p:g}" for p in (self.shape1, self.shape2) if p is not None]
        if self.scale != 1.0:
            params.append(f"scale={self.scale:g}")
        return f"{self.family.value}({','.join(params)})"


EXPONENTIAL = DistributionSpec(Family.EXPONENTIAL)


@dataclass(frozen=True)
class AlternativeCatalogEntry:
    code: str
    spec: DistributionSpec
    hazard_class: HazardClass


def _entry(code, family, shape1=None, shape2=None):
    hazard = {"A": HazardClass.DECREASING, "B": HazardClass.INCREASING,
              "C": HazardClass.NON_MONOTONE}[code[0]]
    return AlternativeCatalogEntry(code, DistributionSpec(family, shape1, shape2), hazard)


_CATALOG = (
    _entry("A1", Family.CHI_SQUARE, 1),
    _entry("A2", Family.GAMMA, 0.5),
    _entry("A3", Family.WEIBULL, 0.5),
    _entry("A4", Family.GENERALIZED_EXPONENTIAL, 0.5),
    _entry("B1", Family.UNIFORM),
    _entry("B2", Family.WEIBULL, 2),
    _entry("B3", Family.GAMMA, 1.5),
    _entry("B4", Family.GAMMA, 2),
    _entry("B5", Family.CHI_SQUARE, 3),
    _entry("B6", Family.CHI_SQUARE, 4),
    _entry("B7", Family.BETA, 1, 2),
    _entry("B8", Family.BETA, 2, 1),
    _entry("C1", Family.LOG_NORMAL, 0.6),
    _entry("C2", Family.LOG_NORMAL, 1.0),
    _entry("C3", Family.LOG_NORMAL, 1.2),
    _entry("C4", Family.BETA, 0.5, 1.0),
)


def alternative_catalog():
    """The sixteen alternatives, grouped by the shape of their hazard rate."""
    return list(_CATALOG)


def get_alternative(code):
    """Look up a catalog entry by code (``"A1"`` ... ``"C4"``).

    The code ``"null"`` (or ``"exp"``) returns the unit exponential so that
    a power study can include a size-check row.
    """
    key = code.strip().upper()
    if key in ("NULL", "EXP", "H0"):
        return AlternativeCatalogEntry("null", EXPONENTIAL, HazardClass.DECREASING)
    for entry in _CATALOG:
        if entry.code == key:
            return entry
    raise ParameterError(f"unknown alternative code {code!r}")


def exponential_ppf(u, scale=1.0):
    """Inverse CDF of the exponential distribution with mean ``scale``."""
    return -scale * np.log1p(-np.asarray(u, dtype=float))


def generalized_exponential_ppf(u, shape, scale=1.0):
    """Inverse of F(x) = (1 - exp(-x/scale))**shape."""
    u = np.asarray(u, dtype=float)
    return -scale * np.log1p(-(u ** (1.0 / shape)))


def _standard_gamma(rng, shape, size):
    # numpy's standard_gamma is Marsaglia-Tsang with the shape<1 boost
    return rng.standard_gamma(shape, size=size)


def sample(spec, n, rng):
    """Draw ``n`` independent variates from ``spec`` using ``rng``.

    Parameters
    ----------
    spec : DistributionSpec
    n : int or tuple of int
        Number of draws, or an output shape.
    rng : numpy.random.Generator

    Returns
    -------
    ndarray
    """
    if isinstance(n, (int, np.integer)) and n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    family = spec.family
    if family is Family.EXPONENTIAL:
        draws = rng.standard_exponential(size=n)
    elif family is Family.CHI_SQUARE:
        draws = 2.0 * _standard_gamma(rng, spec.shape1 / 2.0, n)
    elif family is Family.GAMMA:
        draws = _standard_gamma(rng, spec.shape1, n)
    elif family is Family.WEIBULL:
        draws = rng.standard_exponential(size=n) ** (1.0 / spec.shape1)
    elif family is Family.GENERALIZED_EXPONENTIAL:
        draws = generalized_exponential_ppf(rng.random(size=n), spec.shape1)
    elif family is Family.UNIFORM:
        draws = rng.random(size=n)
    elif family is Family.BETA:
        a = _standard_gamma(rng, spec.shape1, n)
        b = _standard_gamma(rng, spec.shape2, n)
        draws = a / (a + b)
    elif family is Family.LOG_NORMAL:
        draws = np.exp(spec.shape1 * rng.standard_normal(size=n))
    else:  # pragma: no cover - Family is closed
        raise ParameterError(f"unsupported family {family}")
    return spec.scale * draws


@dataclass(frozen=True)
class CensoredSample:
    """The ``r`` smallest order statistics of a sample of size ``n``."""

    values: np.ndarray
    n: int
    r: int

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        n, r = check_sizes(self.n, self.r)
        if values.shape != (r,):
            raise ParameterError(f"expected {r} values, got shape {values.shape}")
        if r > 1 and np.any(np.diff(values) <= 0):
            raise TieError("censored values must be strictly ascending")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "r", r)

    def scaled(self, c):
        return CensoredSample(self.values * c, self.n, self.r)


def type2_censor(raw, r):
    """Keep the ``r`` smallest values of ``raw`` in ascending order.

    Raises :class:`TieError` if two retained values coincide.
    """
    raw = np.asarray(raw, dtype=float).ravel()
    n = raw.size
    if n < 1:
        raise ParameterError("cannot censor an empty sample")
    if not isinstance(r, (int, np.integer)) or not 1 <= r <= n:
        raise ParameterError(f"need 1 <= r <= n={n}, got r={r}")
    kept = np.sort(raw)[:r]
    return CensoredSample(kept, n, int(r))


def censor_rows(raw, r):
    """Row-wise Type-II censoring of a ``(n_samples, n)`` matrix."""
    raw = np.asarray(raw, dtype=float)
    if not 1 <= r <= raw.shape[-1]:
        raise ParameterError(f"need 1 <= r <= n={raw.shape[-1]}, got r={r}")
    if r < raw.shape[-1]:
        # partition first: full sorts of long rows dominate otherwise
        raw = np.partition(raw, r - 1, axis=-1)[..., :r]
    return np.sort(raw, axis=-1)
