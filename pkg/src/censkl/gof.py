"""Goodness-of-fit statistics for exponentiality under Type-II censoring.

The KL-based statistics T, T1 and T2 estimate the Kullback-Leibler
information between the data and the fitted exponential; large values reject.
The Brain-Shapiro z and Z statistics are regression-on-spacings baselines.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._validation import check_order_statistics, check_sizes, maybe_scalar
from .estimators import hbar1, hbar2, moving_average_smooth, park_hbar
from .exceptions import ParameterError, TableMissError
from .sampling import CensoredSample


class TestStatisticKind(str, Enum):
    __test__ = False  # keep pytest from collecting this enum

    PARK_T = "t"
    T1 = "t1"
    T2 = "t2"
    BRAIN_SHAPIRO_Z = "z"
    BRAIN_SHAPIRO_BIG_Z = "bigz"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip()
        if key == "Z":
            return cls.BRAIN_SHAPIRO_BIG_Z
        try:
            return cls(key.lower())
        except ValueError:
            raise ParameterError(f"unknown statistic {name!r}") from None

    @property
    def uses_window(self):
        return self in (TestStatisticKind.PARK_T, TestStatisticKind.T1, TestStatisticKind.T2)

    @property
    def two_sided(self):
        return self is TestStatisticKind.BRAIN_SHAPIRO_Z


KL_STATISTICS = (TestStatisticKind.PARK_T, TestStatisticKind.T1, TestStatisticKind.T2)


def _unpack(x, n):
    if isinstance(x, CensoredSample):
        return x.values, x.n
    if n is None:
        raise ParameterError("n (original sample size) is required for array input")
    return x, n


def mle_theta(z, n):
    """Censored-exponential MLE of the mean: (sum z + (n - r) z_(r)) / r."""
    z, squeeze = check_order_statistics(z, positive=True)
    n, r = check_sizes(n, z.shape[1])
    theta = (z.sum(axis=1) + (n - r) * z[:, -1]) / r
    return maybe_scalar(theta, squeeze)


def _fitted_exponential_term(z, n):
    r = z.shape[1]
    theta = (z.sum(axis=1) + (n - r) * z[:, -1]) / r
    return (r / n) * (np.log(theta) + 1.0)


def statistic_t(x, m, *, n=None):
    """Park's statistic: -Hbar + (r/n)(ln theta_hat + 1)."""
    x, n = _unpack(x, n)
    x, squeeze = check_order_statistics(x, positive=True, min_size=3)
    values = -np.atleast_1d(park_hbar(x, m, n=n)) + _fitted_exponential_term(x, n)
    return maybe_scalar(values, squeeze)


def statistic_t1(x, m, *, n=None):
    """KL statistic built on the harmonic-mean estimator and the raw data."""
    x, n = _unpack(x, n)
    x, squeeze = check_order_statistics(x, positive=True, min_size=3)
    values = -np.atleast_1d(hbar1(x, m, n=n)) + _fitted_exponential_term(x, n)
    return maybe_scalar(values, squeeze)


def statistic_t2(x, m, *, n=None, k=3):
    """KL statistic built on the moving-average estimator.

    The smoothed values replace the data in the fitted-exponential term too.
    """
    x, n = _unpack(x, n)
    x, squeeze = check_order_statistics(x, positive=True, min_size=3)
    y = moving_average_smooth(x, k)
    values = -np.atleast_1d(hbar2(x, m, n=n, k=k)) + _fitted_exponential_term(y, n)
    return maybe_scalar(values, squeeze)


def brain_shapiro_spacings(x, n):
    """Normalized spacings Y_1 = n x_(1), Y_i = (n - i + 1)(x_(i) - x_(i-1))."""
    arr = np.asarray(x, dtype=float)
    squeeze = arr.ndim == 1
    arr = np.atleast_2d(arr)
    r = arr.shape[1]
    weights = n - np.arange(r)
    gaps = np.diff(arr, axis=1, prepend=0.0)
    out = weights * gaps
    return out[0] if squeeze else out


def brain_shapiro(x, *, n=None):
    """Brain and Shapiro's z and Z statistics.

    Returns
    -------
    z, Z : float or ndarray
    """
    x, n = _unpack(x, n)
    x, squeeze = check_order_statistics(x, positive=True, min_size=4)
    n, r = check_sizes(n, x.shape[1])
    Y = brain_shapiro_spacings(x, n)[:, 1:]  # Y_2 .. Y_r
    c = np.arange(1, r) - r / 2.0
    total = Y.sum(axis=1)
    z = math.sqrt(12.0 / (r - 2)) * (Y @ c) / total
    second = (12.0 * (Y @ (c * c)) - r * (r - 2) * total) / total
    Z = z * z + math.sqrt(5.0 / (4.0 * (r + 1) * (r - 2) * (r - 3))) * second
    return maybe_scalar(z, squeeze), maybe_scalar(Z, squeeze)


def compute_statistic(kind, x, n, m=None, k=3):
    """Evaluate any statistic kind on one sample or a batch of rows."""
    kind = TestStatisticKind.parse(kind)
    if kind.uses_window and m is None:
        raise ParameterError(f"statistic {kind.value} needs a window size")
    if kind is TestStatisticKind.PARK_T:
        return statistic_t(x, m, n=n)
    if kind is TestStatisticKind.T1:
        return statistic_t1(x, m, n=n)
    if kind is TestStatisticKind.T2:
        return statistic_t2(x, m, n=n, k=k)
    z, Z = brain_shapiro(x, n=n)
    return z if kind is TestStatisticKind.BRAIN_SHAPIRO_Z else Z


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False

    kind: TestStatisticKind
    statistic: float
    critical_value: float | tuple[float, float]
    alpha: float
    reject: bool
    m: int | None = None
    theta_hat: float | None = None

    def to_dict(self):
        cv = self.critical_value
        return {
            "statistic_kind": self.kind.value,
            "value": self.statistic,
            "m": self.m,
            "alpha": self.alpha,
            "critical_value": list(cv) if isinstance(cv, tuple) else cv,
            "reject": self.reject,
            "theta_hat": self.theta_hat,
        }


def rejects(kind, statistic, critical_value):
    """Apply the rejection region of ``kind``; works elementwise on arrays.

    KL statistics and Z reject above the critical value. z is two-sided and
    takes a ``(lower, upper)`` pair.
    """
    kind = TestStatisticKind.parse(kind)
    statistic = np.asarray(statistic, dtype=float)
    if kind.two_sided:
        try:
            lower, upper = critical_value
        except (TypeError, ValueError):
            raise ParameterError("z needs a (lower, upper) critical-value pair") from None
        out = (statistic < lower) | (statistic > upper)
    else:
        if isinstance(critical_value, tuple):
            raise ParameterError(f"{kind.value} takes a single critical value")
        out = statistic > critical_value
    return bool(out) if out.ndim == 0 else out


def decide(statistic, kind, critical_value, alpha, *, m=None, theta_hat=None):
    """Assemble a TestOutcome from a statistic and its critical value(s)."""
    kind = TestStatisticKind.parse(kind)
    if critical_value is None:
        raise TableMissError(f"no critical value for {kind.value} at alpha={alpha}")
    if isinstance(critical_value, list):
        critical_value = tuple(critical_value)
    return TestOutcome(
        kind=kind,
        statistic=float(statistic),
        critical_value=critical_value,
        alpha=float(alpha),
        reject=rejects(kind, statistic, critical_value),
        m=m,
        theta_hat=theta_hat,
    )


def run_test(sample, kind, alpha=0.1, m=None, k=3, table=None):
    """Test a censored sample for exponentiality.

    The window size defaults to the published rule, and the critical value is
    looked up in ``table`` (default: the bundled tables).

    Raises
    ------
    TableMissError
        If no critical value covers ``(kind, n, r, alpha, m)``.
    """
    from .tables import default_table, default_window

    kind = TestStatisticKind.parse(kind)
    if kind.uses_window and m is None:
        m = default_window(kind, sample.r, k=k)
    if not kind.uses_window:
        m = None
    value = compute_statistic(kind, sample.values, sample.n, m, k)
    table = default_table() if table is None else table
    cv = table.lookup(kind, sample.n, sample.r, alpha, m=m)
    z = moving_average_smooth(sample.values, k) if kind is TestStatisticKind.T2 else sample.values
    return decide(value, kind, cv, alpha, m=m, theta_hat=float(mle_theta(z, sample.n)))
