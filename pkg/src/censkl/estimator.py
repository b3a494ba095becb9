"""scikit-learn compatible wrappers.

Each row of ``X`` is one Type-II censored sample: its ``r`` observed order
statistics (any order; rows are sorted on input). ``n`` is the size of the
original, uncensored sample.

>>> import numpy as np
>>> from censkl import ExponentialityTest
>>> x = np.array([0.05, 0.21, 0.33, 0.62, 0.71])
>>> ExponentialityTest(statistic="t1", n=10, alpha=0.1).fit(x).critical_value_
0.5962
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .estimators import EntropyKind, estimate_rows, moving_average_smooth
from .gof import TestStatisticKind, compute_statistic, decide, mle_theta, rejects
from .exceptions import ParameterError
from .tables import default_table, default_window


def _check_rows(X, ensure_2d=True):
    X = check_array(X, ensure_2d=False, dtype=np.float64)
    if X.ndim == 1:
        if ensure_2d:
            X = X.reshape(1, -1)
    elif X.ndim != 2:
        raise ParameterError(f"expected 1-D or 2-D input, got ndim={X.ndim}")
    return np.sort(X, axis=-1)


def _resolve_n(n, r):
    n = r if n is None else int(n)
    if n < r:
        raise ParameterError(f"n={n} is smaller than the number of observed values r={r}")
    return n


class CensoredEntropyEstimator(TransformerMixin, BaseEstimator):
    """Entropy of censored samples as a transformer.

    Parameters
    ----------
    kind : {"hbar2", "hbar1", "park_hbar", "vasicek"}
    n : int, optional
        Original sample size; defaults to the number of columns (no censoring).
    m : int or "auto"
        Window size; "auto" uses the published window rule.
    k : int
        Moving-average order for ``hbar2``.
    """

    def __init__(self, kind="hbar2", n=None, m="auto", k=3):
        self.kind = kind
        self.n = n
        self.m = m
        self.k = k

    def fit(self, X, y=None):
        X = _check_rows(X)
        r = X.shape[1]
        self.kind_ = EntropyKind(self.kind)
        self.n_ = _resolve_n(self.n, r)
        if self.m == "auto":
            self.m_ = default_window(self.kind_, r, k=self.k)
        else:
            self.m_ = int(self.m)
        self.n_features_in_ = r
        return self

    def transform(self, X):
        """Return a column of estimates, one per row of ``X``."""
        check_is_fitted(self, "m_")
        X = _check_rows(X)
        if X.shape[1] != self.n_features_in_:
            raise ParameterError(f"expected {self.n_features_in_} values per row, got {X.shape[1]}")
        values = estimate_rows(self.kind_, X, self.n_, self.m_, self.k)
        return np.asarray(values, dtype=float).reshape(-1, 1)


class ExponentialityTest(BaseEstimator):
    """Goodness-of-fit test of exponentiality for Type-II censored data.

    ``fit`` runs the test on one sample and stores the outcome; ``predict``
    and ``score_samples`` apply the same test to many samples at once.

    Parameters
    ----------
    statistic : {"t1", "t2", "t", "z", "bigz"}
    n : int, optional
        Original sample size; defaults to the number of observed values.
    alpha : float
    m : int or "auto"
    k : int
        Moving-average order for ``t2``.
    critical_value : float, tuple or None
        Overrides the table lookup. For ``z`` pass ``(lower, upper)``.
    table : CriticalValueTable, optional
        Source of critical values; the bundled tables by default.

    Attributes
    ----------
    statistic_ : float
    critical_value_ : float or tuple
    reject_ : bool
    theta_hat_ : float
        Fitted exponential mean (from the smoothed values for ``t2``).
    m_ : int or None
    outcome_ : TestOutcome
    """

    def __init__(self, statistic="t1", n=None, alpha=0.1, m="auto", k=3,
                 critical_value=None, table=None):
        self.statistic = statistic
        self.n = n
        self.alpha = alpha
        self.m = m
        self.k = k
        self.critical_value = critical_value
        self.table = table

    def _window(self, r):
        kind = TestStatisticKind.parse(self.statistic)
        n = _resolve_n(self.n, r)
        if not kind.uses_window:
            m = None
        elif self.m == "auto":
            m = default_window(kind, r, k=self.k)
        else:
            m = int(self.m)
        return kind, n, m

    def _setup(self, r):
        kind, n, m = self._window(r)
        cv = self.critical_value
        if cv is None:
            table = default_table() if self.table is None else self.table
            cv = table.lookup(kind, n, r, self.alpha, m=m)
        elif isinstance(cv, list):
            cv = tuple(cv)
        return kind, n, m, cv

    def fit(self, X, y=None):
        x = _check_rows(X, ensure_2d=False)
        if x.ndim != 1:
            if x.shape[0] != 1:
                raise ParameterError("fit takes a single sample; use predict for batches")
            x = x[0]
        r = x.shape[0]
        self.kind_, self.n_, self.m_, self.critical_value_ = self._setup(r)
        value = compute_statistic(self.kind_, x, self.n_, self.m_, self.k)
        z = moving_average_smooth(x, self.k) if self.kind_ is TestStatisticKind.T2 else x
        self.outcome_ = decide(value, self.kind_, self.critical_value_, self.alpha,
                               m=self.m_, theta_hat=float(mle_theta(z, self.n_)))
        self.statistic_ = self.outcome_.statistic
        self.reject_ = self.outcome_.reject
        self.theta_hat_ = self.outcome_.theta_hat
        self.n_features_in_ = r
        return self

    def score_samples(self, X):
        """Test statistic for every row of ``X``."""
        X = _check_rows(X)
        kind, n, m = self._window(X.shape[1])
        return np.asarray(compute_statistic(kind, X, n, m, self.k), dtype=float)

    def predict(self, X):
        """Boolean rejection decision for every row of ``X``."""
        X = _check_rows(X)
        kind, n, m, cv = self._setup(X.shape[1])
        values = compute_statistic(kind, X, n, m, self.k)
        return np.atleast_1d(rejects(kind, values, cv))
