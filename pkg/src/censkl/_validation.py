"""Input validation helpers used across the estimators and statistics."""

import math
from numbers import Integral

import numpy as np

from .exceptions import DomainError, ParameterError, TieError


def check_order_statistics(x, *, positive=False, min_size=1):
    """Validate a batch of ascending order statistics.

    Parameters
    ----------
    x : array-like of shape (r,) or (n_samples, r)
        Each row holds the observed order statistics of one sample.
    positive : bool
        Require every value to be strictly positive.
    min_size : int
        Minimum number of observed values per row.

    Returns
    -------
    x : ndarray of shape (n_samples, r)
        A float64 copy-free view when possible; always 2-D.
    squeeze : bool
        True when the input was 1-D, so callers can return a scalar.
    """
    arr = np.asarray(x, dtype=float)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ParameterError(f"expected a 1-D or 2-D array, got ndim={arr.ndim}")
    if arr.shape[1] < min_size:
        raise ParameterError(
            f"need at least {min_size} observed values, got {arr.shape[1]}"
        )
    if not np.all(np.isfinite(arr)):
        raise DomainError("order statistics must be finite")
    if positive and np.any(arr <= 0):
        raise DomainError("order statistics must be strictly positive")
    if arr.shape[1] > 1 and np.any(np.diff(arr, axis=1) <= 0):
        raise TieError("order statistics must be strictly ascending (ties found)")
    return arr, squeeze


def check_sizes(n, r):
    """Check 1 <= r <= n for integer sample sizes."""
    if not isinstance(n, Integral) or not isinstance(r, Integral):
        raise ParameterError(f"n and r must be integers, got n={n!r}, r={r!r}")
    if not 1 <= r <= n:
        raise ParameterError(f"need 1 <= r <= n, got n={n}, r={r}")
    return int(n), int(r)


def check_window(m, bound, what, inclusive=False):
    """Check that ``m`` is a positive integer below (or at) ``bound``."""
    if not isinstance(m, Integral) or isinstance(m, bool):
        raise ParameterError(f"window size must be an integer, got {m!r}")
    too_big = m > bound if inclusive else m >= bound
    if m < 1 or too_big:
        op = "<=" if inclusive else "<"
        raise ParameterError(f"window size m={m} must satisfy 1 <= m {op} {what}")
    return int(m)


def largest_window(bound, inclusive=False):
    """Largest integer below ``bound`` (or equal to it when ``inclusive``)."""
    if inclusive:
        return int(math.floor(bound))
    return int(math.ceil(bound)) - 1


def maybe_scalar(values, squeeze):
    return float(values[0]) if squeeze else values
