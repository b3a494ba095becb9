import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from censkl import (
    CensoredSample,
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
    type2_censor,
    vasicek,
)
from censkl.exceptions import DegenerateSpacingError, DomainError, ParameterError, TieError
from censkl.montecarlo import draw_censored, draw_ordered

from . import oracles

# cumulative sums of well-separated gaps keep the spacings away from rounding
ascending = st.lists(
    st.floats(0.05, 5.0, allow_nan=False), min_size=6, max_size=30
).map(lambda gaps: np.cumsum(gaps).tolist())


# -- Vasicek -----------------------------------------------------------------

def test_vasicek_hand_value():
    expected = (math.log(1.5) + math.log(3) + math.log(1.5)) / 3
    assert vasicek([1.0, 2.0, 3.0], 1) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.636514, abs=1e-6)


def test_vasicek_scale_shift():
    x = np.array([0.3, 0.9, 1.4, 2.2, 3.1, 4.8])
    assert vasicek(3.7 * x, 2) - vasicek(x, 2) == pytest.approx(math.log(3.7), abs=1e-12)


def test_vasicek_large_exponential_sample():
    x = np.sort(np.random.default_rng(5).exponential(size=100_000))
    assert vasicek(x, int(math.sqrt(x.size))) == pytest.approx(1.0, abs=0.01)


def test_vasicek_errors():
    with pytest.raises(ParameterError):
        vasicek([1.0, 2.0, 3.0, 4.0], 2)
    with pytest.raises(TieError):
        vasicek([1.0, 2.0, 2.0, 3.0], 1)


# -- Park --------------------------------------------------------------------

def test_park_hand_value():
    s = CensoredSample([1.0, 2.0, 4.0], 6, 3)
    spacing_part = (math.log(3) + math.log(9) + math.log(6)) / 6
    assert spacing_part == pytest.approx(0.847933, abs=1e-6)
    expected = spacing_part - 0.5 * math.log(0.5)
    assert park_hbar(s, 1) == pytest.approx(expected, abs=1e-12)
    assert park_hbar(s, 1) == pytest.approx(1.194506, abs=1e-6)


def test_park_equals_vasicek_on_full_sample(rng):
    x = np.sort(rng.exponential(size=15))
    assert park_hbar(x, 3, n=15) == pytest.approx(vasicek(x, 3), abs=1e-14)


@settings(max_examples=50)
@given(ascending, st.integers(1, 3))
def test_park_matches_oracle(x, m):
    n = len(x) + 4
    assert park_hbar(x, m, n=n) == pytest.approx(oracles.park_hbar(x, n, m), rel=1e-10)


def test_park_requires_n_for_arrays():
    with pytest.raises(ParameterError):
        park_hbar([1.0, 2.0, 3.0], 1)


def test_park_window_bound():
    x = [1.0, 2.0, 3.0, 4.0, 5.0]
    park_hbar(x, 3, n=10)  # ceil(5/2) = 3 is admissible
    with pytest.raises(ParameterError):
        park_hbar(x, 4, n=10)


# -- harmonic mean ----------------------------------------------------------

def test_harmonic_mean():
    assert harmonic_mean([1, 2, 4]) == pytest.approx(12 / 7)
    assert harmonic_mean([2.5]) == 2.5
    assert harmonic_mean([1, 2, 3]) == pytest.approx(18 / 11)
    assert harmonic_mean([1, 2, 3]) <= 2.0
    with pytest.raises(DomainError):
        harmonic_mean([1.0, 0.0])
    with pytest.raises(ParameterError):
        harmonic_mean([])


# -- Hbar1 ------------------------------------------------------------------

def test_hbar1_unit_window_is_degenerate():
    s = CensoredSample([1.0, 2.0, 4.0], 6, 3)
    with pytest.raises(DegenerateSpacingError):
        hbar1(s, 1)


def test_hbar1_hand_trace():
    s = CensoredSample([1.0, 2.0, 4.0, 8.0, 16.0], 10, 5)
    # i = 3: upper HM{4, 8} = 16/3, lower HM{1, 2, 4} = 12/7
    term3 = math.log((16 / 3 - 12 / 7) / (2 / 10))
    assert term3 == pytest.approx(math.log(18.095238095), abs=1e-9)
    terms = [
        math.log((harmonic_mean([1, 2]) - 1) / 0.2),
        math.log((harmonic_mean([2, 4]) - harmonic_mean([1, 2])) / 0.2),
        term3,
        math.log((harmonic_mean([8, 16]) - harmonic_mean([1, 2, 4, 8])) / 0.2),
        math.log((16 - harmonic_mean([2, 4, 8, 16])) / 0.2),
    ]
    expected = sum(terms) / 10 - 0.5 * math.log(0.5)
    assert hbar1(s, 2) == pytest.approx(expected, abs=1e-12)
    assert hbar1(s, 2) == pytest.approx(1.6594620008070158, abs=1e-12)


@settings(max_examples=50)
@given(ascending, st.integers(2, 3))
def test_hbar1_matches_oracle(x, m):
    n = len(x) + 3
    assert hbar1(x, m, n=n) == pytest.approx(oracles.hbar1(x, n, m), rel=1e-9)


def test_hbar1_clamp_boundary_differs():
    x = [1.0, 2.0, 4.0, 8.0, 16.0]
    assert hbar1(x, 2, n=10, boundary="clamp") != pytest.approx(hbar1(x, 2, n=10))
    with pytest.raises(ParameterError):
        hbar1(x, 2, n=10, boundary="reflect")


def test_hbar1_domain_errors():
    with pytest.raises(DomainError):
        hbar1([-1.0, 2.0, 3.0, 4.0, 5.0], 2, n=10)


# -- smoothing and F-hat ----------------------------------------------------

def test_moving_average_examples():
    assert moving_average_smooth([1, 2, 3, 4, 5], 3).tolist() == [2, 3, 4, 4.5, 5]
    x = np.array([0.2, 0.7, 1.1, 3.0])
    assert np.array_equal(moving_average_smooth(x, 1), x)
    with pytest.raises(ParameterError):
        moving_average_smooth(x, 5)


@given(ascending, st.integers(1, 6))
def test_moving_average_properties(x, k):
    y = moving_average_smooth(x, k)
    assert y[-1] == x[-1]
    assert np.allclose(y, oracles.smooth(x, k), rtol=1e-12)
    r = len(x)
    for i in range(r):
        window = x[i:min(i + k, r)]
        assert min(window) - 1e-9 <= y[i] <= max(window) + 1e-9


def test_smoothed_sample():
    s = CensoredSample([1.0, 2.0, 3.0, 4.0, 5.0], 8, 5)
    sm = SmoothedSample.from_sample(s)
    assert sm.y.tolist() == [2, 3, 4, 4.5, 5]
    assert (sm.n, sm.r, sm.k) == (8, 5, 3)


def test_fhat_boundaries():
    y = moving_average_smooth([1.0, 2.0, 4.0, 7.0, 11.0], 3)
    n, r = 10, 5
    assert fhat(y, n, 1) == pytest.approx(1 / (n + 1))
    # (4/55)(5 + 1/4 + 1) = 5/11
    assert fhat(y, n, r) == pytest.approx((4 / 55) * 6.25)
    assert fhat(y, n, r) == pytest.approx(r / (n + 1))
    assert np.allclose(fhat(y, n), oracles.fhat(list(y), n))
    with pytest.raises(ParameterError):
        fhat(y, n, 0)


def test_fhat_from_smoothed_sample():
    sm = SmoothedSample.from_sample(CensoredSample([1.0, 2.0, 3.0, 4.0, 5.0], 8, 5))
    assert fhat(sm, None).tolist() == pytest.approx(oracles.fhat([2, 3, 4, 4.5, 5], 8))


def test_fhat_strictly_increasing():
    rng = np.random.default_rng(77)
    for _ in range(100):
        y = moving_average_smooth(np.sort(rng.exponential(size=20))[:12], 3)
        assert np.all(np.diff(fhat(y, 20)) > 0)
        assert np.all((fhat(y, 20) > 0) & (fhat(y, 20) < 1))


def test_fhat_tie_error():
    with pytest.raises(TieError):
        fhat([1.0, 2.0, 2.0, 3.0], 6)


# -- Hbar2 ------------------------------------------------------------------

def test_hbar2_brute_force():
    s = CensoredSample([1.0, 2.0, 3.0, 4.0, 5.0], 8, 5)
    expected = oracles.hbar2([1, 2, 3, 4, 5], 8, 2)
    assert hbar2(s, 2) == pytest.approx(expected, abs=1e-12)
    assert hbar2(s, 2) == pytest.approx(1.5628043526407138, abs=1e-12)


@settings(max_examples=50)
@given(ascending, st.integers(1, 8), st.integers(1, 4))
def test_hbar2_matches_oracle(x, m, k):
    n = len(x) + 5
    m = min(m, int(len(x) / 2 + k))
    assert hbar2(x, m, n=n, k=k) == pytest.approx(oracles.hbar2(x, n, m, k), rel=1e-9)


def test_hbar2_large_window_saturates():
    x = [0.1, 0.4, 0.5, 0.9, 1.3]
    assert hbar2(x, 4, n=10) == pytest.approx(hbar2(x, 5, n=10))
    with pytest.raises(ParameterError):
        hbar2(x, 6, n=10)


# -- scale equivariance -----------------------------------------------------

@settings(max_examples=40)
@given(ascending, st.sampled_from([0.01, 1.0, 7.5, 100.0]))
def test_censored_estimators_shift_by_scaled_log(x, c):
    x = np.array(x)
    n = len(x) + 4
    r = len(x)
    shift = (r / n) * math.log(c)
    for est, m in ((park_hbar, 2), (hbar1, 2), (hbar2, 3)):
        delta = est(c * x, m, n=n) - est(x, m, n=n)
        assert delta == pytest.approx(shift, abs=1e-9)


# -- reference value --------------------------------------------------------

def _quadrature_reference(n, r):
    # Exp(1): F^{-1}(p) = -ln(1-p), so ln dF^{-1}/dp = -ln(1-p)
    q = r / n
    integral, _ = integrate.quad(lambda p: -math.log(1 - p), 0, q)
    tail = (1 - q) * math.log(1 - q) if q < 1 else 0.0
    return integral - tail if q < 1 else integral


@pytest.mark.parametrize("n,r", [(30, 15), (10, 5), (30, 27), (12, 12)])
def test_exact_reference_matches_quadrature(n, r):
    assert exact_reference_hbar(n, r) == pytest.approx(_quadrature_reference(n, r), abs=1e-9)


def test_exact_reference_values():
    assert exact_reference_hbar(30, 15) == 0.5
    assert exact_reference_hbar(7, 7) == 1.0
    with pytest.raises(ParameterError):
        exact_reference_hbar(5, 6)


# -- sample-based entry point and Monte Carlo checks ------------------------

def test_estimate_entropy_defaults(exp_sample):
    est = estimate_entropy(exp_sample, EntropyKind.HBAR2)
    assert est.m == 13 and est.k == 3 and (est.n, est.r) == (30, 20)
    assert est.value == pytest.approx(hbar2(exp_sample, 13))
    est1 = estimate_entropy(exp_sample, "hbar1")
    assert est1.m == 4 and est1.k is None
    with pytest.raises(ParameterError):
        estimate_entropy(exp_sample, "vasicek")
    full = type2_censor(exp_sample.values, 20)
    full = CensoredSample(full.values, 20, 20)
    assert estimate_entropy(full, "vasicek", m=3).value == pytest.approx(vasicek(full.values, 3))


def test_park_mean_bias_table_row():
    x = draw_censored(None, 30, 15, 10_000, seed=101)
    est = park_hbar(x, 3, n=30)
    assert est.mean() - 0.5 == pytest.approx(-0.1370, abs=0.02)


def test_hbar2_mean_bias_table_row():
    x = draw_censored(None, 30, 15, 10_000, seed=102)
    est = hbar2(x, 10, n=30)
    assert est.mean() - 0.5 == pytest.approx(-0.0100, abs=0.02)


def test_vectorized_rows_match_scalar_calls():
    x = draw_ordered(None, 20, 6, seed=3)[:, :12]
    batch = hbar1(x, 3, n=20)
    assert batch.shape == (6,)
    assert np.allclose(batch, [hbar1(row, 3, n=20) for row in x], rtol=1e-13)
