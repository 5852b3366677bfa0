"""Special-function kernels against high-precision mpmath oracles and
analytic identities."""

import math

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from rmstbayes.specfun import (incomplete_beta, incomplete_beta_compl,
                               ln_gamma, log_std_normal_sf,
                               lower_incomplete_gamma, std_normal_cdf,
                               std_normal_sf)

mp.mp.dps = 40


# ---------------------------------------------------------------- gamma ---

def test_ln_gamma_matches_factorials():
    for n in range(1, 15):
        assert math.isclose(ln_gamma(n), math.log(math.factorial(n - 1)), rel_tol=1e-14)


def test_lower_incomplete_gamma_against_mpmath_grid():
    worst = 0.0
    for a in (0.05, 0.3, 0.7, 1.0, 1.5, 2.5, 5.0, 11.0, 30.0):
        for z in (1e-6, 0.01, 0.2, 0.9, 1.0, 2.3, 7.0, 25.0, 120.0):
            got = lower_incomplete_gamma(z, a)
            ref = float(mp.gammainc(a, 0, z))
            worst = max(worst, abs(got - ref) / ref)
    assert worst < 1e-12


def test_lower_incomplete_gamma_limits():
    assert lower_incomplete_gamma(0.0, 2.3) == 0.0
    assert math.isclose(lower_incomplete_gamma(math.inf, 4.0),
                        math.factorial(3), rel_tol=1e-14)
    # a = 1 reduces to 1 - e^{-z}
    assert math.isclose(lower_incomplete_gamma(3.0, 1.0), 1 - math.exp(-3), rel_tol=1e-14)


def test_lower_incomplete_gamma_rejects_bad_domain():
    with pytest.raises(ValueError):
        lower_incomplete_gamma(1.0, 0.0)
    with pytest.raises(ValueError):
        lower_incomplete_gamma(-0.5, 1.0)


@given(st.floats(0.05, 50.0), st.floats(1e-6, 200.0), st.floats(1e-6, 200.0))
@settings(max_examples=60, deadline=None)
def test_lower_incomplete_gamma_monotone_in_z(a, z1, z2):
    lo, hi = sorted((z1, z2))
    assert lower_incomplete_gamma(lo, a) <= lower_incomplete_gamma(hi, a) + 1e-15


# ----------------------------------------------------------------- beta ---

def _beta_ref(z, a, b):
    # raw integral via mpmath's regularized incomplete beta
    return float(mp.betainc(a, b, 0, z, regularized=False))


def test_incomplete_beta_positive_b_grid():
    worst = 0.0
    for a in (0.07, 0.5, 1.0, 1.5, 3.3, 10.0, 19.7):
        for b in (0.04, 0.5, 1.0, 2.6, 8.0):
            for z in (1e-5, 0.1, 0.4, 0.5, 0.7, 0.95, 0.999, 1.0):
                got = incomplete_beta(z, a, b)
                ref = _beta_ref(z, a, b)
                worst = max(worst, abs(got - ref) / abs(ref))
    assert worst < 1e-10


def test_incomplete_beta_nonpositive_b_grid():
    # b <= 0 arises from frailty log-logistic (b = v - 1/k); z < 1 required.
    worst = 0.0
    for a in (1.3, 1.5, 2.0, 4.5, 19.7):
        for b in (0.0, -0.25, -0.5, -1.0, -2.7, -5.5):
            for z in (0.05, 0.3, 0.5, 0.8, 0.97, 0.9999):
                got = incomplete_beta(z, a, b)
                ref = float(mp.quad(lambda t: t ** (a - 1) * (1 - t) ** (b - 1),
                                    [0, z / 2, z]))
                worst = max(worst, abs(got - ref) / abs(ref))
    assert worst < 1e-9


def test_incomplete_beta_full_range_is_beta_function():
    for a, b in ((1.5, 0.5), (2.0, 3.0), (0.3, 0.7)):
        got = incomplete_beta(1.0, a, b)
        ref = math.exp(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b))
        assert math.isclose(got, ref, rel_tol=1e-12)


def test_incomplete_beta_diverges_at_one_for_nonpositive_b():
    with pytest.raises(ValueError):
        incomplete_beta(1.0, 1.5, -0.5)


def test_incomplete_beta_rejects_bad_domain():
    with pytest.raises(ValueError):
        incomplete_beta(-0.1, 1.0, 1.0)
    with pytest.raises(ValueError):
        incomplete_beta(1.1, 1.0, 1.0)
    with pytest.raises(ValueError):
        incomplete_beta(0.5, 0.0, 1.0)


def test_incomplete_beta_compl_accurate_near_one():
    # the complement entry point must not lose precision when z ~ 1
    s0 = 1e-14
    a, b = 1.5, 0.5
    got = incomplete_beta_compl(s0, a, b)
    ref = float(mp.betainc(a, b, 0, mp.mpf(1) - mp.mpf(s0), regularized=False))
    assert abs(got - ref) / ref < 1e-10


@given(st.floats(0.1, 20.0), st.floats(-4.0, 6.0),
       st.floats(0.01, 0.99), st.floats(0.01, 0.99))
@settings(max_examples=60, deadline=None)
def test_incomplete_beta_monotone_in_z(a, b, z1, z2):
    lo, hi = sorted((z1, z2))
    assert incomplete_beta(lo, a, b) <= incomplete_beta(hi, a, b) * (1 + 1e-9) + 1e-15


@given(st.floats(0.2, 10.0), st.floats(-3.0, 5.0), st.floats(0.02, 0.98))
@settings(max_examples=60, deadline=None)
def test_incomplete_beta_recurrence_identity(a, b, z):
    # B(z;a,b) = ((a+b)/b) B(z;a,b+1) - z^a (1-z)^b / b
    if abs(b) < 1e-3 or abs(round(b) - b) < 1e-3:
        return
    left = incomplete_beta(z, a, b)
    right = (a + b) / b * incomplete_beta(z, a, b + 1.0) - z ** a * (1 - z) ** b / b
    assert math.isclose(left, right, rel_tol=1e-7, abs_tol=1e-12)


# --------------------------------------------------------------- normal ---

def test_std_normal_cdf_against_mpmath():
    for x in (-8.0, -3.0, -1.0, 0.0, 0.5, 2.0, 6.0):
        assert math.isclose(std_normal_cdf(x), float(mp.ncdf(x)), rel_tol=1e-14)
        assert math.isclose(std_normal_sf(x), float(1 - mp.ncdf(x)), rel_tol=1e-13)


def test_log_std_normal_sf_deep_tail():
    for x in (1.0, 5.0, 10.0, 24.9, 25.1, 30.0, 40.0, 100.0):
        ref = float(mp.log(mp.erfc(x / mp.sqrt(2)) / 2))
        assert math.isclose(log_std_normal_sf(x), ref, rel_tol=1e-9), x


@given(st.floats(-30.0, 30.0))
@settings(max_examples=100, deadline=None)
def test_normal_cdf_sf_complement(x):
    assert math.isclose(std_normal_cdf(x) + std_normal_sf(x), 1.0, abs_tol=1e-14)
