import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robin_eigen.errors import DomainError
from robin_eigen.specfun import (
    bessel_i,
    bessel_i_prime,
    bessel_k,
    bessel_k_prime,
    bessel_scaled,
    scaled_neighbourhood,
    tilde_series,
    two_nu_of,
)

ORDERS = (0, 0.5, 1, 1.5, 2, 2.5)
mpmath.mp.dps = 40


def rel(a, b):
    return abs(a - b) / abs(b)


# -- spot values --------------------------------------------------------------

def test_i_at_zero():
    assert bessel_i(0, 0.0) == 1.0
    assert bessel_i(1, 0.0) == 0.0
    assert bessel_i(2.5, 0.0) == 0.0


def test_i_half_closed_form_at_one():
    expected = math.sqrt(2 / math.pi) * math.sinh(1.0)
    assert rel(bessel_i(0.5, 1.0), expected) < 1e-15
    assert abs(bessel_i(0.5, 1.0) - 0.9376748882) < 1e-10


def test_k_half_closed_form_at_one():
    assert rel(bessel_k(0.5, 1.0), math.sqrt(math.pi / 2) * math.exp(-1.0)) < 1e-15
    assert abs(bessel_k(0.5, 1.0) - 0.4610685044) < 1e-10


def test_wronskian_at_two():
    w = bessel_i(0, 2.0) * bessel_k(1, 2.0) + bessel_i(1, 2.0) * bessel_k(0, 2.0)
    assert abs(w - 0.5) < 1e-15


def test_k_three_halves_from_recurrence():
    z = 5.0
    k_half = math.sqrt(math.pi / (2 * z)) * math.exp(-z)
    k_minus_half = k_half  # K is even in its order
    k_three_halves = k_minus_half + (2 * 0.5 / z) * k_half
    assert rel(bessel_k(1.5, z), k_three_halves) < 1e-14


def test_derivative_examples():
    assert rel(bessel_i_prime(0, 1.0), bessel_i(1, 1.0)) < 1e-15
    fd = (bessel_i(1, 3.0005) - bessel_i(1, 2.9995)) / 0.001
    assert abs(bessel_i_prime(1, 3.0) - fd) <= 1e-6
    assert rel(bessel_k_prime(0.5, 2.0), -(1 + 1 / (2 * 2)) * bessel_k(0.5, 2.0)) < 1e-14


def test_i_half_derivative_uses_cosh_branch():
    # I_{-1/2} is sqrt(2/(pi z)) cosh z, not I_{1/2}
    z = 0.7
    exact = math.sqrt(2 / (math.pi * z)) * (math.cosh(z) - math.sinh(z) / (2 * z))
    assert rel(bessel_i_prime(0.5, z), exact) < 1e-14


def test_scaled_examples():
    assert bessel_scaled(0.5, 10.0).tilde_k == 1.0
    t = bessel_scaled(0, 1000.0).tilde_i
    assert abs(t - (1 + 1 / 8000)) < 1e-6
    assert t > 1.000125
    v = bessel_scaled(1, 50.0)
    assert rel(v.tilde_i * math.exp(50) / math.sqrt(100 * math.pi), bessel_i(1, 50.0)) < 1e-12


def test_scaled_far_out_is_finite():
    for z in (700.0, 1e4, 1e6):
        for nu in ORDERS:
            v = bessel_scaled(nu, z)
            ti, tk = tilde_series(nu, z, terms=3)
            assert abs(v.tilde_i - ti) < 1e-7 and abs(v.tilde_k - tk) < 1e-7


def test_tilde_series_examples():
    assert tilde_series(0.5, 3.7, terms=3) == (1.0, 1.0)
    ti, tk = tilde_series(0, 100.0, terms=2)
    assert ti == pytest.approx(1 + 1 / 800, rel=1e-15)
    assert tk == pytest.approx(1 - 1 / 800, rel=1e-15)


@pytest.mark.parametrize("bad", [-0.5, 0.3, 1.25, math.nan])
def test_unsupported_orders(bad):
    with pytest.raises(DomainError):
        two_nu_of(bad)


@pytest.mark.parametrize("fn", [bessel_k, bessel_scaled, bessel_i_prime])
def test_nonpositive_argument_rejected(fn):
    with pytest.raises(DomainError):
        fn(0, 0.0)
    with pytest.raises(DomainError):
        fn(1, -1.0)


def test_negative_argument_rejected_for_i():
    with pytest.raises(DomainError):
        bessel_i(0, -1e-3)


def test_tilde_series_rejects_bad_depth():
    with pytest.raises(DomainError):
        tilde_series(0, 1.0, terms=4)


# -- independent high-precision oracle ----------------------------------------

ORACLE_Z = [10 ** (-3 + 0.15 * j) for j in range(32)] + [30.0, 30.5, 120.0, 333.3, 500.0]


@pytest.mark.parametrize("nu", ORDERS)
def test_against_mpmath(nu):
    for z in ORACLE_Z:
        i_ref = float(mpmath.besseli(nu, z))
        k_ref = float(mpmath.besselk(nu, z))
        tol_i = 1e-13 if z <= 30 else 1e-12
        assert rel(bessel_i(nu, z), i_ref) <= tol_i, (nu, z)
        assert rel(bessel_k(nu, z), k_ref) <= 1e-12, (nu, z)


@pytest.mark.parametrize("nu", ORDERS)
def test_scaled_against_mpmath_large_z(nu):
    for z in (800.0, 5e3, 1e5):
        ti_ref = mpmath.besseli(nu, z) * mpmath.sqrt(2 * mpmath.pi * z) * mpmath.exp(-z)
        tk_ref = mpmath.besselk(nu, z) * mpmath.sqrt(2 * z / mpmath.pi) * mpmath.exp(z)
        v = bessel_scaled(nu, z)
        assert rel(v.tilde_i, float(ti_ref)) < 1e-13
        assert rel(v.tilde_k, float(tk_ref)) < 1e-13


# -- properties ---------------------------------------------------------------

orders = st.sampled_from(ORDERS)
args = st.floats(min_value=1e-3, max_value=500.0, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(orders, args)
def test_wronskian(nu, z):
    w = z * (bessel_k(nu, z) * bessel_i_prime(nu, z) - bessel_k_prime(nu, z) * bessel_i(nu, z))
    assert abs(w - 1) <= 1e-11


@settings(max_examples=300, deadline=None)
@given(orders, args)
def test_scaled_wronskian(nu, z):
    (_, ti, ti_up), (_, tk, tk_up) = scaled_neighbourhood(two_nu_of(nu), z)
    assert abs(0.5 * (ti * tk_up + ti_up * tk) - 1) <= 1e-11


@settings(max_examples=300, deadline=None)
@given(st.sampled_from((1, 1.5, 2, 2.5)), args)
def test_recurrence(nu, z):
    i_lo, i_mid, i_hi = bessel_i(nu - 1, z), bessel_i(nu, z), bessel_i(nu + 1, z)
    assert abs(i_lo - i_hi - (2 * nu / z) * i_mid) <= 1e-11 * max(abs(i_lo), abs(i_hi))
    k_lo, k_mid, k_hi = bessel_k(nu - 1, z), bessel_k(nu, z), bessel_k(nu + 1, z)
    assert abs(k_lo - k_hi + (2 * nu / z) * k_mid) <= 1e-11 * max(abs(k_lo), abs(k_hi))


@settings(max_examples=300, deadline=None)
@given(orders, args)
def test_scaled_matches_unscaled(nu, z):
    v = bessel_scaled(nu, z)
    i_from_scaled = v.tilde_i * math.exp(z) / math.sqrt(2 * math.pi * z)
    k_from_scaled = v.tilde_k * math.sqrt(math.pi / (2 * z)) * math.exp(-z)
    assert rel(i_from_scaled, bessel_i(nu, z)) <= 1e-12
    assert rel(k_from_scaled, bessel_k(nu, z)) <= 1e-12


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=1e-3, max_value=500.0))
def test_half_integer_closed_forms(z):
    s = math.sqrt(2 / (math.pi * z))
    assert rel(bessel_i(0.5, z), s * math.sinh(z)) <= 1e-12
    kk = math.sqrt(math.pi / (2 * z)) * math.exp(-z)
    assert rel(bessel_k(0.5, z), kk) <= 1e-12
    assert rel(bessel_k(1.5, z), kk * (1 + 1 / z)) <= 1e-12
    assert rel(bessel_k(2.5, z), kk * (1 + 3 / z + 3 / z ** 2)) <= 1e-12
    if z >= 1:  # the elementary I_{3/2} form cancels catastrophically below
        assert rel(bessel_i(1.5, z), s * (math.cosh(z) - math.sinh(z) / z)) <= 1e-12


def _log_slope(zs, errs):
    lx = [math.log(z) for z in zs]
    ly = [math.log(e) for e in errs]
    n = len(lx)
    mx, my = sum(lx) / n, sum(ly) / n
    return sum((a - mx) * (b - my) for a, b in zip(lx, ly)) / sum((a - mx) ** 2 for a in lx)


@pytest.mark.parametrize("nu", [0, 1, 2])
@pytest.mark.parametrize("terms", [1, 2, 3])
def test_tilde_series_remainder_order(nu, terms):
    zs = [100 * 10 ** (j / 10) for j in range(11)]
    for pick in (0, 1):
        errs = [abs(bessel_scaled(nu, z).tilde_i - tilde_series(nu, z, terms)[0]) if pick == 0
                else abs(bessel_scaled(nu, z).tilde_k - tilde_series(nu, z, terms)[1]) for z in zs]
        assert _log_slope(zs, errs) <= -terms + 0.1


def test_tilde_series_third_order_constant():
    zs = [100 * 10 ** (j / 10) for j in range(11)]
    consts = [abs(bessel_scaled(0, z).tilde_i - tilde_series(0, z, 3)[0]) * z ** 3 for z in zs]
    c = max(consts)
    assert abs(bessel_scaled(0, 200.0).tilde_i - tilde_series(0, 200.0, 3)[0]) <= c / 200.0 ** 3
    # the next coefficient of the series is (1)(9)(25)/(3! 8^3) for mu = 0
    assert c == pytest.approx(225 / 3072, rel=0.05)
