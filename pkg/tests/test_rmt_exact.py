import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zetamoments import rmt_exact as rx
from zetamoments.errors import DomainError, MomentOverflowError, UnsupportedMethodError


def test_moment_mn_small_cases():
    assert rx.moment_mn(1, 1) == pytest.approx(2.0, rel=1e-14)  # |1 - e^{it}|^2 averages to 2
    assert rx.moment_mn(4, 1) == pytest.approx(5.0, rel=1e-13)  # M_N(2) = N + 1
    assert rx.moment_mn(1, 2) == pytest.approx(6.0, rel=1e-13)  # binomial(4, 2)
    assert rx.moment_mn(2, 2) == pytest.approx(20.0, rel=1e-13)
    assert rx.moment_mn(7, 0) == 1.0


def test_moment_mn_against_mpmath_product():
    N, k = 9, 1.3
    ref = mpmath.fprod(
        mpmath.gamma(j) * mpmath.gamma(j + 2 * k) / mpmath.gamma(j + k) ** 2 for j in range(1, N + 1)
    )
    assert rx.moment_mn(N, k) == pytest.approx(float(ref), rel=1e-12)


def test_moment_mn_domain_and_overflow():
    with pytest.raises(DomainError):
        rx.moment_mn(3, -0.5)
    with pytest.raises(DomainError):
        rx.moment_mn(0, 1)
    assert rx.log_moment_mn(1000, 20) > 709
    with pytest.raises(MomentOverflowError):
        rx.moment_mn(1000, 20)


def test_leading_coefficients():
    assert rx.leading_coeff(0) == pytest.approx(1.0)
    assert rx.leading_coeff(1) == pytest.approx(1.0, rel=1e-12)
    assert rx.leading_coeff(2) == pytest.approx(1 / 12, rel=1e-12)
    assert rx.leading_coeff(3) == pytest.approx(42 / math.factorial(9), rel=1e-12)
    assert rx.leading_coeff(4) == pytest.approx(24024 / math.factorial(16), rel=1e-12)


def test_moment_over_leading_tends_to_one():
    k = 1.5
    r = [rx.moment_mn(N, k) / (rx.leading_coeff(k) * N ** (k * k)) for N in (100, 400)]
    assert abs(r[1] - 1) < abs(r[0] - 1) < 0.05


@pytest.mark.parametrize("beta", [0.0, 0.4, 1.0, 2.5, math.pi])
def test_joint_n1_closed_form(beta):
    # N = 1, k = 1: E|1-e^{it}|^2 |1-e^{i(t-beta)}|^2 = 4 + 2 cos(beta)
    ref = 4 + 2 * math.cos(beta)
    assert rx.joint_moment_exact(1, 1, beta) == pytest.approx(ref, rel=1e-13)
    assert rx.joint_moment_trig_form(1, 1, beta) == pytest.approx(ref, rel=1e-13)


@given(st.integers(1, 12), st.sampled_from([0.25, 0.5, 1.0, 1.5, 2.0, 3.0]), st.floats(-3.1, 3.1))
def test_exact_matches_trig_form(N, k, beta):
    a = rx.joint_moment_exact(N, k, beta)
    b = rx.joint_moment_trig_form(N, k, beta)
    assert b == pytest.approx(a, rel=1e-9)


@given(st.integers(1, 15), st.floats(0.0, 3.0), st.floats(0.05, 3.1))
def test_joint_even_and_periodic(N, k, beta):
    a = rx.joint_moment_exact(N, k, beta)
    assert rx.joint_moment_exact(N, k, -beta) == pytest.approx(a, rel=1e-12)
    assert rx.joint_moment_exact(N, k, beta + 2 * math.pi) == pytest.approx(a, rel=1e-10)


@pytest.mark.parametrize("N", [1, 5, 17, 50])
@pytest.mark.parametrize("k", [0.5, 1, 2, 3])
def test_beta_zero_reduction(N, k):
    assert rx.joint_moment_exact(N, k, 0.0) == pytest.approx(rx.moment_mn(N, k + 1), rel=1e-10)


def test_joint_large_n_cancellation():
    # near beta = pi the terms cancel by ~9 orders of magnitude
    a = rx.joint_moment_exact(199, 2, 3.0)
    b = rx.joint_moment_trig_form(199, 2, 3.0)
    assert a > 0
    assert b == pytest.approx(a, rel=1e-9)


def test_joint_asymptotic_converges():
    # E_N / N^{(k+1)^2} -> leading * S_k(y) at fixed y = N beta; error ~ 1/N
    k, y = 1, 2.0
    errs = []
    for N in (20, 40, 80):
        errs.append(abs(rx.joint_moment_exact(N, k, y / N) / rx.joint_moment_asymptotic(N, k, y) - 1))
    assert errs[2] < errs[1] < errs[0]
    assert 0.3 < errs[2] / errs[1] < 0.7


def test_joint_asymptotic_at_zero():
    # S_k(0) = k!^2 k / (k! (2k)! (2k+1)!) * (k-1)! ... gives M_N(2k+2) leading term
    N, k = 30, 1
    assert rx.joint_moment_asymptotic(N, k, 0.0) == pytest.approx(
        rx.leading_coeff(k + 1) * N ** ((k + 1) ** 2), rel=1e-12
    )


def test_joint_asymptotic_branches_agree():
    # the series and the F_k / y^{2k} branch meet continuously
    k = 1
    y = 2 * k + 10
    lo = rx.joint_moment_asymptotic(10, k, y - 1e-9)
    hi = rx.joint_moment_asymptotic(10, k, y + 1e-9)
    assert hi == pytest.approx(lo, rel=1e-8)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_fk_three_methods(k):
    for x in (0.05, 0.3, 1.0, 2.7, 7.5, 13.0, 20.0):
        vals = [rx.f_k(k, x, m) for m in rx.FkMethod]
        assert max(vals) - min(vals) < 1e-10


@given(st.floats(0.5, 4.0), st.floats(0.01, 20.0))
def test_fk_series_vs_bessel_real_k(k, x):
    assert rx.f_k(k, x, "series") == pytest.approx(rx.f_k(k, x, "bessel"), abs=1e-10)


def test_fk_closed_form_k1_is_one_minus_sinc_squared():
    for x in (0.5, 2.0, 9.0):
        assert rx.f_k(1, x) == pytest.approx(1 - (math.sin(x) / x) ** 2, rel=1e-13)


def test_fk_limits():
    for k in (1, 2, 3):
        assert abs(rx.f_k(k, 200.0) - 1) < 0.05
        assert rx.f_k(k, 0.0) == 0.0
    assert rx.f_k(0, 3.0) == pytest.approx(1.0)


def test_fk_small_x_power_law():
    # F_k(2x) ~ leading series coefficient (2x)^{2k}
    k, x = 2, 1e-3
    c = k * math.factorial(k - 1) * math.factorial(k) / (math.factorial(2 * k) * math.factorial(2 * k + 1))
    assert rx.f_k(k, x) == pytest.approx(c * (2 * x) ** (2 * k), rel=1e-5)


def test_fk_errors():
    with pytest.raises(UnsupportedMethodError):
        rx.f_k(1.5, 1.0, "closed")
    with pytest.raises(DomainError):
        rx.f_k(-0.5, 1.0)
    with pytest.raises(DomainError):
        rx.f_k(1, -1.0)


def test_displaced_leading_and_scaling():
    assert rx.displaced_moment_leading(10, 1, 1.0) == pytest.approx(10 * (1 - math.sin(1) ** 2), rel=1e-12)
    for k in (0.5, 1, 2):
        r = rx.displaced_moment_leading(40, k, 1.3) / rx.displaced_moment_leading(20, k, 1.3)
        assert r == pytest.approx(2 ** (k * k), rel=1e-12)
    with pytest.raises(DomainError):
        rx.displaced_moment_leading(2, 1, 2 * math.pi)


def test_factorization_special_cases():
    assert rx.factorization_rhs(1, 1, math.pi) == pytest.approx(4.0)
    assert rx.factorization_rhs(1, 1, 1.0) == pytest.approx(4 * math.sin(0.5) ** 2)
    assert rx.factorization_rhs(6, 0, 1.0) == 1.0
    assert rx.factorization_rhs(6, 2, 0.0) == 0.0
    assert rx.factorization_rhs(2, 1, math.pi) == pytest.approx(4.0)


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("x", [0.5, 1.0, 5.0])
def test_leading_order_deviation_halves(k, x):
    devs = [
        abs(rx.factorization_rhs(N, k, 2 * x / N) / rx.displaced_moment_leading(N, k, x) - 1)
        for N in (25, 50, 100, 200)
    ]
    for a, b in zip(devs, devs[1:]):
        assert 0.3 <= b / a <= 0.7


@pytest.mark.parametrize("k", [0.5, 1, 2, 3, 5, 2.5, 0.1])
def test_wz_sum_is_one(k):
    for p in range(31):
        assert abs(rx.wz_check(k, p) - 1.0) < 1e-10


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_wz_rational_exact(k):
    for p in range(0, 31, 3):
        assert rx.wz_check_rational(k, p) == Fraction(1)


def test_wz_domain():
    with pytest.raises(DomainError):
        rx.wz_check(0, 3)
    with pytest.raises(DomainError):
        rx.wz_check(1, -1)
