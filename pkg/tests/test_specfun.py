import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import spherical_jn

from zetamoments import specfun as sf
from zetamoments.errors import DomainError


@pytest.mark.parametrize("z", [0.1, 0.5, 1.0, 2.5, 10.0, 99.5, 170.3])
def test_log_gamma_matches_mpmath(z):
    assert sf.log_gamma(z) == pytest.approx(float(mpmath.loggamma(z)), rel=1e-14, abs=1e-15)


def test_log_gamma_rejects_nonpositive():
    with pytest.raises(DomainError):
        sf.log_gamma(0.0)
    with pytest.raises(DomainError):
        sf.log_gamma(float("nan"))


@pytest.mark.parametrize(
    "a, n, expected",
    [(1.0, 5, 120.0), (0.5, 3, 0.5 * 1.5 * 2.5), (-2.5, 2, (-2.5) * (-1.5)), (-3.5, 3, -3.5 * -2.5 * -1.5), (4.0, 0, 1.0)],
)
def test_log_pochhammer_values(a, n, expected):
    sign, la = sf.log_pochhammer(a, n)
    assert sign * math.exp(la) == pytest.approx(expected, rel=1e-13)


def test_log_pochhammer_zero_flag():
    assert sf.log_pochhammer(-3.0, 5) == (0, -math.inf)
    assert sf.log_pochhammer(-3.0, 3)[0] == -1


@pytest.mark.parametrize("z", [0.3, 0.5, 1.7, 3.0, 5.5, 9.99, 10.5, 37.2, 150.0, 900.0, 1500.0, 3.0e4])
def test_log_barnes_g_matches_mpmath(z):
    ref = float(mpmath.log(mpmath.barnesg(z)))
    assert sf.log_barnes_g(z) == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_barnes_g_integers():
    # G(n) = prod_{j < n-1} j!
    assert sf.barnes_g(1.0) == 1.0
    assert sf.barnes_g(2.0) == 1.0
    assert sf.barnes_g(5.0) == pytest.approx(1 * 2 * 6, rel=1e-14)
    assert sf.barnes_g(0.5) == pytest.approx(float(mpmath.barnesg(0.5)), rel=1e-13)


@given(st.floats(0.05, 60.0))
def test_barnes_recurrence(z):
    assert sf.log_barnes_g(z + 1) - sf.log_barnes_g(z) == pytest.approx(sf.log_gamma(z), abs=1e-10)


@pytest.mark.parametrize("edge", [10.0, 1000.0])
def test_barnes_branch_edges(edge):
    for z in (edge - 1e-7, edge + 1e-7):
        ref = float(mpmath.log(mpmath.barnesg(z)))
        assert sf.log_barnes_g(z) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("n", range(0, 8))
@pytest.mark.parametrize("x", [1e-3, 0.2, 1.0, 3.7, 9.0, 25.0, 80.0])
def test_sph_bessel_integer_vs_scipy(n, x):
    ref = spherical_jn(n, x)
    assert sf.sph_bessel_j(n, x) == pytest.approx(ref, rel=1e-11, abs=1e-15)


@pytest.mark.parametrize("n", [-1.0, -0.5, 0.5, 1.5, 2.5, 3.3])
@pytest.mark.parametrize("x", [0.01, 0.7, 4.0, 15.0, 60.0, 120.0])
def test_sph_bessel_real_order_vs_mpmath(n, x):
    ref = float(mpmath.sqrt(mpmath.pi / (2 * x)) * mpmath.besselj(n + 0.5, x))
    assert sf.sph_bessel_j(n, x) == pytest.approx(ref, rel=1e-10, abs=1e-15)


def test_sph_bessel_at_zero():
    assert sf.sph_bessel_j(0, 0.0) == 1.0
    assert sf.sph_bessel_j(3, 0.0) == 0.0


def test_sph_bessel_closed_minus_one():
    # j_{-1}(x) = cos(x)/x
    for x in (0.3, 2.0, 11.0):
        assert sf.sph_bessel_trig(-1, x) == pytest.approx(math.cos(x) / x, rel=1e-14)


@given(st.integers(0, 6), st.floats(0.01, 30.0))
def test_bessel_paths_agree(n, x):
    assert abs(sf.sph_bessel_series(n, x) - sf.sph_bessel_trig(n, x)) < 1e-12


@given(st.floats(0.5, 4.0), st.floats(0.5, 30.0))
def test_bessel_three_term_recurrence(n, x):
    jn = sf.sph_bessel_j(n, x)
    if abs(jn) < 1e-3:
        return
    lhs = sf.sph_bessel_j(n - 1, x) + sf.sph_bessel_j(n + 1, x)
    assert lhs == pytest.approx((2 * n + 1) * jn / x, rel=1e-10)


def test_sph_bessel_domain():
    with pytest.raises(DomainError):
        sf.sph_bessel_j(1, -1.0)
    with pytest.raises(DomainError):
        sf.sph_bessel_j(-1.5, 1.0)
    with pytest.raises(DomainError):
        sf.sph_bessel_trig(2, 0.0)


def test_hankel_asymptotic_used_far_out():
    # non-integer order, large x: asymptotic path against mpmath
    x = 400.0
    ref = float(mpmath.sqrt(mpmath.pi / (2 * x)) * mpmath.besselj(2.25 + 0.5, x))
    assert sf.sph_bessel_trig(2.25, x) == pytest.approx(ref, rel=1e-12, abs=1e-16)
    assert np.isfinite(sf.sph_bessel_j(2.25, x))
