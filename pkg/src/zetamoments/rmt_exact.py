"""Closed-form moments of characteristic polynomials of Haar unitary matrices.

Conventions: ``beta`` is an angle, ``y = N * beta`` and ``x = N * beta / 2``.
``f_k(k, x)`` returns the shape function evaluated at ``2x``.

The two exact expressions for E_N{|Z(0)|^{2k} |Z(beta)|^2} are double sums
whose terms cancel heavily for beta away from 0; both are accumulated at
adaptive extended precision, with consecutive terms generated from their
rational ratios and the Gamma-function prefactor kept in log space.
"""

import enum
import math
from fractions import Fraction

from . import _hiprec
from .errors import DomainError, MomentOverflowError, UnsupportedMethodError
from .specfun import log_barnes_g, sph_bessel_j

lg = math.lgamma


class FkMethod(str, enum.Enum):
    SERIES = "series"
    BESSEL = "bessel"
    CLOSED = "closed"


def _check_nk(N, k):
    if int(N) != N or N < 1:
        raise DomainError(f"matrix size must be a positive integer, got {N}")
    if not math.isfinite(k) or k <= -0.5:
        raise DomainError(f"exponent k must exceed -1/2, got {k}")


def _finite(value, what):
    if not math.isfinite(value):
        raise DomainError(f"{what} must be finite, got {value}")


def _exp_or_overflow(log_value, what):
    if log_value > 709.0:
        raise MomentOverflowError(f"{what} overflows a double (log = {log_value:.1f})")
    return math.exp(log_value)


def log_moment_mn(N, k):
    """log M_N(2k) = sum_j [log G(j) + log G(j+2k) - 2 log G(j+k)]."""
    _check_nk(N, k)
    return math.fsum(lg(j) + lg(j + 2 * k) - 2.0 * lg(j + k) for j in range(1, int(N) + 1))


def moment_mn(N, k):
    """M_N(2k) = E_N{|Z_U(0)|^{2k}} = prod_{j=1}^N G(j)G(j+2k)/G(j+k)^2."""
    return _exp_or_overflow(log_moment_mn(N, k), "M_N(2k)")


def log_leading_coeff(k):
    if not k > -0.5:
        raise DomainError(f"leading_coeff requires k > -1/2, got {k}")
    return 2.0 * log_barnes_g(k + 1.0) - log_barnes_g(2.0 * k + 1.0)


def leading_coeff(k):
    """G(k+1)^2 / G(2k+1), the large-N coefficient of M_N(2k) / N^{k^2}."""
    return math.exp(log_leading_coeff(k))


# --------------------------------------------------------------------------
# Joint moment E_N{|Z(0)|^{2k} |Z(beta)|^2}
# --------------------------------------------------------------------------


def _joint_prefactor_log(N, k):
    # M_N(2k) Gamma(N+1+2k) N! / Gamma(N+1+k)^2
    return log_moment_mn(N, k) + lg(N + 1 + 2 * k) + lg(N + 1) - 2.0 * lg(N + 1 + k)


def _finish(log_pref, sign, log_sum, what):
    if sign == 0:
        return 0.0
    if sign < 0:
        # Only reachable through rounding of an exactly-zero quantity.
        return -_exp_or_overflow(log_pref + log_sum, what)
    return _exp_or_overflow(log_pref + log_sum, what)


def joint_moment_exact(N, k, beta):
    """E_N{|Z(0)|^{2k} |Z(beta)|^2} from the expanded double sum over (n, m).

    The inner sum over m is symmetric under m -> N - n - m, so only the
    cosine part of exp(i beta (2m - N + n)) survives.
    """
    _check_nk(N, k)
    _finite(beta, "beta")
    N = int(N)
    beta = math.remainder(beta, 2.0 * math.pi)
    s2 = (2.0 * math.sin(beta / 2.0)) ** 2
    # n = 0, m = 0 term of the bracket, in log form:
    # Gamma(N+k+1) Gamma(k+1) / (Gamma(2k+1) Gamma(N+1))
    log_a00 = lg(N + k + 1) + lg(k + 1) - lg(2 * k + 1) - lg(N + 1)
    n_max = N if s2 > 0 else 0

    def build(ctx):
        kk = ctx.mpf(k)
        b = ctx.mpf(beta)
        cos_j = {j: ctx.cos(j * b) for j in range(-N, N + 1)}
        s2m = 4 * ctx.sin(b / 2) ** 2
        terms = []
        head = ctx.mpf(1)
        for n in range(n_max + 1):
            if n > 0:
                head = head * s2m * (kk + n) * (N - n + 1) / (n * (2 * kk + n))
            t = head
            for m in range(N - n + 1):
                if m > 0:
                    t = t * (kk + n + m) * (N - n - m + 1) / ((N + kk - m + 1) * m)
                terms.append(t * cos_j[2 * m - N + n])
        return terms

    sign, log_sum = _hiprec.adaptive_sum(build)
    return _finish(_joint_prefactor_log(N, k) + log_a00, sign, log_sum, "joint moment")


def joint_moment_trig_form(N, k, beta):
    """E_N{|Z(0)|^{2k} |Z(beta)|^2} from the (sin beta)^{2m} (cos beta)^{N-n-2m} expansion.

    Coefficients T(N, k, m, n) carry half-integer Gamma arguments; they are
    generated from T(N, k, 0, 0) by their rational ratios in m and n.
    """
    _check_nk(N, k)
    _finite(beta, "beta")
    N = int(N)
    beta = math.remainder(beta, 2.0 * math.pi)
    # log T(N, k, 0, 0)
    log_t00 = (
        log_moment_mn(N, k)
        + lg(N + 2 * k + 1)
        + lg(N / 2 + k + 1)
        + lg(N / 2 + k + 1.5)
        - 2.0 * lg(N + k + 1)
        + N * math.log(2.0)
        + lg(k + 1)
        - lg(2 * k + 1)
        - lg(k + 1.5)
    )

    def build(ctx):
        kk = ctx.mpf(k)
        b = ctx.mpf(beta)
        sb2 = ctx.sin(b) ** 2
        cb = ctx.cos(b)
        s2m = 4 * ctx.sin(b / 2) ** 2
        terms = []
        head = ctx.mpf(1)
        for n in range(N + 1):
            if n > 0:
                h = ctx.mpf(N + n - 1) / 2 + kk  # (N + n')/2 + k at n' = n - 1
                head = head * (h + 1) * (N - n + 1) * (kk + n) / (
                    2 * n * (2 * kk + n) * (n + kk + ctx.mpf(1) / 2)
                )
            a = -ctx.mpf(N - n) / 2
            t = head
            trig_n = s2m**n
            for m in range((N - n) // 2 + 1):
                if m > 0:
                    t = t * (a + m - 1) * (a + m - ctx.mpf(1) / 2) / (
                        m * (n + kk + m + ctx.mpf(1) / 2)
                    )
                sgn = -1 if m % 2 else 1
                terms.append(sgn * t * trig_n * sb2**m * cb ** (N - n - 2 * m))
        return terms

    sign, log_sum = _hiprec.adaptive_sum(build)
    return _finish(log_t00, sign, log_sum, "joint moment")


def _s_series_log(k, y):
    """(sign, log) of S_k(y) = sum_p k (k-1+p)! (k+p)! / (p! (2k+p)! (2k+1+2p)!) (-y^2)^p."""
    log_a0 = 2.0 * lg(k + 1) - lg(2 * k + 1) - lg(2 * k + 2)

    def first(ctx):
        return ctx.mpf(1)

    def ratio(ctx, p):
        kk = ctx.mpf(k)
        return -(ctx.mpf(y) ** 2) * (kk + p) * (kk + p + 1) / (
            (p + 1) * (2 * kk + p + 1) * (2 * kk + 2 * p + 2) * (2 * kk + 2 * p + 3)
        )

    sign, log_s = _hiprec.ratio_series(first, ratio)
    return sign, log_a0 + log_s


def joint_moment_asymptotic(N, k, y):
    """Large-N form G(k+1)^2/G(2k+1) S_k(y) N^{(k+1)^2}, with y = N beta."""
    _check_nk(N, k)
    _finite(y, "y")
    y = abs(y)
    if y > 2 * k + 10:
        # S_k(y) = F_k(y) / y^{2k}
        log_s = math.log(f_k(k, y / 2.0, FkMethod.BESSEL)) - 2 * k * math.log(y)
        sign = 1
    else:
        sign, log_s = _s_series_log(k, y)
    if sign == 0:
        return 0.0
    log_v = log_leading_coeff(k) + log_s + (k + 1) ** 2 * math.log(N)
    return sign * _exp_or_overflow(log_v, "asymptotic joint moment")


# --------------------------------------------------------------------------
# The shape function F_k
# --------------------------------------------------------------------------

_CLOSED_MIN_X = 0.3


def _fk_series(k, x):
    if x == 0:
        return 1.0 if k == 0 else 0.0
    y = 2.0 * x
    sign, log_s = _s_series_log(k, y)
    if sign == 0:
        return 0.0
    return sign * math.exp(log_s + 2 * k * math.log(y))


def _fk_bessel(k, x):
    if x == 0:
        return 1.0 if k == 0 else 0.0
    jk = sph_bessel_j(k, x)
    jk1 = sph_bessel_j(k - 1, x)
    return x * x * jk * jk + x * x * jk1 * jk1 - 2 * k * x * jk * jk1


def _fk_closed(k, x):
    if x < _CLOSED_MIN_X:
        # the closed forms lose all digits to cancellation as x -> 0
        return _fk_series(k, x)
    s = math.sin(x)
    s2x = math.sin(2 * x)
    x2 = x * x
    if k == 1:
        return (x2 - s * s) / x2
    if k == 2:
        return (x2 * x2 - 3 * x2 + 3 * x * s2x + (2 * x2 - 3) * s * s) / (x2 * x2)
    x4 = x2 * x2
    return (
        x4 * x2 - 3 * x4 - 45 * x2 + (-12 * x2 * x + 45 * x) * s2x + (-3 * x4 + 72 * x2 - 45) * s * s
    ) / (x4 * x2)


def f_k(k, x, method=None):
    """F_k(2x) by the power series, the spherical-Bessel form, or the closed form.

    ``method=None`` picks the cheapest accurate route.  The closed form is
    available for k in {1, 2, 3} only.
    """
    if not math.isfinite(k) or k <= -0.5:
        raise DomainError(f"f_k requires k > -1/2, got {k}")
    _finite(x, "x")
    if x < 0:
        raise DomainError(f"f_k requires x >= 0, got {x}")
    if method is None:
        if x <= 1.0:
            method = FkMethod.SERIES
        elif k in (1, 2, 3):
            method = FkMethod.CLOSED
        else:
            method = FkMethod.BESSEL
    method = FkMethod(method)
    if method is FkMethod.SERIES:
        return _fk_series(k, x)
    if method is FkMethod.BESSEL:
        return _fk_bessel(k, x)
    if k not in (1, 2, 3):
        raise UnsupportedMethodError(f"closed form of F_k exists only for k in {{1, 2, 3}}, got {k}")
    return _fk_closed(int(k), x)


def displaced_moment_leading(N, k, x):
    """G(k+1)^2/G(2k+1) F_k(2x) N^{k^2}: leading term of E_N{|Z(theta_1 + 2x/N)|^{2k}}."""
    _check_nk(N, k)
    _finite(x, "x")
    if abs(x) >= math.pi * N:
        raise DomainError(f"|x| must be below pi*N = {math.pi * N}, got {x}")
    fk = f_k(k, abs(x))
    if fk == 0:
        return 0.0
    return math.exp(log_leading_coeff(k) + math.log(fk) + k * k * math.log(N))


def factorization_rhs(N, k, beta):
    """(1/N) |2 sin(beta/2)|^{2k} E_{N-1}{|Z(0)|^{2k} |Z(beta)|^2}.

    Equals E_N{|Z(theta_n + beta)|^{2k}} exactly for any eigenangle theta_n.
    For N = 1 the expectation over the empty product is 1.
    """
    _check_nk(N, k)
    _finite(beta, "beta")
    chord = abs(2.0 * math.sin(beta / 2.0))
    if k == 0:
        return 1.0
    if chord == 0:
        if k < 0:
            raise DomainError("negative moment at the eigenangle itself is infinite")
        return 0.0
    inner = 1.0 if N == 1 else joint_moment_exact(N - 1, k, beta)
    return chord ** (2 * k) * inner / N


# --------------------------------------------------------------------------
# Wilf-Zeilberger sum
# --------------------------------------------------------------------------


def wz_check(k, p):
    """sum_{n=0}^p (-1)^n (k+n)! p! (2k+p)! / (k (p-n)! n! (2k+n)! (k-1+p)!); identically 1.

    Terms are produced by their ratio
    t_{n+1}/t_n = -(p-n)(k+n+1) / ((n+1)(2k+n+1)) from
    t_0 = (2k+1)_p / (k)_p, and summed at extended precision.
    """
    _finite(k, "k")
    if k == 0:
        raise DomainError("wz_check divides by k; k = 0 is excluded")
    if int(p) != p or p < 0:
        raise DomainError(f"p must be a non-negative integer, got {p}")
    p = int(p)

    def first(ctx):
        kk = ctx.mpf(k)
        t = ctx.mpf(1)
        for j in range(p):
            t = t * (2 * kk + 1 + j) / (kk + j)
        return t

    def ratio(ctx, n):
        if n >= p:
            return 0
        kk = ctx.mpf(k)
        return -(p - n) * (kk + n + 1) / ((n + 1) * (2 * kk + n + 1))

    sign, log_s = _hiprec.ratio_series(first, ratio)
    return _hiprec.signed_exp(sign, log_s)


def wz_check_rational(k, p):
    """Exact rational value of the WZ sum for integer k >= 1 (factorial oracle)."""
    if int(k) != k or k < 1:
        raise DomainError("the rational oracle needs a positive integer k")
    k, p = int(k), int(p)
    f = math.factorial
    return sum(
        Fraction((-1) ** n * f(k + n) * f(p) * f(2 * k + p), k * f(p - n) * f(n) * f(2 * k + n) * f(k - 1 + p))
        for n in range(p + 1)
    )
