"""Real special functions: log-Gamma, Barnes G, spherical Bessel, Pochhammer.

Everything here works on real arguments and in log space wherever the
plain value could overflow.  Series that cancel badly in double precision
are delegated to :mod:`zetamoments._hiprec`.
"""

import math

from . import _hiprec
from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
#: zeta'(-1), constant term of the large-argument expansion of log G.
ZETA_PRIME_MINUS_ONE = -0.16542114370045092921
LOG_2PI = math.log(2.0 * math.pi)

# Bernoulli numbers B_2, B_4, ..., B_20.
_BERNOULLI_EVEN = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
)


def _check_real(*values):
    for v in values:
        if not math.isfinite(v):
            raise DomainError(f"non-finite argument {v!r}")


def log_gamma(z):
    """Natural log of Gamma(z) for real z > 0."""
    _check_real(z)
    if z <= 0:
        raise DomainError(f"log_gamma requires z > 0, got {z}")
    return math.lgamma(z)


def log_pochhammer(a, n):
    """Sign and log-magnitude of the rising factorial (a)_n = a(a+1)...(a+n-1).

    Returns ``(sign, log_abs)``.  A vanishing product, which is what
    truncates sums carrying ``(-N)_{m+n}``, is reported as ``(0, -inf)``.
    """
    _check_real(a)
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a non-negative integer, got {n}")
    n = int(n)
    if n == 0:
        return 1, 0.0
    sign = 1
    log_abs = 0.0
    j = 0
    # Factors a + j <= 0 are few (at most ceil(-a)); take them one by one.
    while j < n and a + j <= 0:
        f = a + j
        if f == 0:
            return 0, -math.inf
        sign = -sign
        log_abs += math.log(-f)
        j += 1
    if j < n:
        log_abs += math.lgamma(a + n) - math.lgamma(a + j)
    return sign, log_abs


# --------------------------------------------------------------------------
# Barnes G
# --------------------------------------------------------------------------

_PRODUCT_TERMS = 64


def _hurwitz_zeta(s, a):
    """Hurwitz zeta(s, a) for s >= 2 and large a (Euler-Maclaurin)."""
    total = a ** (1.0 - s) / (s - 1.0) + 0.5 * a ** (-s)
    rising = s  # (s)_{2i-1}
    power = a ** (-s - 1.0)
    fact = 2.0
    for i, b in enumerate(_BERNOULLI_EVEN, start=1):
        term = b / fact * rising * power
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
        rising *= (s + 2 * i - 1) * (s + 2 * i)
        power /= a * a
        fact *= (2 * i + 1) * (2 * i + 2)
    return total


def _log_barnes_g_product(w):
    """log G(1 + w) from the Weierstrass product, for -1 < w <= 9."""
    head = 0.5 * w * LOG_2PI - 0.5 * (w + w * w * (1.0 + EULER_GAMMA))
    terms = []
    for m in range(1, _PRODUCT_TERMS + 1):
        r = w / m
        if abs(r) < 0.1:
            # m*(log(1+r) - r + r^2/2) without cancellation
            s = 0.0
            power = r ** 3
            j = 3
            while True:
                t = power / j
                s += t if j % 2 else -t
                if abs(t) < 1e-18 * abs(s):
                    break
                power *= r
                j += 1
            terms.append(m * s)
        else:
            terms.append(m * math.log1p(r) - w + w * w / (2 * m))
    # Tail over m > M: sum_j (-1)^(j+1) w^j / j * zeta(j-1, M+1).
    a = _PRODUCT_TERMS + 1.0
    tail = 0.0
    power = w ** 3
    j = 3
    while True:
        t = power / j * _hurwitz_zeta(j - 1.0, a)
        tail += t if j % 2 else -t
        if abs(t) <= 1e-17 * max(abs(tail), 1e-300) or j > 200:
            break
        power *= w
        j += 1
    terms.append(tail)
    return head + math.fsum(terms)


def _log_barnes_g_asymptotic(w):
    """log G(1 + w) for large w."""
    lw = math.log(w)
    total = (0.5 * w * w - 1.0 / 12.0) * lw - 0.75 * w * w + 0.5 * w * LOG_2PI
    total += ZETA_PRIME_MINUS_ONE
    w2 = w * w
    power = w2
    for g in range(1, len(_BERNOULLI_EVEN)):
        term = _BERNOULLI_EVEN[g] / (4.0 * g * (g + 1) * power)
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
        power *= w2
    return total


_ASYMPTOTIC_FROM = 1000.0


def log_barnes_g(z):
    """Natural log of the Barnes G-function for real z > 0.

    Uses the Weierstrass product on (0, 10], the recurrence
    G(z+1) = Gamma(z) G(z) upward from (9, 10] beyond that, and the
    large-argument expansion for z > 1000.
    """
    _check_real(z)
    if z <= 0:
        raise DomainError(f"log_barnes_g requires z > 0, got {z}")
    if z == int(z) and z <= 170:
        # G(n) = prod_{j<n-1} j!
        return math.fsum(math.lgamma(j + 1) for j in range(1, int(z) - 1))
    if z <= 10.0:
        return _log_barnes_g_product(z - 1.0)
    if z > _ASYMPTOTIC_FROM:
        return _log_barnes_g_asymptotic(z - 1.0)
    steps = math.ceil(z - 10.0)
    z0 = z - steps
    parts = [_log_barnes_g_product(z0 - 1.0)]
    parts.extend(math.lgamma(z0 + i) for i in range(steps))
    return math.fsum(parts)


def barnes_g(z):
    """Barnes G-function for real z > 0 (may overflow for large z)."""
    return math.exp(log_barnes_g(z))


# --------------------------------------------------------------------------
# Spherical Bessel functions of the first kind
# --------------------------------------------------------------------------


def _is_integer(v):
    return float(v) == int(v)


def sph_bessel_series(n, x):
    """j_n(x) from its power series, summed at adaptive precision.

    j_n(x) = sqrt(pi)/2 (x/2)^n sum_m (-x^2/4)^m / (m! Gamma(n + m + 3/2)).
    """
    if x == 0:
        if n == 0:
            return 1.0
        return 0.0 if n > 0 else math.inf
    nh = n + 1.5

    def first(ctx):
        return 1 / ctx.gamma(ctx.mpf(nh))

    def ratio(ctx, m):
        return -ctx.mpf(x) ** 2 / (4 * (m + 1) * (ctx.mpf(nh) + m))

    sign, log_s = _hiprec.ratio_series(first, ratio)
    if sign == 0:
        return 0.0
    log_pref = 0.5 * math.log(math.pi) - math.log(2.0) + n * math.log(x / 2.0)
    return _hiprec.signed_exp(sign, log_pref + log_s)


def _hankel_coefficients(n, count):
    # a_j = prod_{i=1}^{j} (4 nu^2 - (2i - 1)^2) / (j! 8^j), nu = n + 1/2
    mu = 4.0 * (n + 0.5) ** 2
    coeffs = [1.0]
    for j in range(1, count):
        coeffs.append(coeffs[-1] * (mu - (2 * j - 1) ** 2) / (8.0 * j))
    return coeffs


def sph_bessel_trig(n, x):
    """j_n(x) from the Hankel form (1/x)[P cos w - Q sin w], w = x - (n+1) pi/2.

    For integer n >= -1 the expansion terminates: this is the closed
    trigonometric form (Rayleigh's formula written out), summed at adaptive
    precision because its terms cancel for x < n.  For other orders it is
    the large-x asymptotic expansion, truncated at its smallest term.
    """
    if x <= 0:
        raise DomainError("trigonometric form needs x > 0")
    if _is_integer(n) and n >= -1:
        return _sph_bessel_closed(int(n), x)
    coeffs = _hankel_coefficients(n, 60)
    p = q = 0.0
    inv = 1.0
    last = math.inf
    for j, c in enumerate(coeffs):
        term = c * inv
        if abs(term) > last:
            break
        last = abs(term)
        if j % 4 == 0:
            p += term
        elif j % 4 == 1:
            q += term
        elif j % 4 == 2:
            p -= term
        else:
            q -= term
        if abs(term) < 1e-17:
            break
        inv /= x
    w = x - (n + 1) * math.pi / 2.0
    return (p * math.cos(w) - q * math.sin(w)) / x


def _sph_bessel_closed(n, x):
    def build(ctx):
        xx = ctx.mpf(x)
        w = xx - (n + 1) * ctx.pi / 2
        cw, sw = ctx.cos(w), ctx.sin(w)
        mu = 4 * (ctx.mpf(n) + ctx.mpf(1) / 2) ** 2
        c = ctx.mpf(1)
        terms = []
        for j in range(n + 2):
            if j > 0:
                c = c * (mu - (2 * j - 1) ** 2) / (8 * j)
                if c == 0:
                    break
            trig = (cw, -sw, -cw, sw)[j % 4]
            terms.append(c * trig / xx ** (j + 1))
        return terms

    sign, log_s = _hiprec.adaptive_sum(build)
    return _hiprec.signed_exp(sign, log_s)


def _asymptotic_ok(n, x):
    # Smallest Hankel term below ~1e-16 once x exceeds this bound.
    return x >= 40.0 + 1.5 * (n + 0.5) ** 2


def sph_bessel_j(n, x):
    """Spherical Bessel function of the first kind j_n(x), real order n > -3/2, x >= 0."""
    _check_real(n, x)
    if x < 0:
        raise DomainError(f"sph_bessel_j requires x >= 0, got {x}")
    if not n > -1.5:
        raise DomainError(f"sph_bessel_j requires order > -3/2, got {n}")
    if x == 0:
        return sph_bessel_series(n, x)
    if x < max(1.0, n):
        return sph_bessel_series(n, x)
    if _is_integer(n) and n >= -1:
        return sph_bessel_trig(n, x)
    if _asymptotic_ok(n, x):
        return sph_bessel_trig(n, x)
    return sph_bessel_series(n, x)
