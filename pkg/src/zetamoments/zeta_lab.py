"""The zeta function on the critical line and its discrete moments over zeros.

Z(t) is evaluated by an Euler-Maclaurin sum for t < 200 and by the
Riemann-Siegel formula with corrections C_0..C_4 above.  Zeros are found
by a sign-change scan on a grid tied to Gram points, refined by Brent's
method, with count feedback from the Riemann-von Mangoldt main term.
"""

import functools
import math
import os
import tempfile
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import loggamma

from . import _hiprec
from .errors import DomainError, MissedZeroError, MultipleZeroError, ZeroTableFormatError
from .rmt_exact import f_k, log_leading_coeff
from .specfun import log_barnes_g

TWO_PI = 2.0 * math.pi
T_MIN = 10.0
T_MAX = 1.0e5
#: Below this height Z(t) comes from the Euler-Maclaurin evaluator.
EM_SWITCH = 200.0
ZERO_TOL = 1e-6


class RangeWarning(UserWarning):
    """A parameter lies outside the range where a comparison is proven."""


# --------------------------------------------------------------------------
# Riemann-Siegel
# --------------------------------------------------------------------------


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("t must be finite")
    if np.any(t < T_MIN):
        raise DomainError(f"t must be at least {T_MIN}")
    return t


def rs_theta(t):
    """Riemann-Siegel theta(t) from its asymptotic series, t >= 10."""
    scalar = np.ndim(t) == 0
    t = _check_t(t)
    th = (
        0.5 * t * np.log(t / TWO_PI)
        - 0.5 * t
        - math.pi / 8.0
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t**3)
        + 31.0 / (80640.0 * t**5)
    )
    return float(th) if scalar else th


def _rs_theta_prime(t):
    return 0.5 * np.log(t / TWO_PI) - 1.0 / (48.0 * t**2) - 7.0 / (1920.0 * t**4) - 31.0 / (16128.0 * t**6)


_PSI_TERMS = 90


@functools.lru_cache(maxsize=1)
def _psi_derivative_coeffs():
    """Taylor coefficients in u of Psi^{(d)}, d = 0..12, where
    Psi(u) = -cos(2 pi u^2 - 5 pi/8) / cos(2 pi u) and u = p - 1/2.

    Obtained by power-series division at 80 digits; Psi is entire and even.
    """
    ctx = _hiprec.context(80)
    M = _PSI_TERMS
    a = 2 * ctx.pi
    c = -5 * ctx.pi / 8
    num = [ctx.mpf(0)] * (M + 1)
    den = [ctx.mpf(0)] * (M + 1)
    for j in range(M // 2 + 1):
        num[2 * j] = ctx.cos(c + j * ctx.pi / 2) * a**j / ctx.factorial(j)
        den[2 * j] = (-1) ** j * (2 * ctx.pi) ** (2 * j) / ctx.factorial(2 * j)
    q = [ctx.mpf(0)] * (M + 1)
    for n in range(M + 1):
        q[n] = (num[n] - ctx.fsum(q[i] * den[n - i] for i in range(n))) / den[0]
    base = [-float(v) for v in q]
    out = []
    for d in range(13):
        out.append(np.array([base[n] * math.perm(n, d) for n in range(d, M + 1)]))
    return out


def _rs_remainder(tau, p):
    P = [np.polynomial.polynomial.polyval(p - 0.5, c) for c in _psi_derivative_coeffs()]
    pi2 = math.pi**2
    c0 = P[0]
    c1 = -P[3] / (96 * pi2)
    c2 = P[2] / (64 * pi2) + P[6] / (18432 * pi2**2)
    c3 = -P[1] / (64 * pi2) - P[5] / (3840 * pi2**2) - P[9] / (5308416 * pi2**3)
    c4 = P[0] / (128 * pi2) + 19 * P[4] / (24576 * pi2**2) + 11 * P[8] / (5898240 * pi2**3) + P[12] / (
        2038431744 * pi2**4
    )
    w = 1.0 / tau
    return c0 + w * (c1 + w * (c2 + w * (c3 + w * c4)))


def _hardy_z_rs(t):
    tau = np.sqrt(t / TWO_PI)
    N = np.floor(tau).astype(np.int64)
    th = rs_theta(t)
    n = np.arange(1, int(N.max()) + 1)
    logn = np.log(n)
    terms = np.cos(th[:, None] - t[:, None] * logn[None, :]) / np.sqrt(n)[None, :]
    terms = np.where(n[None, :] <= N[:, None], terms, 0.0)
    main = 2.0 * terms.sum(axis=1)
    sign = np.where(N % 2 == 1, 1.0, -1.0)
    return main + sign * _rs_remainder(tau, tau - N) / np.sqrt(tau)


# --------------------------------------------------------------------------
# Euler-Maclaurin zeta
# --------------------------------------------------------------------------

_EM_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510, 43867 / 798, -174611 / 330)


def zeta_em(s, n_terms=None):
    """zeta(s) by Euler-Maclaurin summation (complex s, moderate |Im s|).

    ``n_terms`` defaults to |Im s| + 20, which keeps the Bernoulli tail
    below double precision for |s| up to a few hundred.
    """
    s = np.asarray(s, dtype=complex)
    scalar = s.ndim == 0
    s = np.atleast_1d(s)
    if n_terms is None:
        n_terms = int(np.max(np.abs(s.imag))) + 20
    N = n_terms
    n = np.arange(1, N)
    head = np.exp(-s[:, None] * np.log(n)[None, :]).sum(axis=1)
    Ns = np.exp(-s * math.log(N))
    total = head + N * Ns / (s - 1.0) + 0.5 * Ns
    rising = s.copy()  # s (s+1) ... (s + 2j - 2)
    power = Ns / N
    fact = 2.0
    for j, b in enumerate(_EM_BERNOULLI, start=1):
        total = total + b / fact * rising * power
        rising = rising * (s + 2 * j - 1) * (s + 2 * j)
        power = power / (N * N)
        fact *= (2 * j + 1) * (2 * j + 2)
    return complex(total[0]) if scalar else total


def _theta_exact(t):
    return loggamma(0.25 + 0.5j * t).imag - 0.5 * t * math.log(math.pi)


def _hardy_z_em(t):
    z = zeta_em(0.5 + 1j * t, n_terms=int(np.max(t)) + 20)
    return (np.exp(1j * _theta_exact(t)) * z).real


# --------------------------------------------------------------------------
# Hardy Z
# --------------------------------------------------------------------------

_CHUNK = 4096


def _hardy_z_array(t, method=None):
    out = np.empty_like(t)
    for lo in range(0, t.size, _CHUNK):
        chunk = t[lo : lo + _CHUNK]
        if method == "em":
            out[lo : lo + _CHUNK] = _hardy_z_em(chunk)
            continue
        if method == "rs":
            out[lo : lo + _CHUNK] = _hardy_z_rs(chunk)
            continue
        low = chunk < EM_SWITCH
        res = np.empty_like(chunk)
        if np.any(low):
            res[low] = _hardy_z_em(chunk[low])
        if np.any(~low):
            res[~low] = _hardy_z_rs(chunk[~low])
        out[lo : lo + _CHUNK] = res
    return out


def hardy_z(t, method=None):
    """Hardy's Z(t), real with |Z(t)| = |zeta(1/2 + it)|, for t >= 10.

    Accepts scalars or arrays.  ``method`` may force ``"rs"`` or ``"em"``;
    by default Euler-Maclaurin is used below t = 200 and Riemann-Siegel
    (absolute error under 1e-8 for t >= 200) above.
    """
    scalar = np.ndim(t) == 0
    arr = _check_t(t).ravel()
    if method not in (None, "rs", "em"):
        raise ValueError(f"unknown method {method!r}")
    vals = _hardy_z_array(arr, method)
    if scalar:
        return float(vals[0])
    return vals.reshape(np.shape(t))


# --------------------------------------------------------------------------
# Counting and zero tables
# --------------------------------------------------------------------------


def zero_count_main(T):
    """Main term (T/2pi) log(T/(2 pi e)) of the zero-counting function, T > 2 pi e."""
    if not math.isfinite(T) or T <= TWO_PI * math.e:
        raise DomainError(f"T must exceed 2*pi*e, got {T}")
    return T / TWO_PI * math.log(T / (TWO_PI * math.e))


@dataclass(frozen=True)
class DensityScale:
    L: float

    def __post_init__(self):
        if not (math.isfinite(self.L) and self.L > 0):
            raise DomainError("L must be positive")

    @classmethod
    def from_height(cls, T):
        if not T > TWO_PI:
            raise DomainError(f"T must exceed 2*pi, got {T}")
        return cls(math.log(T / TWO_PI) / TWO_PI)


@dataclass(frozen=True)
class ZeroTable:
    """Sorted zero ordinates in (t_min, t_max]."""

    ordinates: np.ndarray
    t_max: float
    source: str = "computed"
    t_min: float = 0.0

    def __post_init__(self):
        g = np.asarray(self.ordinates, dtype=float)
        g.setflags(write=False)
        object.__setattr__(self, "ordinates", g)
        if self.source not in ("computed", "imported"):
            raise ValueError(f"source must be 'computed' or 'imported', got {self.source!r}")
        if g.ndim != 1:
            raise ValueError("ordinates must be one-dimensional")
        if g.size and (g[0] <= 0 or np.any(np.diff(g) <= 0)):
            raise ZeroTableFormatError("ordinates must be positive and strictly increasing")
        if g.size and g[-1] > self.t_max:
            raise ValueError("ordinates exceed t_max")

    def __len__(self):
        return int(self.ordinates.size)

    @property
    def density(self):
        return DensityScale.from_height(self.t_max)

    def residuals(self, every=1):
        g = self.ordinates[::every]
        g = g[g >= T_MIN]
        if not g.size:
            return g
        return np.abs(hardy_z(g))

    def check_count(self, slack=3.0):
        """Compare the count with the main term; only meaningful for tables starting at the bottom."""
        if self.t_min > 14.0 or self.t_max <= TWO_PI * math.e:
            return True
        return abs(len(self) - zero_count_main(self.t_max)) <= slack

    def validate(self, every=1):
        """Raise if a re-evaluated ordinate is not a zero or the count is off."""
        r = self.residuals(every)
        if r.size and r.max() >= ZERO_TOL:
            i = int(np.argmax(r))
            raise ZeroTableFormatError(f"|Z| = {r[i]:.3g} at a tabulated ordinate exceeds {ZERO_TOL}")
        if not self.check_count():
            raise MissedZeroError(
                "zero count disagrees with the main term", len(self), zero_count_main(self.t_max)
            )


def read_zero_table(path, verify=True):
    """Read a plain-text zero table: one ordinate per line, '#' comments."""
    values = []
    t_max = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                body = s[1:].strip()
                if body.startswith("t_max="):
                    t_max = float(body.split("=", 1)[1])
                continue
            try:
                v = float(s)
            except ValueError as exc:
                raise ZeroTableFormatError(f"line {lineno}: not a decimal number: {s!r}") from exc
            if not math.isfinite(v) or v <= 0:
                raise ZeroTableFormatError(f"line {lineno}: ordinate must be positive and finite")
            if values and v <= values[-1]:
                raise ZeroTableFormatError(f"line {lineno}: ordinates not strictly increasing")
            values.append(v)
    if t_max is None:
        t_max = values[-1] if values else 0.0
    table = ZeroTable(np.array(values), t_max, "imported")
    if verify:
        r = table.residuals(every=100)
        if r.size and r.max() >= ZERO_TOL:
            raise ZeroTableFormatError("spot check failed: a listed ordinate is not a zero of Z")
    return table


def write_zero_table(table, path):
    """Write ``table`` atomically in the plain-text format."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".zeros-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(f"# t_max={table.t_max!r}\n")
            fh.write(f"# t_min={table.t_min!r}\n")
            for g in table.ordinates:
                fh.write(f"{g:.12f}\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------
# Zero search
# --------------------------------------------------------------------------

_SAMPLES_PER_GRAM = 10
_GRAM_BLOCK = 8


def gram_points(t_min, t_max):
    """Gram points g_m (theta(g_m) = m pi) inside [t_min, t_max]."""
    m_lo = math.ceil(rs_theta(t_min) / math.pi)
    m_hi = math.floor(rs_theta(t_max) / math.pi)
    if m_hi < m_lo:
        return np.empty(0)
    m = np.arange(m_lo, m_hi + 1)
    grid = np.linspace(t_min, t_max, max(64, 4 * m.size))
    t = np.interp(m * math.pi, rs_theta(grid), grid)
    for _ in range(6):
        t = t - (rs_theta(t) - m * math.pi) / _rs_theta_prime(t)
    return np.clip(t, t_min, t_max)


def _scan(a, b, n):
    grid = np.linspace(a, b, n + 1)
    z = hardy_z(grid)
    found = []
    for i in np.nonzero(np.signbit(z[:-1]) != np.signbit(z[1:]))[0]:
        lo, hi = grid[i], grid[i + 1]
        if z[i] == 0.0:
            found.append(lo)
            continue
        found.append(brentq(hardy_z, lo, hi, xtol=1e-10, rtol=4 * np.finfo(float).eps))
    return found


def _search_segment(bounds):
    # bounds: consecutive block boundaries; returns zeros in (bounds[0], bounds[-1]]
    zeros = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        expected = (rs_theta(b) - rs_theta(a)) / math.pi
        n = max(4, int(math.ceil(expected * _SAMPLES_PER_GRAM)))
        found = _scan(a, b, n)
        if abs(len(found) - expected) >= 1.0:
            found = _scan(a, b, 4 * n)
        zeros.extend(found)
    return zeros


def find_zeros(t_min, t_max, workers=1):
    """All zeros of Z in (t_min, t_max], refined to 1e-9.

    Raises :class:`MissedZeroError` if the total differs from the main-term
    prediction (theta(t_max) - theta(t_min))/pi by more than 3.
    """
    if not (math.isfinite(t_min) and math.isfinite(t_max)):
        raise DomainError("range must be finite")
    if not T_MIN <= t_min < t_max <= T_MAX:
        raise DomainError(f"need {T_MIN} <= t_min < t_max <= {T_MAX:g}")
    g = gram_points(t_min, t_max)
    g = g[(g > t_min) & (g < t_max)]
    inner = g[_GRAM_BLOCK - 1 :: _GRAM_BLOCK]
    bounds = np.concatenate(([t_min], inner, [t_max]))
    bounds = bounds[np.concatenate(([True], np.diff(bounds) > 0))]
    if workers > 1 and bounds.size > 2 * workers:
        cuts = np.linspace(0, bounds.size - 1, workers + 1).astype(int)
        segments = [bounds[cuts[i] : cuts[i + 1] + 1] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_search_segment, segments))
        zeros = [z for part in parts for z in part]
    else:
        zeros = _search_segment(bounds)
    zeros = np.unique(np.array(zeros, dtype=float))
    zeros = zeros[(zeros > t_min) & (zeros <= t_max)]
    expected = (rs_theta(t_max) - rs_theta(t_min)) / math.pi
    if abs(zeros.size - expected) > 3.0:
        raise MissedZeroError(
            f"found {zeros.size} zeros in ({t_min}, {t_max}], main term predicts {expected:.2f}",
            found=int(zeros.size),
            expected=expected,
        )
    return ZeroTable(zeros, float(t_max), "computed", float(t_min))


# --------------------------------------------------------------------------
# Arithmetic factor
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ArithParams:
    k: float
    prime_cutoff: int = 100_000
    series_tol: float = 1e-17

    def __post_init__(self):
        if not math.isfinite(self.k):
            raise DomainError("k must be finite")
        if int(self.prime_cutoff) != self.prime_cutoff or self.prime_cutoff < 100:
            raise ValueError("prime_cutoff must be an integer >= 100")
        if not 0 < self.series_tol <= 1e-6:
            raise ValueError("series_tol must lie in (0, 1e-6]")


@dataclass(frozen=True)
class ArithValue:
    value: float
    error: float = field(default=0.0)


def primes_up_to(n):
    """Primes <= n by the sieve of Eratosthenes."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0]


def _log_local_factor(k, p, tol):
    # k^2 log(1 - 1/p) + log sum_m ((k)_m / m!)^2 p^{-m}
    x = 1.0 / p
    s = 0.0  # sum minus its leading 1
    c = 1.0  # (k)_m / m!
    m = 0
    while True:
        c *= (k + m) / (m + 1)
        m += 1
        term = c * c * x**m
        if term == 0.0:
            break
        s += term
        ratio = ((k + m) / (m + 1)) ** 2 * x
        if ratio < 1 and term <= tol * abs(s) * (1 - ratio):
            break
        if m > 10_000:
            raise ArithmeticError("local factor series did not converge")
    return k * k * math.log1p(-x) + math.log1p(s)


@functools.lru_cache(maxsize=64)
def _arith_a_cached(k, cutoff, tol):
    primes = primes_up_to(cutoff)
    logs = [_log_local_factor(k, float(p), tol) for p in primes]
    value = math.exp(math.fsum(logs))
    # log-factor ~ -k^2 (k-1)^2 / (4 p^2) + O(p^-3); sum_{p > P} p^-2 < 1/(P log P)
    tail = (0.5 * (k * (k - 1)) ** 2 + abs(k) ** 3 / cutoff + 1e-12) / (cutoff * math.log(cutoff))
    error = value * (math.expm1(tail)) + len(primes) * 4e-16 * value
    return value, error


def arith_a(params):
    """Truncated Euler product a(k) with an explicit truncation error bound.

    Accepts an :class:`ArithParams` or a bare ``k``.  Returns
    :class:`ArithValue` ``(value, error)``.
    """
    if not isinstance(params, ArithParams):
        params = ArithParams(float(params))
    if params.k <= -1.5:
        raise DomainError(f"a(k) needs k > -3/2, got {params.k}")
    value, error = _arith_a_cached(float(params.k), int(params.prime_cutoff), float(params.series_tol))
    return ArithValue(value, error)


_KNOWN_A = {-1.0: 6.0 / math.pi**2, 0.0: 1.0, 1.0: 1.0, 2.0: 6.0 / math.pi**2}


def arith_factor(k):
    """a(k) for use in right-hand sides: exact where known, else the Euler product."""
    known = _KNOWN_A.get(float(k))
    if known is not None:
        return known
    return arith_a(k).value


# --------------------------------------------------------------------------
# Discrete moments over zeros
# --------------------------------------------------------------------------


def _alpha_range_check(alpha, L):
    if abs(alpha) > L / 2:
        warnings.warn(
            f"|alpha| = {abs(alpha)} exceeds L/2 = {L / 2:.4f}, beyond the proven uniformity range",
            RangeWarning,
            stacklevel=3,
        )


def discrete_displaced_moment(zeros, k, alpha):
    """Mean of |Z(gamma_n + alpha/L)|^{2k} over the table, L = log(T/2pi)/(2pi)."""
    if len(zeros) == 0:
        raise DomainError("zero table is empty")
    if not k > -0.25:
        raise DomainError(f"k must exceed -1/4, got {k}")
    if k == 0:
        return 1.0
    L = zeros.density.L
    _alpha_range_check(alpha, L)
    if alpha == 0 and k < 0:
        warnings.warn("negative moment evaluated at the zeros themselves", RuntimeWarning, stacklevel=2)
    z = np.abs(hardy_z(zeros.ordinates + alpha / L))
    with np.errstate(divide="ignore"):
        vals = np.exp(2.0 * k * np.log(z))
    return math.fsum(vals) / len(zeros)


def _check_simple(g):
    if g.size > 1 and np.min(np.diff(g)) <= 1e-6:
        i = int(np.argmin(np.diff(g)))
        raise MultipleZeroError(f"zeros at {g[i]} and {g[i + 1]} are not separated by more than 1e-6")


def hardy_z_prime(g):
    """Z'(t) by a five-point central difference with step 1e-4 * max(1, t/1000)."""
    g = np.atleast_1d(np.asarray(g, dtype=float))
    h = 1e-4 * np.maximum(1.0, g / 1000.0)
    out = np.empty_like(g)
    for method in ("em", "rs"):
        sel = (g < EM_SWITCH) if method == "em" else (g >= EM_SWITCH)
        if not np.any(sel):
            continue
        t, hh = g[sel], h[sel]
        zp = hardy_z(t + hh, method)
        zm = hardy_z(t - hh, method)
        zp2 = hardy_z(t + 2 * hh, method)
        zm2 = hardy_z(t - 2 * hh, method)
        out[sel] = (-zp2 + 8 * zp - 8 * zm + zm2) / (12 * hh)
    return out


def discrete_deriv_moment(zeros, k):
    """Mean of |zeta'(1/2 + i gamma_n)|^{2k} = |Z'(gamma_n)|^{2k} over the table."""
    if len(zeros) == 0:
        raise DomainError("zero table is empty")
    if not k >= -1:
        raise DomainError(f"k must be at least -1 numerically, got {k}")
    g = zeros.ordinates
    _check_simple(g)
    if k == 0:
        return 1.0
    d = np.abs(hardy_z_prime(g[g >= T_MIN + 1e-3]))
    vals = np.exp(2.0 * k * np.log(d))
    return math.fsum(vals) / d.size


# --------------------------------------------------------------------------
# Right-hand sides
# --------------------------------------------------------------------------


def _log_height(T):
    if not (math.isfinite(T) and T > TWO_PI):
        raise DomainError(f"T must exceed 2*pi, got {T}")
    return math.log(T / TWO_PI)


def conjecture3_rhs(T, k, alpha):
    """G(k+1)^2/G(2k+1) a(k) F_k(2 pi alpha) (log T/2pi)^{k^2}."""
    lt = _log_height(T)
    if not k > -0.5:
        raise DomainError(f"k must exceed -1/2, got {k}")
    fk = f_k(k, math.pi * abs(alpha))
    return math.exp(log_leading_coeff(k) + k * k * math.log(lt)) * arith_factor(k) * fk


def conjecture3_small_alpha_limit(T, k):
    """lim_{alpha -> 0} conjecture3_rhs(T, k, alpha) / alpha^{2k}."""
    lt = _log_height(T)
    if not k > -0.5:
        raise DomainError(f"k must exceed -1/2, got {k}")
    log_c = (
        2 * k * math.log(TWO_PI)
        + 2 * math.lgamma(k + 1)
        - math.lgamma(2 * k + 1)
        - math.lgamma(2 * k + 2)
    )
    return math.exp(log_leading_coeff(k) + log_c + k * k * math.log(lt)) * arith_factor(k)


def hko_rhs(T, k):
    """G(k+2)^2/G(2k+3) a(k) (log T/2pi)^{k(k+2)}."""
    lt = _log_height(T)
    if not k > -1.5:
        raise DomainError(f"k must exceed -3/2, got {k}")
    log_g = 2 * log_barnes_g(k + 2) - log_barnes_g(2 * k + 3)
    return math.exp(log_g + k * (k + 2) * math.log(lt)) * arith_factor(k)


def gonek_rhs(T, alpha):
    """(1 - (sin(pi alpha)/(pi alpha))^2) log(T/2pi)."""
    lt = _log_height(T)
    if alpha == 0:
        return 0.0
    x = math.pi * alpha
    if abs(x) < 1.0:
        # 1 - sinc^2 = sum_{n >= 2} (-1)^n 2^{2n-1} x^{2n-2} / (2n)!
        total, term, n = 0.0, 8.0 * x * x / 24.0, 2
        while abs(term) > 1e-18 * abs(total):
            total += term
            term *= -4.0 * x * x / ((2 * n + 1) * (2 * n + 2))
            n += 1
        return total * lt
    s = math.sin(x) / x
    return (1.0 - s * s) * lt


def _cgg_series(alpha, eta):
    # 6/pi^2 sum_j (-1)^{j+1} (2 pi alpha)^{2j+2}/(2j+5)! P_j(eta)
    def build(ctx):
        y = 2 * ctx.pi * ctx.mpf(alpha)
        e = ctx.mpf(eta)
        y2 = y * y
        base = y2 / ctx.factorial(5)  # y^{2j+2}/(2j+5)! at j = 0
        eps = ctx.mpf(10) ** (-(ctx.dps + 10))
        terms = []
        peak = 0
        j = 0
        while True:
            m = 2 * j + 5
            poly = -(e**2) + m * e**3 / 3 - ctx.mpf(m) / (j + 3) * e ** (2 * j + 6) + e ** (2 * j + 7)
            poly += e**2 * (1 - e) ** m
            t = (-1) ** (j + 1) * base * poly
            terms.append(t)
            peak = max(peak, abs(base))
            if j > 2 and abs(base) < eps * peak and y2 < (m + 1) * (m + 2):
                break
            base = base * y2 / ((m + 1) * (m + 2))
            j += 1
        return terms

    return _hiprec.adaptive_sum(build)


def cgg_rhs(T, alpha, eta):
    """Conrey-Ghosh-Gonek mean value, (6/pi^2) sum_j ... (log T/2pi)^4."""
    lt = _log_height(T)
    if not (math.isfinite(alpha) and math.isfinite(eta)):
        raise DomainError("non-finite argument")
    if not 0 < eta <= 1:
        raise DomainError(f"eta must lie in (0, 1], got {eta}")
    if eta > 0.5:
        warnings.warn(f"eta = {eta} lies beyond the proven range (0, 1/2)", RangeWarning, stacklevel=2)
    if alpha == 0:
        return 0.0
    sign, log_s = _cgg_series(abs(alpha), eta)
    return 6.0 / math.pi**2 * _hiprec.signed_exp(sign, log_s) * lt**4


def cgg_eta1_closed(T, alpha):
    """Closed form of the eta = 1 mean value, in elementary functions."""
    lt = _log_height(T)
    if alpha == 0:
        return 0.0
    x = math.pi * abs(alpha)
    if x < 0.3:
        # the closed form cancels to O(x^6) from O(x^2) terms
        sign, log_s = _cgg_series(abs(alpha), 1.0)
        return 6.0 / math.pi**2 * _hiprec.signed_exp(sign, log_s) * lt**4
    x2 = x * x
    s = math.sin(x)
    num = (2 * x2 - 3) * s * s + 3 * x * math.sin(2 * x) + x2 * x2 - 3 * x2
    return (1.0 / 12.0) * (6.0 / math.pi**2) * num / (x2 * x2) * lt**4
