"""Adaptive extended-precision summation.

Several finite and power series used in this package (alternating
hypergeometric-type sums, the exact joint-moment double sums) suffer
catastrophic cancellation in double precision.  They are summed here with
mpmath, raising the working precision until the digits lost to
cancellation are covered.  Results come back in log form, ``(sign, log|S|)``,
so callers can fold in prefactors without overflow.
"""

import math
import threading

import mpmath

_local = threading.local()

#: Digits that must survive cancellation before a sum is accepted.
GUARD_DIGITS = 20
MAX_DPS = 5000


def context(dps):
    """Return a thread-local mpmath context set to ``dps`` decimal digits."""
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        ctx = mpmath.MPContext()
        _local.ctx = ctx
    ctx.dps = dps
    return ctx


def _to_log(ctx, s):
    if s == 0:
        return 0, -math.inf
    sign = 1 if s > 0 else -1
    return sign, float(ctx.log(abs(s)))


def adaptive_sum(build_terms, start_dps=30):
    """Sum ``build_terms(ctx)`` at a precision that survives cancellation.

    ``build_terms`` receives an mpmath context and returns an iterable of
    context numbers.  Returns ``(sign, log_abs)`` of the sum; ``sign`` is 0
    for an exactly zero sum.
    """
    dps = start_dps
    while True:
        ctx = context(dps)
        terms = list(build_terms(ctx))
        if not terms:
            return 0, -math.inf
        total = ctx.fsum(terms)
        magnitude = ctx.fsum(abs(t) for t in terms)
        if magnitude == 0:
            return 0, -math.inf
        if total == 0:
            lost = dps
        else:
            lost = float(ctx.log10(magnitude / abs(total))) + math.log10(len(terms))
        if dps - lost >= GUARD_DIGITS:
            return _to_log(ctx, total)
        if dps >= MAX_DPS:
            raise ArithmeticError("cancellation exceeds the precision budget")
        dps = min(MAX_DPS, max(2 * dps, int(lost) + GUARD_DIGITS + 10))


def ratio_series(first, ratio, start_dps=30, max_terms=100000):
    """Sum ``t_0 + t_1 + ...`` where ``t_{p+1} = t_p * ratio(ctx, p)``.

    ``first(ctx)`` returns ``t_0``.  The series is truncated once the terms
    have passed their peak and fall below the working precision relative to
    the partial sum.  Finite sums are expressed by ``ratio`` returning 0.
    """

    def build(ctx):
        eps = ctx.mpf(10) ** (-(ctx.dps + 5))
        t = first(ctx)
        terms = [t]
        peak = abs(t)
        partial = t
        for p in range(max_terms):
            t = t * ratio(ctx, p)
            if t == 0:
                break
            terms.append(t)
            partial += t
            a = abs(t)
            if a > peak:
                peak = a
            elif a <= eps * abs(partial) and a <= eps * peak:
                break
        else:
            raise ArithmeticError("series did not converge within max_terms")
        return terms

    return adaptive_sum(build, start_dps=start_dps)


def signed_exp(sign, log_abs):
    """Convert ``(sign, log|x|)`` back to a float; raises on overflow."""
    if sign == 0:
        return 0.0
    return sign * math.exp(log_abs)
