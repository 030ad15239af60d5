"""Haar-unitary sampling, Monte Carlo moment estimates and a quadrature oracle.

Random draws are organised in fixed-size shards.  Shard ``j`` of a stream
``(master_seed, stream_index)`` always uses the generator seeded by
``SeedSequence(master_seed, spawn_key=(stream_index, j))``, so an estimate
depends only on the seed, the stream and the sample count, never on how
many worker processes computed it.
"""

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalDegeneracyError, SingularityError

SHARD_SIZE = 1 << 14
MIN_SAMPLES = 1000


class HeavyTailWarning(UserWarning):
    """Issued when an estimator's variance is finite but tails are heavy."""


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.stream_index < 0:
            raise ValueError("stream_index must be non-negative")

    def generator(self, shard=None):
        key = (self.stream_index,) if shard is None else (self.stream_index, shard)
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.master_seed, spawn_key=key)))


@dataclass(frozen=True)
class EigenangleSample:
    angles: tuple

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("angles must be a non-empty 1-d sequence")
        if np.any(a <= -math.pi) or np.any(a > math.pi):
            raise ValueError("angles must lie in (-pi, pi]")
        if np.any(np.diff(a) < 0):
            raise ValueError("angles must be sorted ascending")

    @property
    def N(self):
        return len(self.angles)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int

    def within(self, value, n_sigma=3.0, rel_floor=1e-9):
        """True if ``value`` lies within ``n_sigma`` standard errors of the mean.

        ``rel_floor`` absorbs rounding when the estimator has zero variance.
        """
        return abs(self.mean - value) <= n_sigma * self.std_error + rel_floor * max(abs(value), 1e-300)


# --------------------------------------------------------------------------
# Sampling
# --------------------------------------------------------------------------


def haar_eigenangles_batch(N, size, gen):
    """Eigenangles of ``size`` independent Haar unitaries, shape (size, N), rows sorted.

    Gaussian matrix -> QR -> multiply column j of Q by the phase of R[j, j].
    """
    z = (gen.standard_normal((size, N, N)) + 1j * gen.standard_normal((size, N, N))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    ad = np.abs(d)
    if np.any(ad < 1e-300):
        raise NumericalDegeneracyError("rank-deficient Gaussian matrix in QR")
    q = q * (d / ad)[:, None, :]
    angles = np.angle(np.linalg.eigvals(q))
    angles[angles <= -math.pi] = math.pi
    angles.sort(axis=1)
    return angles


def sample_haar_eigenangles(N, rng):
    """One Haar-distributed N x N unitary's eigenangles, sorted in (-pi, pi]."""
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    angles = haar_eigenangles_batch(int(N), 1, rng.generator())[0]
    return EigenangleSample(tuple(float(a) for a in angles))


def log_chord(angles, theta):
    """log |1 - e^{i(theta_n - theta)}| = log |2 sin((theta_n - theta)/2)|, elementwise."""
    with np.errstate(divide="ignore"):
        return np.log(np.abs(2.0 * np.sin((np.asarray(angles) - theta) / 2.0)))


def char_poly_abs_pow(sample, theta, two_k):
    """|Z_U(theta)|^{two_k} = prod_n |1 - e^{i(theta_n - theta)}|^{two_k}."""
    angles = np.asarray(sample.angles if isinstance(sample, EigenangleSample) else sample, dtype=float)
    if two_k == 0:
        return 1.0
    d = np.abs(np.remainder(angles - theta + math.pi, 2 * math.pi) - math.pi)
    if two_k < 0 and np.any(d < 1e-14):
        raise SingularityError("negative power of the characteristic polynomial at an eigenangle")
    return float(np.exp(two_k * np.sum(log_chord(angles, theta))))


# --------------------------------------------------------------------------
# Estimators
# --------------------------------------------------------------------------


def _check_mc(N, k, n_samples):
    if int(N) != N or N < 1:
        raise DomainError(f"N must be a positive integer, got {N}")
    if not k > -0.25:
        raise DomainError(f"Monte Carlo needs k > -1/4 for a finite estimator variance, got {k}")
    if n_samples < MIN_SAMPLES:
        raise DomainError(f"n_samples must be at least {MIN_SAMPLES}, got {n_samples}")
    if k < 0:
        warnings.warn(f"k = {k} < 0: estimator has heavy tails", HeavyTailWarning, stacklevel=3)


def _shard_stats(values):
    """(count, mean, M2) of one shard per column."""
    n = values.shape[0]
    mean = values.mean(axis=0)
    m2 = ((values - mean) ** 2).sum(axis=0)
    return n, mean, m2


def _merge(stats):
    # Chan et al. pairwise update, applied in shard order.
    n, mean, m2 = stats[0]
    for nb, mb, m2b in stats[1:]:
        tot = n + nb
        delta = mb - mean
        mean = mean + delta * (nb / tot)
        m2 = m2 + m2b + delta**2 * (n * nb / tot)
        n = tot
    return n, mean, m2


def _shard_values(kind, N, ks, displacements, rng, shard, size, reference="all"):
    gen = rng.generator(shard)
    angles = haar_eigenangles_batch(N, size, gen)
    cols = []
    if kind == "joint":
        # |Z(0)|^{2k} |Z(beta)|^2
        base = log_chord(angles, 0.0).sum(axis=1)
        for beta in displacements:
            two = np.exp(2.0 * log_chord(angles, beta).sum(axis=1))
            for k in ks:
                cols.append(two if k == 0 else np.exp(2.0 * k * base) * two)
    else:
        # |Z(theta_j + beta)|^{2k} for an exchangeably labelled eigenangle theta_j.
        # Sorting destroys exchangeability (the smallest angle has no neighbour
        # below it), so either average over every label or draw one at random.
        if reference == "all":
            ref = angles[:, :, None]
        else:
            pick = gen.integers(0, N, size)
            ref = angles[np.arange(size), pick][:, None, None]
        for beta in displacements:
            s = log_chord(angles[:, None, :], ref + beta).sum(axis=2)
            for k in ks:
                if k == 0:
                    cols.append(np.ones(size))
                else:
                    cols.append(np.exp(2.0 * k * s).mean(axis=1))
    return _shard_stats(np.stack(cols, axis=1))


def _shard_task(args):
    return _shard_values(*args)


def mc_moment_grid(kind, N, ks, displacements, n_samples, rng, workers=1, reference="all"):
    """Monte Carlo estimates on a (displacement, k) grid from one set of draws.

    ``kind`` is ``"joint"`` for E{|Z(0)|^{2k}|Z(beta)|^2} or ``"displaced"``
    for E{|Z(theta_1 + beta)|^{2k}}; ``displacements`` are angles beta.
    For the displaced kind, ``reference="all"`` averages over every
    eigenangle of each draw and ``"random"`` uses one uniformly chosen
    eigenangle.  Returns ``{(beta, k): McEstimate}``.
    """
    if kind not in ("joint", "displaced"):
        raise ValueError(f"unknown estimator kind {kind!r}")
    if reference not in ("all", "random"):
        raise ValueError(f"reference must be 'all' or 'random', got {reference!r}")
    for k in ks:
        _check_mc(N, k, n_samples)
    N = int(N)
    n_samples = int(n_samples)
    sizes = [SHARD_SIZE] * (n_samples // SHARD_SIZE)
    if n_samples % SHARD_SIZE:
        sizes.append(n_samples % SHARD_SIZE)
    tasks = [(kind, N, tuple(ks), tuple(displacements), rng, j, size, reference) for j, size in enumerate(sizes)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(_shard_task, tasks))
    else:
        stats = [_shard_task(t) for t in tasks]
    n, mean, m2 = _merge(stats)
    se = np.sqrt(m2 / (n - 1) / n)
    out = {}
    i = 0
    for beta in displacements:
        for k in ks:
            out[(beta, k)] = McEstimate(float(mean[i]), float(se[i]), n, rng.master_seed)
            i += 1
    return out


def mc_displaced_moment(N, k, x, n_samples, rng, workers=1, reference="all"):
    """Estimate E_N{|Z_U(theta_1 + 2x/N)|^{2k}}, theta_1 any eigenangle."""
    beta = 2.0 * x / N
    return mc_moment_grid("displaced", N, [k], [beta], n_samples, rng, workers, reference)[(beta, k)]


def mc_joint_moment(N, k, beta, n_samples, rng, workers=1):
    """Estimate E_N{|Z_U(0)|^{2k} |Z_U(beta)|^2}."""
    return mc_moment_grid("joint", N, [k], [beta], n_samples, rng, workers)[(beta, k)]


# --------------------------------------------------------------------------
# Weyl-integration oracle
# --------------------------------------------------------------------------


def _weyl_trapezoid(N, k, beta, M):
    # N-dimensional periodic trapezoid rule (midpoint grid, so theta = 0 is
    # never a node) of (1/N!) prod|e^{i t_i} - e^{i t_j}|^2 prod w(t_n) / M^N.
    # By Andreief's identity applied to the discrete uniform measure on the
    # grid, this N-fold sum equals det[w_hat(j - l)] exactly, with w_hat
    # the grid Fourier coefficients of w.
    theta = -math.pi + (np.arange(M) + 0.5) * (2.0 * math.pi / M)
    with np.errstate(divide="ignore"):
        logw = 2.0 * k * np.log(np.abs(2.0 * np.sin(theta / 2.0)))
    w = np.exp(logw) * (2.0 * np.sin((theta - beta) / 2.0)) ** 2
    lags = np.arange(-(N - 1), N)
    coef = (w[None, :] * np.exp(-1j * lags[:, None] * theta[None, :])).mean(axis=1)
    idx = np.arange(N)
    toeplitz = coef[(idx[:, None] - idx[None, :]) + (N - 1)]
    return float(np.linalg.det(toeplitz).real)


def weyl_trapezoid_bruteforce(N, k, beta, M):
    """The same trapezoid sum evaluated literally over the M^N grid (small M only)."""
    theta = -math.pi + (np.arange(M) + 0.5) * (2.0 * math.pi / M)
    grids = np.meshgrid(*([theta] * N), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    z = np.exp(1j * pts)
    vdm = np.ones(pts.shape[0])
    for i in range(N):
        for j in range(i + 1, N):
            vdm *= np.abs(z[:, i] - z[:, j]) ** 2
    with np.errstate(divide="ignore"):
        w = np.exp(2.0 * k * np.log(np.abs(2.0 * np.sin(pts / 2.0)))) * (2.0 * np.sin((pts - beta) / 2.0)) ** 2
    return float(np.sum(vdm * np.prod(w, axis=1)) / (math.factorial(N) * M**N))


def weyl_quadrature_moment(N, k, beta, grid_points=2048, return_error=False):
    """Quadrature oracle for E_N{|Z(0)|^{2k} |Z(beta)|^2}, N <= 3.

    Trapezoid rule on the periodic cube with ``grid_points`` and twice as
    many nodes per axis, Richardson-combined on the |t|^{2k} cusp order
    2k + 1 when 2k is not an even integer.  With ``return_error`` the
    Richardson correction size is returned as an error estimate.
    """
    if int(N) != N or not 1 <= N <= 3:
        raise DomainError(f"quadrature oracle is limited to N in 1..3, got {N}")
    if not k > -0.5:
        raise DomainError(f"k must exceed -1/2, got {k}")
    if grid_points < 512:
        raise DomainError("grid_points must be at least 512")
    N = int(N)
    coarse = _weyl_trapezoid(N, k, beta, grid_points)
    fine = _weyl_trapezoid(N, k, beta, 2 * grid_points)
    if float(2 * k).is_integer() and int(2 * k) % 2 == 0 and k >= 0:
        value = fine
    else:
        f = 2.0 ** (2 * k + 1)
        value = (f * fine - coarse) / (f - 1.0)
    if return_error:
        return value, abs(value - fine)
    return value
