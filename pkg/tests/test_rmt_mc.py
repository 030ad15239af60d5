import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from zetamoments import rmt_exact as rx
from zetamoments import rmt_mc as mc
from zetamoments.errors import DomainError, SingularityError


def _angles(N, n, seed=7, stream=0):
    return mc.haar_eigenangles_batch(N, n, mc.RngStream(seed, stream).generator(0))


def test_sample_shape_and_order():
    s = mc.sample_haar_eigenangles(6, mc.RngStream(1))
    assert s.N == 6
    a = np.array(s.angles)
    assert np.all(np.diff(a) >= 0)
    assert np.all((a > -math.pi) & (a <= math.pi))


def test_sample_reproducible_and_streams_differ():
    a = mc.sample_haar_eigenangles(4, mc.RngStream(99, 3))
    b = mc.sample_haar_eigenangles(4, mc.RngStream(99, 3))
    c = mc.sample_haar_eigenangles(4, mc.RngStream(99, 4))
    assert a == b
    assert a != c


def test_eigenangle_sample_validation():
    with pytest.raises(ValueError):
        mc.EigenangleSample((0.5, 0.1))
    with pytest.raises(ValueError):
        mc.EigenangleSample((-math.pi,))
    with pytest.raises(ValueError):
        mc.RngStream(-1)


def test_u1_angles_uniform():
    a = _angles(1, 10**5)[:, 0]
    res = stats.kstest(a, stats.uniform(loc=-math.pi, scale=2 * math.pi).cdf)
    assert res.statistic < 1.63 / math.sqrt(a.size)  # 1% critical value


@pytest.mark.parametrize("N", [3, 8])
def test_arc_count_mean(N):
    a = _angles(N, 10**5, stream=N)
    count = ((a > 0.3) & (a <= 0.3 + 2 * math.pi / N)).sum(axis=1)
    se = count.std(ddof=1) / math.sqrt(count.size)
    assert abs(count.mean() - 1.0) < 3 * se


def test_n2_chord_moment():
    # E|e^{i t1} - e^{i t2}|^2 = int 16 sin^4 / int 4 sin^2 = 3
    a = _angles(2, 10**5, stream=2)
    v = np.abs(np.exp(1j * a[:, 0]) - np.exp(1j * a[:, 1])) ** 2
    assert abs(v.mean() - 3.0) < 3 * v.std(ddof=1) / math.sqrt(v.size)


@pytest.mark.parametrize("N", [2, 5, 10])
def test_trace_moments(N):
    a = _angles(N, 10**5, stream=20 + N)
    tr = np.exp(1j * a).sum(axis=1)
    n = tr.size
    for vals, target in ((tr.real, 0.0), (tr.imag, 0.0), (np.abs(tr) ** 2, 1.0)):
        assert abs(vals.mean() - target) < 3 * vals.std(ddof=1) / math.sqrt(n)


def test_char_poly_examples():
    s1 = mc.EigenangleSample((0.0,))
    assert mc.char_poly_abs_pow(s1, math.pi, 2) == pytest.approx(4.0)
    assert mc.char_poly_abs_pow(s1, 0.0, 2) == 0.0
    s2 = mc.EigenangleSample((0.0, math.pi))
    assert mc.char_poly_abs_pow(s2, math.pi / 2, 2) == pytest.approx(4.0)
    assert mc.char_poly_abs_pow(s2, 1.0, 0) == 1.0


def test_char_poly_singular():
    s = mc.EigenangleSample((0.2, 1.0))
    with pytest.raises(SingularityError):
        mc.char_poly_abs_pow(s, 1.0, -0.5)
    assert mc.char_poly_abs_pow(s, 1.0 + 1e-6, -0.5) > 0


def test_char_poly_matches_determinant():
    rng = np.random.default_rng(0)
    angles = np.sort(rng.uniform(-math.pi, math.pi, 5))
    U = np.diag(np.exp(1j * angles))
    theta = 0.37
    det = abs(np.linalg.det(np.eye(5) - np.exp(-1j * theta) * U)) ** 2
    assert mc.char_poly_abs_pow(mc.EigenangleSample(tuple(angles)), theta, 2) == pytest.approx(det, rel=1e-12)


def test_displaced_n1_deterministic():
    for x in (0.3, 1.2):
        est = mc.mc_displaced_moment(1, 1, x, 2000, mc.RngStream(5))
        assert est.mean == pytest.approx(4 * math.sin(x) ** 2, rel=1e-12)
        assert est.std_error < 1e-12


def test_displaced_k0_is_one():
    est = mc.mc_displaced_moment(7, 0, 0.8, 2000, mc.RngStream(5))
    assert est.mean == 1.0 and est.std_error == 0.0


@pytest.mark.parametrize("reference", ["all", "random"])
def test_displaced_against_factorization(reference):
    est = mc.mc_displaced_moment(10, 1, 0.5, 60_000, mc.RngStream(11), reference=reference)
    assert est.within(rx.factorization_rhs(10, 1, 0.1))


def test_displaced_sorted_reference_would_be_biased():
    # the smallest sorted angle is not an exchangeable label
    N, beta = 5, 1.5
    a = _angles(N, 50_000, stream=77)
    v = np.exp(2 * mc.log_chord(a, a[:, :1] + beta).sum(axis=1))
    z = (v.mean() - rx.factorization_rhs(N, 1, beta)) / (v.std(ddof=1) / math.sqrt(v.size))
    assert abs(z) > 10


def test_joint_examples():
    beta = 0.9
    est = mc.mc_joint_moment(1, 1, beta, 50_000, mc.RngStream(2))
    assert est.within(4 + 2 * math.cos(beta))
    assert mc.mc_joint_moment(2, 1, 0.0, 100_000, mc.RngStream(3)).within(20.0)
    assert mc.mc_joint_moment(5, 0, 1.1, 50_000, mc.RngStream(4)).within(6.0)


def test_grid_shares_draws_and_is_reproducible():
    args = ("joint", 3, [0.5, 1.0], [0.0, 1.0], 40_000)
    a = mc.mc_moment_grid(*args, mc.RngStream(8))
    b = mc.mc_moment_grid(*args, mc.RngStream(8))
    assert a == b
    assert set(a) == {(0.0, 0.5), (0.0, 1.0), (1.0, 0.5), (1.0, 1.0)}
    single = mc.mc_joint_moment(3, 1.0, 1.0, 40_000, mc.RngStream(8))
    # same draws; only the summation layout differs
    assert single.mean == pytest.approx(a[(1.0, 1.0)].mean, rel=1e-13)
    assert single.std_error == pytest.approx(a[(1.0, 1.0)].std_error, rel=1e-10)


def test_workers_do_not_change_result():
    n = 3 * mc.SHARD_SIZE + 123
    a = mc.mc_joint_moment(3, 1, 0.5, n, mc.RngStream(21), workers=1)
    b = mc.mc_joint_moment(3, 1, 0.5, n, mc.RngStream(21), workers=2)
    assert a == b
    assert a.n_samples == n


@given(st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=200), st.integers(1, 5))
def test_chan_merge_matches_direct(values, pieces):
    x = np.array(values)[:, None]
    chunks = [c for c in np.array_split(x, pieces) if c.size]
    n, mean, m2 = mc._merge([mc._shard_stats(c) for c in chunks])
    assert n == x.shape[0]
    assert mean[0] == pytest.approx(x.mean(), abs=1e-9)
    assert m2[0] == pytest.approx(((x - x.mean()) ** 2).sum(), rel=1e-9, abs=1e-6)


def test_mc_preconditions():
    with pytest.raises(DomainError):
        mc.mc_joint_moment(3, -0.25, 0.1, 5000, mc.RngStream(1))
    with pytest.raises(DomainError):
        mc.mc_joint_moment(3, 1, 0.1, 999, mc.RngStream(1))
    with pytest.warns(mc.HeavyTailWarning):
        mc.mc_joint_moment(3, -0.1, 0.5, 2000, mc.RngStream(1))


@pytest.mark.parametrize("beta", [0.0, 0.7, 2.0])
def test_weyl_n1_k1(beta):
    assert mc.weyl_quadrature_moment(1, 1, beta) == pytest.approx(4 + 2 * math.cos(beta), abs=1e-10)


def test_weyl_examples():
    assert mc.weyl_quadrature_moment(2, 1, 0.0) == pytest.approx(20.0, rel=1e-8)
    assert mc.weyl_quadrature_moment(1, 2, 0.0) == pytest.approx(20.0, rel=1e-8)


@pytest.mark.parametrize("N, k, beta", [(2, 0.5, 1.0), (2, 1.0, 0.3), (3, 0.7, 2.0), (1, 0.25, 1.5)])
def test_weyl_toeplitz_equals_bruteforce(N, k, beta):
    M = 24 if N < 3 else 12
    assert mc._weyl_trapezoid(N, k, beta, M) == pytest.approx(mc.weyl_trapezoid_bruteforce(N, k, beta, M), rel=1e-10)


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("k", [0.5, 1, 2])
@pytest.mark.parametrize("beta", [0.0, 1.5, 3.0])
def test_weyl_matches_exact(N, k, beta):
    tol = 1e-8 if N < 3 else 1e-6
    assert mc.weyl_quadrature_moment(N, k, beta) == pytest.approx(rx.joint_moment_exact(N, k, beta), rel=tol)


def test_weyl_error_estimate_reported():
    value, err = mc.weyl_quadrature_moment(2, 0.3, 0.5, return_error=True)
    assert err < 1e-4
    assert value == pytest.approx(rx.joint_moment_exact(2, 0.3, 0.5), rel=max(10 * err, 1e-8))


def test_weyl_domain():
    with pytest.raises(DomainError):
        mc.weyl_quadrature_moment(4, 1, 0.0)
    with pytest.raises(DomainError):
        mc.weyl_quadrature_moment(2, -0.5, 0.0)
    with pytest.raises(DomainError):
        mc.weyl_quadrature_moment(2, 1, 0.0, grid_points=256)
