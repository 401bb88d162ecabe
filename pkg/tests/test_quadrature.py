import mpmath as mp
import numpy as np
import pytest

from anngf.errors import ConfigError
from anngf.quadrature import (GreenEvaluator, QuadratureConfig, annealed_green,
                              free_green, free_green_bessel, green_derivative,
                              periodic_green_reference)


def watson_origin_value() -> float:
    # closed form for the origin value of the simple-cubic resolvent,
    # via the classical product of Gamma factors
    mp.mp.dps = 30
    w = (mp.sqrt(6) / (32 * mp.pi ** 3)) * mp.gamma(mp.mpf(1) / 24) \
        * mp.gamma(mp.mpf(5) / 24) * mp.gamma(mp.mpf(7) / 24) \
        * mp.gamma(mp.mpf(11) / 24)
    return float(w / 6)


def test_free_origin_matches_closed_form():
    exact = watson_origin_value()
    coarse = float(free_green((0, 0, 0), 3, QuadratureConfig(resolution=64)))
    fine = float(free_green((0, 0, 0), 3, QuadratureConfig(resolution=128)))
    assert abs(fine - exact) < 1e-7
    assert abs(fine - exact) < abs(coarse - exact)  # refinement helps


def test_green_even(free_ev64, rng):
    pts = rng.integers(-10, 11, size=(8, 3))
    vals_p = free_ev64.green(pts)
    vals_m = free_ev64.green(-pts)
    assert np.abs(vals_p - vals_m).max() < 1e-10


def test_split_sums_to_green(ev64):
    pts = [(1, 0, 0), (3, 2, 1), (7, 0, 0), (0, 4, 4)]
    lead, corr = ev64.split(pts)
    whole = ev64.green(pts)
    assert np.abs(lead + corr - whole).max() < 1e-8
    # the correction is the smaller piece away from the origin
    assert np.all(np.abs(corr[1:]) < np.abs(lead[1:]))


def test_free_green_positive_and_decaying(free_ev64):
    ray = [(k, 0, 0) for k in (1, 2, 4, 8, 16)]
    vals = free_ev64.green(ray)
    assert np.all(vals > 0.0)
    assert np.all(np.diff(vals) < 0.0)


def test_far_field_matches_bessel_form(free_ev64):
    pts = [(9, 0, 0), (6, 6, 0), (5, 5, 5)]
    quad = free_ev64.green(pts)
    asym = free_green_bessel(pts, 3)
    assert np.abs(quad - asym).max() < 5e-6


@pytest.mark.parametrize("alpha", [(1, 0, 0), (0, 1, 1), (2, 0, 0), (1, 1, 1)])
def test_derivative_methods_agree(ev64, alpha):
    x = (4, 2, 1)
    a = ev64.derivative(x, alpha, method="multiplier")
    b = ev64.derivative(x, alpha, method="difference")
    assert a == pytest.approx(b, abs=1e-8)


def test_derivative_rejects_bad_input(ev64):
    with pytest.raises(ConfigError):
        ev64.derivative((1, 0, 0), (1, 0))
    with pytest.raises(ConfigError):
        ev64.derivative((1, 0, 0), (-1, 0, 0))
    with pytest.raises(ConfigError):
        ev64.derivative((1, 0, 0), (1, 0, 0), method="spline")


def test_point_window_guard(free_ev64):
    with pytest.raises(ConfigError):
        free_ev64.green([(40, 0, 0)])


@pytest.mark.parametrize("resolution", [7, 33, 31])
def test_config_rejects_bad_resolution(resolution):
    with pytest.raises(ConfigError):
        GreenEvaluator(None, 3, QuadratureConfig(resolution=resolution))


def test_dyadic_partition_is_exact(ev64):
    rep = ev64.dyadic_probe((6, 2, 1))
    total = rep.outer + sum(rep.shells) + rep.core
    assert rep.direct == pytest.approx(total, abs=1e-12)
    assert abs(rep.partition_residue) < 1e-12
    assert rep.cutoff == pytest.approx(np.pi * np.sqrt(3) / 2, abs=1e-12)
    assert len(rep.shells) >= 2


def test_dyadic_core_shrinks_with_levels(ev64):
    shallow = ev64.dyadic_probe((6, 2, 1), levels=3)
    deep = ev64.dyadic_probe((6, 2, 1), levels=6)
    assert abs(deep.core) < abs(shallow.core) + 1e-15
    assert shallow.direct == pytest.approx(deep.direct, abs=1e-12)


def test_periodic_reference_against_dense_solve():
    # independent oracle: assemble the box operator as a dense matrix
    # and least-squares solve against the mean-zero point source
    L, d = 8, 3
    n = L ** d
    A = np.zeros((n, n))
    idx = np.arange(n).reshape((L,) * d)
    for ax in range(d):
        for s in (1, -1):
            A[idx.ravel(), np.roll(idx, s, axis=ax).ravel()] -= 1.0
    A[np.arange(n), np.arange(n)] += 2.0 * d
    rhs = -np.ones(n) / n
    rhs[0] += 1.0
    u = np.linalg.lstsq(A, rhs, rcond=None)[0]
    u -= u.mean()
    pts = [(0, 0, 0), (1, 0, 0), (2, 1, 0), (3, 3, 3), (4, 0, 0)]
    ref = periodic_green_reference(pts, None, L, 3)
    direct = [u[idx[p]] for p in pts]
    assert np.abs(ref - direct).max() < 1e-12


def test_periodic_reference_wraps_and_averages_to_zero():
    val_a = periodic_green_reference((3, 1, 0), None, 16, 3)
    val_b = periodic_green_reference((3 - 16, 1, 16), None, 16, 3)
    assert val_a == val_b
    grid = [(i, j, k) for i in range(8) for j in range(8) for k in range(8)]
    assert abs(np.sum(periodic_green_reference(grid, None, 8, 3))) < 1e-12


def test_periodic_reference_with_kernel_wider_than_box(rad_kernel):
    # kernel radius 9 exceeds box 12: wrapped accumulation must still
    # produce a finite symmetric table
    vals = periodic_green_reference([(0, 0, 0), (3, 0, 0), (9, 0, 0)],
                                    rad_kernel, 12)
    mirror = periodic_green_reference([(0, 0, 0), (-3, 0, 0), (-9, 0, 0)],
                                      rad_kernel, 12)
    assert np.all(np.isfinite(vals))
    assert np.abs(vals - mirror).max() < 1e-12


def test_annealed_green_matches_evaluator(rad_kernel, ev64):
    pts = [(2, 1, 0), (5, 0, 0)]
    a = annealed_green(pts, rad_kernel, config=QuadratureConfig(resolution=64))
    b = ev64.green(pts)
    assert np.array_equal(a, b)


def test_green_derivative_convenience(free_ev64):
    a = green_derivative((3, 1, 0), (1, 0, 0), None, 3,
                         QuadratureConfig(resolution=64))
    b = free_ev64.derivative((3, 1, 0), (1, 0, 0))
    assert a == pytest.approx(b, abs=0)
