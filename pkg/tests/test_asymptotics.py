import math

import numpy as np
import pytest

from anngf.asymptotics import (calibrate_leading, cubic_moment, default_rays,
                               expansion_depth, expansion_eval,
                               gradient_leading, green_constant, hom_green,
                               leading_term, make_ray_probe,
                               modified_coordinates, residual_fit, u1_eval)
from anngf.errors import NumericalError
from anngf.perturbation import (moment_model, perturbation_kernel,
                                walk_kernel)


def test_green_constant_closed_forms():
    assert green_constant(3) == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-16)
    assert green_constant(4) == pytest.approx(1.0 / (2.0 * math.pi ** 2), abs=1e-16)
    assert green_constant(5) == pytest.approx(0.25 * math.pi ** -2, abs=1e-16)


def test_expansion_depth_per_dimension():
    assert expansion_depth(3) == 3
    assert expansion_depth(4) == 5
    assert expansion_depth(5) == 6


def test_leading_profile_free_value(free_hom):
    # sigma = 1 and identity coordinates: calibration * (1/2pi) / r
    want = 0.5 / (2.0 * math.pi * 7.0)
    assert hom_green((7, 0, 0), free_hom) == pytest.approx(want, abs=1e-16)


def test_leading_profile_homogeneous(rad_hom, rng):
    x = rng.integers(1, 9, size=(6, 3))
    ratio = hom_green(2 * x, rad_hom) / hom_green(x, rad_hom)
    assert np.abs(ratio - 0.5).max() < 1e-13     # |2x|^(2-3) = |x|^(2-3)/2


def test_leading_profile_rejects_origin(free_hom):
    with pytest.raises(NumericalError):
        hom_green((0, 0, 0), free_hom)


def test_modified_coordinates_quadratic_form(rad_hom, rng):
    x = rng.standard_normal((5, 3))
    xt = modified_coordinates(x, rad_hom)
    qinv = np.linalg.inv(rad_hom.matrix)
    want = rad_hom.sigma ** 2 * np.einsum("ij,jk,ik->i", x, qinv, x)
    assert np.abs(np.sum(xt ** 2, axis=-1) - want).max() < 1e-12


def test_gradient_leading_free_closed_form(free_hom):
    c = 0.5 * green_constant(3)
    got = gradient_leading((6, 0, 0), 0, free_hom)
    assert got == pytest.approx(-c / 36.0, abs=1e-16)
    # orthogonal direction sees no radial change on an axis point
    assert gradient_leading((6, 0, 0), 1, free_hom) == 0.0


def test_calibration_picks_half(free_hom):
    calib = calibrate_leading(3)
    assert calib.factor == 0.5
    assert calib.mismatch < 0.01
    assert calib.constant == pytest.approx(0.5 * green_constant(3), abs=1e-16)
    assert set(calib.candidates) == {0.5, 1.0}


def test_expansion_eval_single_term(rad_hom):
    term = leading_term(rad_hom)
    x = (5, 2, 1)
    assert expansion_eval(x, [term], rad_hom) == pytest.approx(
        hom_green(x, rad_hom), abs=1e-16)
    assert term.order == 0


def test_residual_after_leading_decays_fast(free_ev64, free_hom):
    probe = make_ray_probe((1, 0, 0), (4, 6, 8, 12, 16), free_ev64.green)
    fit = residual_fit(probe, [leading_term(free_hom)], free_hom)
    assert fit.exponent < -2.2
    assert not fit.below_noise
    assert fit.n == 5


def test_default_rays_shape():
    rays = default_rays(3)
    assert rays == ((1, 0, 0), (1, 1, 0), (1, 1, 1))


def test_ray_probe_points(free_ev64):
    probe = make_ray_probe((2, 1, 0), (4, 7), free_ev64.green)
    assert probe.points.tolist() == [[8, 4, 0], [14, 7, 0]]
    assert len(probe.values) == 2
    with pytest.raises(ValueError):
        make_ray_probe((1, 0, 0), (2, 3), free_ev64.green)


@pytest.mark.parametrize("contrast", [0.0, 0.15])
def test_first_angular_correction_vanishes_even_law(contrast, rad_walk,
                                                    rad_hom):
    if contrast == 0.15:
        walk, hom = rad_walk, rad_hom
    else:
        kern = perturbation_kernel(moment_model("rademacher"), 0.0)
        walk = walk_kernel(kern)
        from anngf.perturbation import homogenized_matrix
        hom = homogenized_matrix(kern)
    omega = np.array([2.0, 1.0, -0.6])
    res = u1_eval(omega / np.linalg.norm(omega), walk, hom)
    assert res.value == 0.0
    assert res.spread == 0.0
    assert all(v == 0.0 for v in res.per_eps)


def test_cubic_moment_vanishes_for_even_walk(rad_walk, rng):
    xi = rng.standard_normal((4, 3))
    vals = cubic_moment(rad_walk, xi)
    assert np.abs(vals).max() < 1e-14
