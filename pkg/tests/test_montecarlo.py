import numpy as np
import pytest

from anngf.errors import ConfigError, ConvergenceError
from anngf.montecarlo import (box_problem, estimate_annealed_green,
                              estimate_kdelta_form, sample_field, solve_box)
from anngf.quadrature import (QuadratureConfig, free_green,
                              periodic_green_reference)
from anngf.stencil import apply_operator


def test_sample_field_reproducible():
    a = sample_field("rademacher", 9, 3, 2024, 5)
    b = sample_field("rademacher", 9, 3, 2024, 5)
    assert np.array_equal(a.values, b.values)
    c = sample_field("rademacher", 9, 3, 2024, 6)
    assert not np.array_equal(a.values, c.values)


def test_sample_field_law_ranges():
    rad = sample_field("rademacher", 17, 3, 1, 0).values
    assert set(np.unique(rad)) == {-1.0, 1.0}
    uni = sample_field("uniform", 17, 3, 1, 0).values
    assert uni.min() >= -1.0 and uni.max() <= 1.0
    assert len(np.unique(uni)) > 100
    two = sample_field("two_point", 17, 3, 1, 0).values
    atoms = np.unique(two)
    assert atoms == pytest.approx([-1.0, 3.0 / 7.0], abs=1e-15)
    frac_up = float(np.mean(two > 0.0))
    assert abs(frac_up - 0.7) < 0.02
    assert abs(two.mean()) < 0.02


def test_sample_field_validation():
    with pytest.raises(ConfigError):
        sample_field("gauss", 9, 3, 1, 0)
    with pytest.raises(ConfigError):
        sample_field("rademacher", 2, 3, 1, 0)


def test_box_problem_validation():
    s = sample_field("rademacher", 8, 3, 1, 0)
    with pytest.raises(ConfigError):
        box_problem(s, 0.1)                    # even dirichlet box
    with pytest.raises(ConfigError):
        box_problem(s, 1.0, boundary="periodic")
    p = box_problem(s, 0.1, boundary="periodic")
    assert p.source == (0, 0, 0)
    assert abs(p.rhs().sum()) < 1e-15


def test_solve_box_residual_and_cap():
    s = sample_field("uniform", 9, 3, 3, 1)
    p = box_problem(s, 0.15)
    res = solve_box(p)
    assert res.relative_residual <= 1e-10
    a = p.coefficients()
    got = apply_operator(res.field.values, a, "zero")
    assert np.abs(got - p.rhs()).max() < 1e-9
    with pytest.raises(ConvergenceError):
        solve_box(p, cap=3)


def test_zero_contrast_periodic_solve_matches_reference():
    s = sample_field("rademacher", 16, 3, 4, 0)
    p = box_problem(s, 0.0, boundary="periodic")
    res = solve_box(p, tol=1e-12)
    u = res.field.values
    u = u - u.mean()
    pts = [(0, 0, 0), (1, 0, 0), (3, 2, 0), (5, 5, 5), (8, 0, 0)]
    ref = periodic_green_reference(pts, None, 16, 3)
    direct = [u[p_] for p_ in pts]
    assert np.abs(np.asarray(direct) - ref).max() < 1e-9


def test_dirichlet_bias_shrinks_with_box():
    # contrast 0: the estimator is deterministic, so a single sample
    # exposes the finite-box bias exactly
    x = (2, 1, 0)
    exact = float(free_green(x, 3, QuadratureConfig(resolution=128)))
    biases = {}
    for box in (17, 33):
        out = estimate_annealed_green("rademacher", 0.0, box, [x], 1, 99)
        biases[box] = abs(out[x].mean - exact)
    assert biases[33] < biases[17]
    assert biases[17] < 0.01


def test_iteration_count_stays_elliptic():
    # disorder shifts the spectrum but conditioning stays comparable;
    # the clustered zero-contrast spectrum makes the baseline fast
    counts = {}
    for contrast in (0.0, 0.15):
        s = sample_field("rademacher", 33, 3, 12, 0)
        per = solve_box(box_problem(s, contrast, boundary="periodic"))
        dir_ = solve_box(box_problem(s, contrast))
        counts[contrast] = (per.iterations, dir_.iterations)
    assert counts[0.15][0] / counts[0.0][0] < 1.5
    assert counts[0.15][1] / counts[0.0][1] < 2.0


def test_green_estimator_worker_determinism():
    pts = [(1, 0, 0), (2, 2, 0)]
    one = estimate_annealed_green("uniform", 0.15, 17, pts, 40, 777,
                                  workers=1)
    two = estimate_annealed_green("uniform", 0.15, 17, pts, 40, 777,
                                  workers=2)
    for p in pts:
        assert one[p] == two[p]


def test_form_estimator_worker_determinism():
    freqs = [(1, 0, 0), (2, 1, 0)]
    one = estimate_kdelta_form("rademacher", 0.15, 16, freqs, 40, 888,
                               workers=1)
    two = estimate_kdelta_form("rademacher", 0.15, 16, freqs, 40, 888,
                               workers=2)
    for f in freqs:
        assert one[f] == two[f]


def test_stderr_shrinks_like_root_n():
    x = (1, 0, 0)
    small = estimate_annealed_green("rademacher", 0.15, 17, [x], 50, 5)
    large = estimate_annealed_green("rademacher", 0.15, 17, [x], 200, 5)
    ratio = small[x].stderr / large[x].stderr
    assert 1.4 < ratio < 2.8


def test_estimator_point_and_freq_validation():
    with pytest.raises(ConfigError):
        estimate_annealed_green("rademacher", 0.1, 9, [(4, 0, 0)], 2, 3)
    with pytest.raises(ConfigError):
        estimate_kdelta_form("rademacher", 0.1, 8, [(0, 0, 0)], 2, 3)


def test_form_estimator_matches_series_prediction():
    # cheap version of the oracle comparison: 600 samples, one frequency
    from anngf.perturbation import moment_model, perturbation_kernel
    from anngf.symbols import operator_symbol
    contrast, box, freq = 0.15, 16, (2, 0, 0)
    out = estimate_kdelta_form("rademacher", contrast, box, [freq], 600, 314)
    est = out[freq]
    kern = perturbation_kernel(moment_model("rademacher"), contrast)
    theta = 2.0 * np.pi * np.asarray(freq) / box
    gap = float(operator_symbol(theta, kern) - operator_symbol(theta))
    z = abs(est.mean - gap) / est.stderr
    assert z < 4.0
    assert not est.indeterminate
