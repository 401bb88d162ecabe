import numpy as np
import pytest

from anngf.errors import ConfigError
from anngf.perturbation import (_chain_coefficients, aperiodicity_check,
                                custom_model, homogenized_matrix,
                                moment_model, moment_summability,
                                perturbation_kernel, positivity_scan,
                                second_moment_matrix, walk_kernel)

# raw law definitions, restated here as the oracle for every moment below
RAW_MOMENTS = {
    # symmetric unit atoms at +-1
    "rademacher": lambda k: 0.5 * 1.0 ** k + 0.5 * (-1.0) ** k,
    # Lebesgue density on [-1, 1]
    "uniform": lambda k: 1.0 / (k + 1) if k % 2 == 0 else 0.0,
    # atoms 3/7 w.p. 0.7 and -1 w.p. 0.3 (centered, skewed)
    "two_point": lambda k: 0.7 * (3.0 / 7.0) ** k + 0.3 * (-1.0) ** k,
}


@pytest.mark.parametrize("law", sorted(RAW_MOMENTS))
def test_moment_model_matches_raw_law(law):
    model = moment_model(law)
    for k in range(1, 7):
        assert model.moment(k) == pytest.approx(RAW_MOMENTS[law](k), abs=1e-14)


def test_moment_model_unknown_law():
    with pytest.raises(ConfigError):
        moment_model("cauchy")


@pytest.mark.parametrize("law", sorted(RAW_MOMENTS))
def test_chain_coefficients_frozen(law):
    # hand-derived: singleton blocks vanish (centered field), the full
    # block carries the joint central moment with lower pairings
    # removed, and only non-adjacent pair-pairings survive at order 3
    model = moment_model(law)
    m = RAW_MOMENTS[law]
    m2, m3, m4 = m(2), m(3), m(4)

    def coeff(order, *blocks):
        parts, coeffs = _chain_coefficients(model, order)
        want = tuple(frozenset(b) for b in blocks)
        for part, c in zip(parts, coeffs):
            if part == want:
                return float(c)
        raise AssertionError(f"partition {want} missing at order {order}")

    assert coeff(1, (0, 1)) == pytest.approx(m2, abs=1e-14)
    assert coeff(1, (0,), (1,)) == 0.0
    assert coeff(2, (0, 1, 2)) == pytest.approx(m3, abs=1e-14)
    assert coeff(2, (0, 1), (2,)) == 0.0
    assert coeff(3, (0, 1, 2, 3)) == pytest.approx(m4 - 3 * m2 ** 2, abs=1e-14)
    assert coeff(3, (0, 3), (1, 2)) == pytest.approx(m2 ** 2, abs=1e-14)
    assert coeff(3, (0, 2), (1, 3)) == pytest.approx(m2 ** 2, abs=1e-14)
    assert coeff(3, (0, 1), (2, 3)) == 0.0


def test_first_order_scales_with_variance():
    # the order-1 kernel is delta^2 m_2 times a law-independent shape
    rad = perturbation_kernel(moment_model("rademacher"), 0.1, order=1)
    uni = perturbation_kernel(moment_model("uniform"), 0.1, order=1)
    assert np.allclose(uni.array, rad.array / 3.0, atol=1e-14)
    big = perturbation_kernel(moment_model("rademacher"), 0.2, order=1)
    assert np.allclose(big.array, 4.0 * rad.array, rtol=1e-12, atol=0)


def test_kernel_reflection_exact(rad_kernel):
    assert np.array_equal(rad_kernel.array,
                          rad_kernel.reflected_transpose().array)


def test_kernel_meta_records_shape_diagnostics(rad_kernel):
    for key in ("contrast", "model", "order", "asymmetry", "term_scale",
                "tail_ratio"):
        assert key in rad_kernel.meta
    assert rad_kernel.meta["model"] == "rademacher"
    assert rad_kernel.meta["tail_ratio"] < 0.1


def test_contrast_domain():
    model = moment_model("rademacher")
    with pytest.raises(ConfigError):
        perturbation_kernel(model, 0.35)
    with pytest.raises(ConfigError):
        perturbation_kernel(model, -0.01)


@pytest.mark.parametrize("law,contrast", [("rademacher", 0.0),
                                          ("rademacher", 0.05),
                                          ("uniform", 0.15),
                                          ("two_point", 0.15)])
def test_walk_kernel_invariants(law, contrast):
    kern = perturbation_kernel(moment_model(law), contrast)
    walk = walk_kernel(kern)
    assert float(np.sum(walk.array)) == 1.0            # exact unit mass
    assert abs(walk.meta["mass_repair"]) < 1e-12
    pts, vals = walk.points_values()
    assert np.abs(pts.T @ vals).max() < 1e-12          # no drift
    rev = walk.array[(slice(None, None, -1),) * 3]
    assert np.array_equal(walk.array, rev)             # even step law
    assert aperiodicity_check(walk).ok


def test_walk_second_moment_is_scaled_homogenized_matrix(rad_walk, rad_hom):
    second = second_moment_matrix(rad_walk)
    assert np.abs(second - rad_hom.matrix / 6.0).max() < 1e-13


def test_homogenized_matrix_free_path(free_hom):
    assert np.array_equal(free_hom.matrix, np.eye(3))
    assert free_hom.sigma == 1.0


def test_homogenized_matrix_perturbed(rad_hom):
    q = rad_hom.matrix
    assert np.abs(q - q.T).max() < 1e-12
    eigs = np.linalg.eigvalsh(q)
    assert eigs.min() > 0.0
    # contrast 0.15: deviation from identity is O(delta^2), small
    assert np.abs(eigs - 1.0).max() < 0.05
    assert 0.9 < rad_hom.sigma <= 1.0


def test_positivity_scan_rows():
    rows = positivity_scan(moment_model("rademacher"), [0.05, 0.1, 0.15, 0.2],
                           scan_radius=6)
    assert [r.contrast for r in rows] == [0.05, 0.1, 0.15, 0.2]
    for r in rows:
        assert r.min_value > 0.0
        assert r.total == 1.0
        assert 0.4 < r.origin_mass < 0.6
        assert r.neighbor_min > 0.0
        assert len(r.argmin) == 3


def test_custom_model_roundtrip():
    model = custom_model("mylaw", [0.0, 0.25, 0.0, 0.0625])
    assert model.moment(2) == 0.25
    assert model.moment(4) == 0.0625
    with pytest.raises(ConfigError):
        model.moment(5)
    with pytest.raises(ConfigError):
        custom_model("bad", [0.0, -1.0])


def test_moment_summability_positive(rad_walk):
    # finite weighted tail mass, monotone in the extra weight order
    lo = moment_summability(rad_walk, extra_order=2)
    hi = moment_summability(rad_walk, extra_order=4)
    assert 0.0 < lo < hi < np.inf
