import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anngf.containers import grid_angles
from anngf.errors import NumericalError
from anngf.symbols import (cosine_sine_sums, helmholtz_kernel,
                           helmholtz_symbol, nonvanishing_check,
                           nonvanishing_scan, operator_symbol, walk_transform)


def test_axis_angle_projects_on_axis():
    f = helmholtz_symbol(np.array([np.pi, 0.0, 0.0]))
    assert np.allclose(f, np.diag([1.0, 0.0, 0.0]), atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0.3, np.pi - 0.3), min_size=3, max_size=3),
       st.lists(st.sampled_from([-1.0, 1.0]), min_size=3, max_size=3))
def test_projection_identities(mags, signs):
    theta = np.array(mags) * np.array(signs)
    f = helmholtz_symbol(theta)
    assert np.allclose(f @ f, f, atol=1e-12)              # idempotent
    assert abs(np.trace(f) - 1.0) < 1e-12                 # rank one
    assert np.allclose(f, f.conj().T, atol=1e-14)         # hermitian


def test_projection_batch_shape(rng):
    theta = rng.uniform(0.5, 2.5, size=(7, 3))
    f = helmholtz_symbol(theta)
    assert f.shape == (7, 3, 3)
    assert np.allclose(f[2], helmholtz_symbol(theta[2]), atol=0)


@pytest.mark.parametrize("theta", [(0.0, 0.0, 0.0), (2 * np.pi, 0.0, 0.0)])
def test_projection_undefined_at_trivial_angles(theta):
    with pytest.raises(NumericalError):
        helmholtz_symbol(np.array(theta))


def test_kernel_matches_direct_node_sum():
    # independent oracle: plain nested sum over grid nodes vs FFT path
    n, d, r = 8, 3, 3
    kern = helmholtz_kernel(d, n, radius=r)
    th = grid_angles(n)
    c = n // 2
    table = np.empty((n,) * d + (d, d), dtype=complex)
    for k in np.ndindex((n,) * d):
        if k == (c,) * d:
            table[k] = np.eye(d) / d
        else:
            table[k] = helmholtz_symbol(np.array([th[i] for i in k]))
    for x in np.ndindex((2 * r + 1,) * d):
        pt = np.array(x) - r
        acc = np.zeros((d, d), dtype=complex)
        for k in np.ndindex((n,) * d):
            phase = np.exp(1j * np.dot(pt, [th[i] for i in k]))
            acc += phase * table[k]
        acc /= n ** d
        assert np.abs(acc.imag).max() < 1e-12
        assert np.allclose(kern.array[x], acc.real, atol=1e-12)


@pytest.mark.parametrize("n", [16, 32])
def test_kernel_origin_value(n):
    kern = helmholtz_kernel(3, n)
    origin = kern.array[(kern.radius,) * 3]
    assert np.allclose(np.diag(origin), 1.0 / 3.0, atol=1e-12)
    assert abs(np.trace(origin) - 1.0) < 1e-12
    # off-diagonal entries are genuinely nonzero at finite range
    assert np.abs(origin - np.diag(np.diag(origin))).max() > 1e-4


def test_kernel_reflection_transpose():
    kern = helmholtz_kernel(3, 32)
    flipped = kern.array[(slice(None, None, -1),) * 3]
    assert np.allclose(kern.array, np.swapaxes(flipped, -1, -2), atol=1e-10)


def test_free_symbol_closed_form(rng):
    theta = rng.uniform(-np.pi, np.pi, size=(40, 3))
    got = operator_symbol(theta)
    want = np.sum(4.0 * np.sin(theta / 2.0) ** 2, axis=-1)
    assert np.allclose(got, want, atol=1e-13)


def test_symbol_even_and_real(rad_kernel, rng):
    theta = rng.uniform(-np.pi, np.pi, size=(50, 3))
    m_plus = operator_symbol(theta, rad_kernel)
    m_minus = operator_symbol(-theta, rad_kernel)
    assert np.isrealobj(m_plus)
    assert np.abs(m_plus - m_minus).max() < 1e-10


def test_symbol_rejects_skewed_kernel(rad_kernel):
    broken = rad_kernel.array.copy()
    broken[rad_kernel.radius + 1, rad_kernel.radius, rad_kernel.radius, 0, 1] += 1e-3
    skewed = type(rad_kernel)(broken, rad_kernel.radius, dict(rad_kernel.meta))
    with pytest.raises(NumericalError):
        operator_symbol(np.array([0.4, 0.9, -1.3]), skewed)


def test_walk_transform_normalization(rad_walk):
    assert abs(walk_transform(np.zeros(3), rad_walk) - 1.0) < 1e-14


def test_cosine_sine_decomposition(rad_walk, rng):
    theta = rng.uniform(-np.pi, np.pi, size=(60, 3))
    c, s = cosine_sine_sums(theta, rad_walk)
    that = walk_transform(theta, rad_walk)
    gap = np.abs(1.0 - that) ** 2
    assert np.abs(c ** 2 + s ** 2 - gap).max() < 1e-12
    assert np.abs((1.0 - that) - (c + 1j * s)).max() < 1e-12


def test_nonvanishing_scan_refines_downward(rad_walk):
    rep = nonvanishing_scan(rad_walk, resolution=17, refinements=2)
    assert rep.min_abs > 0.0
    assert rep.certified_radius > 0.5
    assert rep.quadratic_floor > 0.0
    single = nonvanishing_check(rad_walk, resolution=17)
    # refined grids are supersets, so the scan minimum cannot exceed
    # the single-grid minimum
    assert rep.min_abs ** 2 <= single + 1e-15
