import numpy as np
import pytest

from anngf.backend import current_backend, use_backend
from anngf.stencil import apply_operator


def brute_apply(u, a, boundary):
    # (Lu)(x) = sum_j a(x-e_j)(u(x)-u(x-e_j)) - a(x)(u(x+e_j)-u(x))
    d = u.ndim
    out = np.zeros_like(u)
    n = u.shape

    def get(arr, idx):
        if boundary == "periodic":
            return arr[tuple(i % m for i, m in zip(idx, n))]
        if all(0 <= i < m for i, m in zip(idx, n)):
            return arr[tuple(idx)]
        return 1.0 if arr is a else 0.0  # zero-extended field, unit coefficient

    for idx in np.ndindex(n):
        acc = 0.0
        for j in range(d):
            down = list(idx)
            down[j] -= 1
            up = list(idx)
            up[j] += 1
            acc += get(a, down) * (u[idx] - get(u, down))
            acc -= a[idx] * (get(u, up) - u[idx])
        out[idx] = acc
    return out


@pytest.mark.parametrize("boundary", ["zero", "periodic"])
def test_apply_matches_brute_force(boundary, rng):
    u = rng.standard_normal((5, 5, 5))
    a = 1.0 + 0.15 * rng.choice([-1.0, 1.0], size=(5, 5, 5))
    assert np.allclose(apply_operator(u, a, boundary),
                       brute_apply(u, a, boundary), atol=1e-13)


def test_unit_coefficient_is_laplacian(rng):
    u = rng.standard_normal((6, 6, 6))
    a = np.ones((6, 6, 6))
    out = apply_operator(u, a, "periodic")
    lap = np.zeros_like(u)
    for ax in range(3):
        lap += 2 * u - np.roll(u, 1, axis=ax) - np.roll(u, -1, axis=ax)
    assert np.allclose(out, lap, atol=1e-13)


@pytest.mark.parametrize("boundary", ["zero", "periodic"])
def test_backends_agree_bitwise(boundary, rng):
    u = rng.standard_normal((7, 7, 7))
    a = 1.0 + 0.15 * rng.choice([-1.0, 1.0], size=(7, 7, 7))
    with use_backend("numpy"):
        ref = apply_operator(u, a, boundary)
    with use_backend("numba"):
        jit = apply_operator(u, a, boundary)
    assert np.array_equal(ref, jit)


def test_backend_override_scoped():
    with use_backend("numpy"):
        assert current_backend() == "numpy"
    with use_backend("numba"):
        assert current_backend() in ("numba", "numpy")  # numpy if unavailable


def test_operator_symmetric(rng):
    u = rng.standard_normal((5, 5, 5))
    v = rng.standard_normal((5, 5, 5))
    a = 1.0 + 0.1 * rng.standard_normal((5, 5, 5))
    for boundary in ("zero", "periodic"):
        lhs = float(np.sum(v * apply_operator(u, a, boundary)))
        rhs = float(np.sum(u * apply_operator(v, a, boundary)))
        assert abs(lhs - rhs) < 1e-10
