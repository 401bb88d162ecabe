"""Pure-numpy lattice operator kernels (reference implementations).

The operator is the divergence-form stencil

    (L u)(x) = sum_j  a(x-e_j) (u(x) - u(x-e_j)) - a(x) (u(x+e_j) - u(x))

with a site field ``a`` whose value sits on the edge (x, x+e_j) for every
axis j.  ``a = 1`` gives the (positive semi-definite) lattice Laplacian.
The zero-boundary variant extends u by 0 and a by 1 outside the box.

These functions are the semantic ground truth; the numba versions in
``_kernels_numba`` must match them term for term.
"""

from __future__ import annotations

import numpy as np


def apply_periodic(u: np.ndarray, a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    for ax in range(u.ndim):
        u_plus = np.roll(u, -1, axis=ax)
        u_minus = np.roll(u, 1, axis=ax)
        a_minus = np.roll(a, 1, axis=ax)
        out += a_minus * (u - u_minus) - a * (u_plus - u)
    return out


def apply_zero(u: np.ndarray, a: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    for ax in range(u.ndim):
        u_plus = np.zeros_like(u)
        u_minus = np.zeros_like(u)
        a_minus = np.ones_like(a)
        lo = [slice(None)] * u.ndim
        hi = [slice(None)] * u.ndim
        lo[ax] = slice(None, -1)
        hi[ax] = slice(1, None)
        u_plus[tuple(lo)] = u[tuple(hi)]
        u_minus[tuple(hi)] = u[tuple(lo)]
        a_minus[tuple(hi)] = a[tuple(lo)]
        out += a_minus * (u - u_minus) - a * (u_plus - u)
    return out
