"""Numba-compiled lattice operator kernels, specialised to d = 3.

Arithmetic mirrors ``_kernels_numpy`` exactly (same per-site evaluation
order), so both backends agree bitwise and results stay reproducible
when the backend changes only for speed.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def apply_periodic_3d(u, a, out):  # pragma: no cover - compiled
    n0, n1, n2 = u.shape
    for i in range(n0):
        im = i - 1 if i > 0 else n0 - 1
        ip = i + 1 if i < n0 - 1 else 0
        for j in range(n1):
            jm = j - 1 if j > 0 else n1 - 1
            jp = j + 1 if j < n1 - 1 else 0
            for k in range(n2):
                km = k - 1 if k > 0 else n2 - 1
                kp = k + 1 if k < n2 - 1 else 0
                c = u[i, j, k]
                acc = a[im, j, k] * (c - u[im, j, k]) - a[i, j, k] * (u[ip, j, k] - c)
                acc += a[i, jm, k] * (c - u[i, jm, k]) - a[i, j, k] * (u[i, jp, k] - c)
                acc += a[i, j, km] * (c - u[i, j, km]) - a[i, j, k] * (u[i, j, kp] - c)
                out[i, j, k] = acc
    return out


@njit(cache=True)
def apply_zero_3d(u, a, out):  # pragma: no cover - compiled
    n0, n1, n2 = u.shape
    for i in range(n0):
        for j in range(n1):
            for k in range(n2):
                c = u[i, j, k]
                um = u[i - 1, j, k] if i > 0 else 0.0
                up = u[i + 1, j, k] if i < n0 - 1 else 0.0
                am = a[i - 1, j, k] if i > 0 else 1.0
                acc = am * (c - um) - a[i, j, k] * (up - c)
                um = u[i, j - 1, k] if j > 0 else 0.0
                up = u[i, j + 1, k] if j < n1 - 1 else 0.0
                am = a[i, j - 1, k] if j > 0 else 1.0
                acc += am * (c - um) - a[i, j, k] * (up - c)
                um = u[i, j, k - 1] if k > 0 else 0.0
                up = u[i, j, k + 1] if k < n2 - 1 else 0.0
                am = a[i, j, k - 1] if k > 0 else 1.0
                acc += am * (c - um) - a[i, j, k] * (up - c)
                out[i, j, k] = acc
    return out
