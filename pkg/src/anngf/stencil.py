"""Backend dispatch for the divergence-form operator apply."""

from __future__ import annotations

import numpy as np

from . import _kernels_numpy
from .backend import HAS_NUMBA, current_backend


def apply_operator(u: np.ndarray, a: np.ndarray, boundary: str) -> np.ndarray:
    """Apply sum_j adj_diff_j(a * fwd_diff_j(u)) under the boundary rule.

    Parameters
    ----------
    u : ndarray
        Field on the box, one axis per lattice dimension.
    a : ndarray
        Edge coefficient field, same shape; a(x) weights every edge
        (x, x+e_j).  Must be uniformly positive for ellipticity.
    boundary : {"periodic", "zero"}
        "zero" extends u by 0 and a by 1 outside the box.
    """
    if u.shape != a.shape:
        raise ValueError("field and coefficient shapes differ")
    if boundary not in ("periodic", "zero"):
        raise ValueError(f"unknown boundary rule {boundary!r}")
    if current_backend() == "numba" and HAS_NUMBA and u.ndim == 3:
        from . import _kernels_numba

        out = np.empty_like(u)
        if boundary == "periodic":
            return _kernels_numba.apply_periodic_3d(u, a, out)
        return _kernels_numba.apply_zero_3d(u, a, out)
    if boundary == "periodic":
        return _kernels_numpy.apply_periodic(u, a)
    return _kernels_numpy.apply_zero(u, a)
