"""Numba/numpy backend selection for the hot lattice kernels.

The variable-coefficient operator apply inside the conjugate-gradient
loop dominates the Monte Carlo runtime.  A numba-compiled version is
used when available; a pure-numpy implementation with identical
semantics is always present.  Selection order:

1. explicit `use_backend(...)` override (tests, benchmarks),
2. the `ANNGF_BACKEND` environment variable ("numba" or "numpy"),
3. "numba" if the import succeeds, else "numpy".

The numba kernels are specialised to d = 3 (the performance-critical
box size); other dimensions always take the numpy path.
"""

from __future__ import annotations

import os
from contextlib import contextmanager

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

_VALID = ("numba", "numpy")
_override: str | None = None


def _env_choice() -> str | None:
    val = os.environ.get("ANNGF_BACKEND")
    if val is None:
        return None
    val = val.strip().lower()
    if val not in _VALID:
        raise ValueError(f"ANNGF_BACKEND must be one of {_VALID}, got {val!r}")
    return val


def current_backend() -> str:
    """Return the backend name that lattice kernels will use."""
    choice = _override if _override is not None else _env_choice()
    if choice is None:
        choice = "numba" if HAS_NUMBA else "numpy"
    if choice == "numba" and not HAS_NUMBA:
        choice = "numpy"
    return choice


@contextmanager
def use_backend(name: str):
    """Force a backend within a scope (overrides the environment)."""
    global _override
    if name not in _VALID:
        raise ValueError(f"backend must be one of {_VALID}, got {name!r}")
    prev = _override
    _override = name
    try:
        yield
    finally:
        _override = prev
