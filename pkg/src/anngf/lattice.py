"""Discrete calculus on finite boxes of the integer lattice Z^d.

Conventions
-----------
Forward difference      (D_j u)(x) = u(x + e_j) - u(x)
Adjoint difference      (D*_j u)(x) = u(x - e_j) - u(x)
Lattice Laplacian       (A u)(x) = sum_j (D*_j D_j u)(x)
                                 = sum_j (2 u(x) - u(x+e_j) - u(x-e_j))

A is positive semi-definite; D*_j is the l2 adjoint of D_j (exactly on
periodic boxes, and for zero-extended fields whose stencils stay inside
the box).  Mixed higher-order differences D^alpha = prod_j D_j^{alpha_j}
commute, so the application order of a multi-index is immaterial.

Fields live on axis-aligned boxes with an integer offset (the lattice
coordinates of the [0, ..., 0] corner) and carry a boundary tag:
"periodic" wraps indices around the box, "zero" extends by zero.
Dimensions 3 <= d <= 5 are supported.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import StencilError

MIN_DIM = 3
MAX_DIM = 5

_BOUNDARIES = ("periodic", "zero")
_FIELD_MAGIC = b"ANGFLAT1"


def validate_dimension(d: int) -> int:
    d = int(d)
    if not MIN_DIM <= d <= MAX_DIM:
        raise ValueError(f"dimension must satisfy {MIN_DIM} <= d <= {MAX_DIM}, got {d}")
    return d


def validate_multi_index(alpha, d: int) -> tuple[int, ...]:
    """Check a multi-index: length d, non-negative integer entries."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != d:
        raise ValueError(f"multi-index length {len(alpha)} != dimension {d}")
    if any(a < 0 for a in alpha):
        raise ValueError(f"multi-index entries must be >= 0, got {alpha}")
    return alpha


@dataclass(frozen=True)
class LatticeField:
    """Real scalar field on a finite box of Z^d.

    Attributes
    ----------
    values : ndarray
        Field values, one axis per dimension; values[i] is the value at
        lattice point offset + i.
    offset : tuple of int
        Lattice coordinates of values[0, ..., 0].
    boundary : {"periodic", "zero"}
        Extension rule used by difference operators at the box faces.
    """

    values: np.ndarray
    offset: tuple[int, ...]
    boundary: str = "zero"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "offset", tuple(int(o) for o in self.offset))
        validate_dimension(vals.ndim)
        if len(self.offset) != vals.ndim:
            raise ValueError("offset length does not match dimension")
        if self.boundary not in _BOUNDARIES:
            raise ValueError(f"boundary must be one of {_BOUNDARIES}")
        if any(n < 1 for n in vals.shape):
            raise ValueError("box extents must be positive")

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def extents(self) -> tuple[int, ...]:
        return self.values.shape

    def index_of(self, point) -> tuple[int, ...]:
        idx = tuple(int(p) - o for p, o in zip(point, self.offset))
        if len(idx) != self.dim:
            raise ValueError("point length does not match dimension")
        if any(not 0 <= i < n for i, n in zip(idx, self.extents)):
            raise IndexError(f"point {tuple(point)} outside box")
        return idx

    def at(self, point) -> float:
        """Value at a lattice point (inside the box)."""
        return float(self.values[self.index_of(point)])


def delta_field(d: int, halfwidth: int, boundary: str = "zero",
                location=None) -> LatticeField:
    """Unit point mass on the centered box [-halfwidth, halfwidth]^d."""
    validate_dimension(d)
    n = 2 * halfwidth + 1
    vals = np.zeros((n,) * d)
    loc = (0,) * d if location is None else tuple(int(c) for c in location)
    idx = tuple(c + halfwidth for c in loc)
    vals[idx] = 1.0
    return LatticeField(vals, offset=(-halfwidth,) * d, boundary=boundary)


def _shift(values: np.ndarray, axis: int, step: int, boundary: str) -> np.ndarray:
    """Array of u(x + step*e_axis) under the field's boundary rule."""
    if boundary == "periodic":
        return np.roll(values, -step, axis=axis)
    out = np.zeros_like(values)
    src = [slice(None)] * values.ndim
    dst = [slice(None)] * values.ndim
    if step > 0:
        src[axis] = slice(step, None)
        dst[axis] = slice(None, -step)
    else:
        src[axis] = slice(None, step)
        dst[axis] = slice(-step, None)
    out[tuple(dst)] = values[tuple(src)]
    return out


def _check_axis(field: LatticeField, axis: int) -> int:
    axis = int(axis)
    if not 0 <= axis < field.dim:
        raise ValueError(f"axis {axis} out of range for dimension {field.dim}")
    return axis


def forward_diff(field: LatticeField, axis: int) -> LatticeField:
    """(D_j u)(x) = u(x + e_j) - u(x) on the field's box."""
    axis = _check_axis(field, axis)
    shifted = _shift(field.values, axis, +1, field.boundary)
    return replace(field, values=shifted - field.values)


def adjoint_diff(field: LatticeField, axis: int) -> LatticeField:
    """(D*_j u)(x) = u(x - e_j) - u(x), the l2 adjoint of forward_diff."""
    axis = _check_axis(field, axis)
    shifted = _shift(field.values, axis, -1, field.boundary)
    return replace(field, values=shifted - field.values)


def laplacian(field: LatticeField) -> LatticeField:
    """sum_j D*_j D_j u; positive semi-definite by construction."""
    out = np.zeros_like(field.values)
    for ax in range(field.dim):
        up = _shift(field.values, ax, +1, field.boundary)
        down = _shift(field.values, ax, -1, field.boundary)
        out += 2.0 * field.values - up - down
    return replace(field, values=out)


def multi_diff(field: LatticeField, alpha) -> LatticeField:
    """Mixed forward difference D^alpha = prod_j D_j^{alpha_j}.

    Raises StencilError when some alpha_j reaches the box extent along
    axis j, since then no lattice point of the box sees a full stencil.
    """
    alpha = validate_multi_index(alpha, field.dim)
    for ax, (a, n) in enumerate(zip(alpha, field.extents)):
        if a >= n:
            raise StencilError(
                f"order {a} stencil along axis {ax} exceeds extent {n}")
    out = field
    for ax, a in enumerate(alpha):
        for _ in range(a):
            out = forward_diff(out, ax)
    return out


def field_inner(u: LatticeField, v: LatticeField) -> float:
    """l2 inner product over a common box."""
    if u.extents != v.extents or u.offset != v.offset:
        raise ValueError("fields live on different boxes")
    return float(np.vdot(u.values, v.values))


# ---------------------------------------------------------------------------
# serialization: flat binary and CSV, header first, then row-major values


def field_to_binary(field: LatticeField) -> bytes:
    header = {
        "dim": field.dim,
        "extents": list(field.extents),
        "offset": list(field.offset),
        "boundary": field.boundary,
    }
    hbytes = json.dumps(header, sort_keys=True).encode()
    out = io.BytesIO()
    out.write(_FIELD_MAGIC)
    out.write(np.uint32(len(hbytes)).tobytes())
    out.write(hbytes)
    out.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())
    return out.getvalue()


def field_from_binary(data: bytes) -> LatticeField:
    if data[:8] != _FIELD_MAGIC:
        raise ValueError("bad magic; not a lattice field blob")
    hlen = int(np.frombuffer(data[8:12], dtype=np.uint32)[0])
    header = json.loads(data[12:12 + hlen].decode())
    vals = np.frombuffer(data[12 + hlen:], dtype="<f8").reshape(header["extents"]).copy()
    return LatticeField(vals, offset=tuple(header["offset"]),
                        boundary=header["boundary"])


def field_to_csv(field: LatticeField) -> str:
    lines = [
        f"# dim={field.dim}",
        f"# extents={','.join(str(n) for n in field.extents)}",
        f"# offset={','.join(str(o) for o in field.offset)}",
        f"# boundary={field.boundary}",
        ",".join(f"x{j}" for j in range(field.dim)) + ",value",
    ]
    for idx in np.ndindex(field.extents):
        point = [i + o for i, o in zip(idx, field.offset)]
        lines.append(",".join(str(c) for c in point) + f",{float(field.values[idx])!r}")
    return "\n".join(lines) + "\n"


def field_from_csv(text: str) -> LatticeField:
    meta = {}
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key.strip()] = val.strip()
        elif not line.startswith("x0"):
            rows.append(line)
    extents = tuple(int(n) for n in meta["extents"].split(","))
    offset = tuple(int(o) for o in meta["offset"].split(","))
    vals = np.zeros(extents)
    for row in rows:
        parts = row.split(",")
        point = tuple(int(c) for c in parts[:-1])
        idx = tuple(p - o for p, o in zip(point, offset))
        vals[idx] = float(parts[-1])
    return LatticeField(vals, offset=offset, boundary=meta["boundary"])
