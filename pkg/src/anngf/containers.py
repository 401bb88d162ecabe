"""Shared containers: lattice kernels, symbol grids, homogenized data.

MatrixKernel and ScalarKernel store finitely supported convolution
kernels on the centered box |x|_inf <= radius as dense arrays (index i
corresponds to the lattice point i - radius).  SymbolField stores
function values on the Fourier grid theta_k = 2*pi*k/N - pi.

Serialization: CSV with one lattice point (or grid node) per row plus a
JSON sidecar of build metadata; binary blobs start with an 8-byte magic.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from .lattice import validate_dimension

KERNEL_MAGIC = b"ANGFKER1"
SYMBOL_MAGIC = b"ANGFSYM1"


def centered_index(x, radius: int) -> tuple[int, ...]:
    idx = tuple(int(c) + radius for c in x)
    if any(not 0 <= i <= 2 * radius for i in idx):
        raise IndexError(f"point {tuple(x)} outside radius-{radius} box")
    return idx


def box_points(radius: int, d: int) -> np.ndarray:
    """All lattice points of the centered box, shape ((2R+1)^d, d)."""
    axes = [np.arange(-radius, radius + 1)] * d
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=-1)


@dataclass(frozen=True)
class MatrixKernel:
    """Matrix-valued kernel x -> (d, d) on the box |x|_inf <= radius."""

    array: np.ndarray  # shape (2R+1,)*d + (d, d)
    radius: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.array, dtype=float)
        object.__setattr__(self, "array", arr)
        d = arr.ndim - 2
        validate_dimension(d)
        if arr.shape[-2:] != (d, d) or arr.shape[:d] != (2 * self.radius + 1,) * d:
            raise ValueError("kernel array shape inconsistent with radius/dim")

    @property
    def dim(self) -> int:
        return self.array.ndim - 2

    def at(self, x) -> np.ndarray:
        """Kernel matrix at a lattice point; zero outside the box."""
        try:
            return self.array[centered_index(x, self.radius)]
        except IndexError:
            return np.zeros((self.dim, self.dim))

    def reflected_transpose(self) -> "MatrixKernel":
        """Kernel x -> K(-x)^T (the reflection-transpose companion)."""
        d = self.dim
        arr = self.array[(slice(None, None, -1),) * d]
        return MatrixKernel(np.swapaxes(arr, -1, -2), self.radius, dict(self.meta))

    def total(self) -> np.ndarray:
        """sum_x K(x), the zero-frequency value of the transform."""
        return self.array.sum(axis=tuple(range(self.dim)))


@dataclass(frozen=True)
class ScalarKernel:
    """Scalar kernel x -> value on the box |x|_inf <= radius."""

    array: np.ndarray
    radius: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.array, dtype=float)
        object.__setattr__(self, "array", arr)
        validate_dimension(arr.ndim)
        if arr.shape != (2 * self.radius + 1,) * arr.ndim:
            raise ValueError("kernel array shape inconsistent with radius")

    @property
    def dim(self) -> int:
        return self.array.ndim

    def at(self, x) -> float:
        try:
            return float(self.array[centered_index(x, self.radius)])
        except IndexError:
            return 0.0

    def total(self) -> float:
        return float(self.array.sum())

    def points_values(self):
        pts = box_points(self.radius, self.dim)
        return pts, self.array.ravel()


@dataclass(frozen=True)
class HomogenizedData:
    """Effective quadratic-form matrix and derived normalization.

    matrix : Q, symmetric positive definite, = I + sum_x K(x)
    sigma : (det Q)^(1/2d), the isotropic scale factor
    inv_sqrt : Q^(-1/2), used for the coordinate change
    """

    matrix: np.ndarray
    sigma: float
    inv_sqrt: np.ndarray
    contrast: float
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SymbolField:
    """Sampled function on the Fourier grid of the torus.

    values[k1, ..., kd, ...] is the value at theta_k with components
    theta_j = 2*pi*k_j/resolution - pi; trailing axes (if any) index
    matrix components.  Resolution must be even and >= 4 so the origin
    sits on the grid at k = resolution/2.
    """

    values: np.ndarray
    resolution: int
    dim: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = int(self.resolution)
        if n < 4 or n % 2:
            raise ValueError(f"resolution must be even and >= 4, got {n}")
        validate_dimension(self.dim)
        if self.values.shape[: self.dim] != (n,) * self.dim:
            raise ValueError("values shape inconsistent with resolution")

    def angles(self) -> np.ndarray:
        return grid_angles(self.resolution)

    def node_angle(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=int)
        return 2.0 * np.pi * k / self.resolution - np.pi


def grid_angles(n: int) -> np.ndarray:
    """Grid angles theta_k = 2*pi*k/n - pi for k = 0..n-1."""
    return 2.0 * np.pi * np.arange(n) / n - np.pi


# ---------------------------------------------------------------------------
# exports


def _fmt(v: float) -> str:
    return repr(float(v))


def matrix_kernel_to_csv(kernel: MatrixKernel, include_zero: bool = False) -> str:
    d = kernel.dim
    header = ",".join(f"x{j}" for j in range(d)) + ",row,col,value"
    lines = [header]
    pts = box_points(kernel.radius, d)
    flat = kernel.array.reshape(-1, d, d)
    for p, mat in zip(pts, flat):
        for r in range(d):
            for c in range(d):
                v = mat[r, c]
                if v == 0.0 and not include_zero:
                    continue
                lines.append(",".join(str(int(q)) for q in p) + f",{r},{c},{_fmt(v)}")
    return "\n".join(lines) + "\n"


def scalar_kernel_to_csv(kernel: ScalarKernel, include_zero: bool = False) -> str:
    d = kernel.dim
    header = ",".join(f"x{j}" for j in range(d)) + ",value"
    lines = [header]
    pts, vals = kernel.points_values()
    for p, v in zip(pts, vals):
        if v == 0.0 and not include_zero:
            continue
        lines.append(",".join(str(int(q)) for q in p) + f",{_fmt(v)}")
    return "\n".join(lines) + "\n"


def kernel_sidecar(kernel) -> str:
    """JSON sidecar with the build metadata of a kernel."""
    doc = {"radius": kernel.radius, "dim": kernel.dim}
    doc.update(kernel.meta)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def symbol_to_binary(sym: SymbolField) -> bytes:
    header = {
        "dim": sym.dim,
        "resolution": sym.resolution,
        "shape": list(sym.values.shape),
        "dtype": str(sym.values.dtype),
        "meta": sym.meta,
    }
    hbytes = json.dumps(header, sort_keys=True).encode()
    out = io.BytesIO()
    out.write(SYMBOL_MAGIC)
    out.write(np.uint32(len(hbytes)).tobytes())
    out.write(hbytes)
    out.write(np.ascontiguousarray(sym.values).tobytes())
    return out.getvalue()


def symbol_from_binary(data: bytes) -> SymbolField:
    if data[:8] != SYMBOL_MAGIC:
        raise ValueError("bad magic; not a symbol-field blob")
    hlen = int(np.frombuffer(data[8:12], dtype=np.uint32)[0])
    header = json.loads(data[12:12 + hlen].decode())
    vals = np.frombuffer(data[12 + hlen:], dtype=header["dtype"])
    vals = vals.reshape(header["shape"]).copy()
    return SymbolField(vals, header["resolution"], header["dim"],
                       dict(header.get("meta", {})))


def symbol_to_csv(sym: SymbolField) -> str:
    d = sym.dim
    comp_shape = sym.values.shape[d:]
    header = ",".join(f"k{j}" for j in range(d))
    header += "," + ",".join(f"c{j}" for j in range(len(comp_shape)))
    header = header.rstrip(",") + ",re,im"
    lines = [header]
    vals = sym.values.reshape((-1,) + comp_shape)
    for flat_idx, node in enumerate(np.ndindex((sym.resolution,) * d)):
        block = vals[flat_idx]
        for comp in np.ndindex(comp_shape) if comp_shape else [()]:
            v = complex(block[comp]) if comp_shape else complex(block)
            row = ",".join(str(i) for i in node)
            if comp:
                row += "," + ",".join(str(i) for i in comp)
            lines.append(row + f",{_fmt(v.real)},{_fmt(v.imag)}")
    return "\n".join(lines) + "\n"
