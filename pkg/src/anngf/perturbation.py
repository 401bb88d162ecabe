"""Perturbative kernel of the averaged operator and derived objects.

The averaged inverse of the random divergence-form operator is a
convolution operator; its deviation from the free inverse is encoded by
a matrix-valued kernel with one term per order in the contrast.  Each
order-n term is an expectation over n+1 copies of the i.i.d. field
threaded through Helmholtz kernels with mean-projections in between.
Expanding by the coincidence pattern of the n+1 lattice positions turns
the expectation into a sum over set partitions; solving a triangular
(zeta) system converts pattern weights into coefficients of constrained
convolution chains, each of which reduces to FFT products, pointwise
products, or lattice sums of the Helmholtz kernel.

All series tables are built on a periodic grid (resolution n), so the
chains are exact torus objects; aliasing of the infinite-lattice kernel
decays like the kernel itself and is controlled by n.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache, cached_property

import numpy as np

from .containers import HomogenizedData, MatrixKernel, ScalarKernel, box_points
from .errors import ConfigError, NumericalError
from .lattice import validate_dimension
from .symbols import _centered_ifft, helmholtz_symbol_grid

__all__ = [
    "MomentModel",
    "rademacher_model",
    "uniform_model",
    "asymmetric_two_point_model",
    "custom_model",
    "field_moment",
    "series_term",
    "perturbation_kernel",
    "walk_kernel",
    "homogenized_matrix",
    "aperiodicity_check",
    "moment_summability",
    "second_moment_matrix",
    "positivity_scan",
    "CONTRAST_LIMIT",
    "SERIES_RESOLUTION",
    "SERIES_RADIUS",
]

CONTRAST_LIMIT = 0.3
SERIES_RESOLUTION = {3: 64, 4: 24, 5: 12}
SERIES_RADIUS = {3: 8, 4: 6, 5: 4}
MAX_ORDER = 3


# ---------------------------------------------------------------------------
# moment models


@dataclass(frozen=True)
class MomentModel:
    """Law of one field value through its moments m_1..m_K.

    The field is assumed i.i.d. across sites and bounded by 1, so
    |m_k| <= 1; validity additionally requires the Hankel moment matrix
    (m_{i+j}) to be positive semidefinite.
    """

    name: str
    moments: tuple

    def __post_init__(self):
        ms = tuple(float(m) for m in self.moments)
        object.__setattr__(self, "moments", ms)
        if len(ms) < 4:
            raise ConfigError("moment model needs at least m_1..m_4")
        if any(abs(m) > 1.0 + 1e-12 for m in ms):
            raise ConfigError(f"moments of a field bounded by 1 need |m_k| <= 1: {ms}")
        seq = (1.0,) + ms
        h = len(seq) // 2
        hank = np.array([[seq[i + j] for j in range(h)] for i in range(h)])
        if np.linalg.eigvalsh(hank).min() < -1e-10:
            raise ConfigError(f"moment sequence of {self.name!r} is not realizable")

    def moment(self, k: int) -> float:
        if k == 0:
            return 1.0
        if k > len(self.moments):
            raise ConfigError(f"model {self.name!r} stores only m_1..m_{len(self.moments)}")
        return self.moments[k - 1]

    @property
    def symmetric(self) -> bool:
        return all(m == 0.0 for m in self.moments[::2])


def _power_moments(values, weights, count: int = 8) -> tuple:
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    return tuple(float(np.sum(w * v ** k)) for k in range(1, count + 1))


def rademacher_model() -> MomentModel:
    """Fair signs: values -1, +1 with probability 1/2 each."""
    return MomentModel("rademacher", _power_moments([-1.0, 1.0], [0.5, 0.5]))


def uniform_model() -> MomentModel:
    """Uniform on [-1, 1]: m_k = 1/(k+1) for even k, 0 for odd."""
    return MomentModel("uniform", tuple(
        0.0 if k % 2 else 1.0 / (k + 1) for k in range(1, 9)))


def asymmetric_two_point_model(p: float = 0.7) -> MomentModel:
    """Centered two-point law in [-1, 1]: (1-p)/p w.p. p, and -1 w.p. 1-p.

    Requires p >= 1/2 so the positive value stays inside [-1, 1].  For
    the default p = 0.7 the law is {3/7 w.p. 0.7, -1 w.p. 0.3} with
    m_2 = 3/7, m_3 = -12/49 (a genuinely skewed field).
    """
    if not 0.5 <= p < 1.0:
        raise ConfigError("two-point parameter must satisfy 0.5 <= p < 1")
    return MomentModel("two_point_asymmetric",
                       _power_moments([(1.0 - p) / p, -1.0], [p, 1.0 - p]))


def custom_model(name: str, moments) -> MomentModel:
    return MomentModel(name, tuple(moments))


LAW_BUILDERS = {
    "rademacher": rademacher_model,
    "uniform": uniform_model,
    "two_point_asymmetric": asymmetric_two_point_model,
}


def moment_model(law: str) -> MomentModel:
    """Moment model for a named disorder law ("two_point" accepted)."""
    key = "two_point_asymmetric" if law == "two_point" else law
    try:
        return LAW_BUILDERS[key]()
    except KeyError:
        raise ConfigError(f"unknown disorder law: {law!r}") from None


def field_moment(model: MomentModel, multiplicities) -> float:
    """E prod_b X_b^{p_b} for independent copies at given multiplicities."""
    out = 1.0
    for k in multiplicities:
        out *= model.moment(int(k))
    return out


# ---------------------------------------------------------------------------
# set partitions and pattern weights


def _set_partitions(items: tuple):
    """All set partitions, as tuples of frozensets."""
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield (frozenset({first}),) + part
        for i, block in enumerate(part):
            yield part[:i] + (block | {first},) + part[i + 1:]


def _canonical(part) -> tuple:
    return tuple(sorted((frozenset(b) for b in part), key=min))


def _refines(pi, rho) -> bool:
    return all(any(b <= c for c in rho) for b in pi)


def _pattern_weight(model: MomentModel, part, n: int) -> float:
    """Weight of one coincidence pattern of positions 0..n.

    Value of E[X_{b(0)} Pperp(X_{b(1)} Pperp(... X_{b(n)}))] where b(i)
    is the block of position i and Pperp subtracts the expectation.
    Carried out on polynomials in the block variables, represented as
    {sorted tuple of block ids with multiplicity: coefficient}.
    """
    bid = {}
    for i, block in enumerate(part):
        for pos in block:
            bid[pos] = i

    def expect(poly: dict) -> float:
        tot = 0.0
        for mono, coeff in poly.items():
            tot += coeff * field_moment(model, Counter(mono).values())
        return tot

    poly = {(bid[n],): 1.0}
    for pos in range(n - 1, -1, -1):
        poly[()] = poly.get((), 0.0) - expect(poly)
        poly = {tuple(sorted(mono + (bid[pos],))): c for mono, c in poly.items()}
    return expect(poly)


@lru_cache(maxsize=32)
def _partition_list(n: int) -> tuple:
    return tuple(sorted({_canonical(p) for p in _set_partitions(tuple(range(n + 1)))},
                        key=lambda p: (len(p), tuple(sorted(min(b) for b in p)))))


def _chain_coefficients(model: MomentModel, n: int):
    """Coefficients of the constrained chains from the pattern weights.

    The chain of pattern pi sums every path whose coincidence pattern
    REFINES to at least pi, so chains and exact-pattern sums are related
    by the zeta matrix of the partition lattice; the coefficient vector
    solves the transposed triangular system.
    """
    parts = _partition_list(n)
    w = np.array([_pattern_weight(model, p, n) for p in parts])
    z = np.array([[1.0 if _refines(pi, rho) else 0.0 for rho in parts]
                  for pi in parts])
    coeffs = np.linalg.solve(z.T, w)
    return parts, coeffs


def _signature(part, n: int) -> tuple:
    """Block ids per position 0..n, numbered by first occurrence."""
    bid = {}
    for block in part:
        for pos in block:
            bid[pos] = min(block)
    order = {}
    sig = []
    for pos in range(n + 1):
        key = bid[pos]
        if key not in order:
            order[key] = len(order)
        sig.append(order[key])
    return tuple(sig)


# ---------------------------------------------------------------------------
# chain tables on the torus grid


class _ChainTables:
    """Torus-grid tables of Helmholtz-kernel chains at one resolution.

    All members are centered arrays over the full grid (index i is the
    point i - n/2) or constant matrices; everything derives from the
    same grid projection, so torus convolutions computed as spectral
    products agree exactly with real-space sums of the table.
    """

    def __init__(self, d: int, resolution: int):
        self.d = d
        self.n = int(resolution)

    @cached_property
    def symbol(self) -> np.ndarray:
        return helmholtz_symbol_grid(self.d, self.n).values

    @cached_property
    def kernel(self) -> np.ndarray:
        return _centered_ifft(self.symbol, self.d).real

    @property
    def center(self) -> tuple:
        return (self.n // 2,) * self.d

    @cached_property
    def k0(self) -> np.ndarray:
        return self.kernel[self.center]

    @cached_property
    def conv2(self) -> np.ndarray:
        f2 = self.symbol @ self.symbol
        return _centered_ifft(f2, self.d).real

    @cached_property
    def conv3(self) -> np.ndarray:
        f2 = self.symbol @ self.symbol
        return _centered_ifft(f2 @ self.symbol, self.d).real

    @cached_property
    def mid(self) -> np.ndarray:
        return _centered_ifft(self.symbol @ self.k0 @ self.symbol, self.d).real

    @cached_property
    def triple(self) -> np.ndarray:
        # torus reflection of the even-sided centered table: flip then
        # roll, so index i maps to (n - i) mod n, i.e. x maps to -x
        rev = self.kernel[(slice(None, None, -1),) * self.d]
        rev = np.roll(rev, (1,) * self.d, axis=tuple(range(self.d)))
        return np.einsum("...jk,...kl,...lm->...jm", self.kernel, rev, self.kernel)

    @cached_property
    def pair_sum(self) -> np.ndarray:
        """M = sum_s K(s) K(-s) = (K*K)(0)."""
        return self.conv2[self.center]

    @cached_property
    def mid_sum(self) -> np.ndarray:
        """M2 = sum_s K(s) K(0) K(-s)."""
        return self.mid[self.center]

    @cached_property
    def conv3_zero(self) -> np.ndarray:
        return self.conv3[self.center]


@lru_cache(maxsize=3)
def _tables(d: int, resolution: int) -> _ChainTables:
    return _ChainTables(d, resolution)


def _delta_form(mat: np.ndarray, t: _ChainTables) -> np.ndarray:
    out = np.zeros((t.n,) * t.d + mat.shape)
    out[t.center] = mat
    return out


def _form_array(sig: tuple, t: _ChainTables) -> np.ndarray:
    """Full-grid array of the constrained chain with the given signature."""
    k0, kern = t.k0, t.kernel
    forms = {
        # order 1
        (0, 1): lambda: kern,
        (0, 0): lambda: _delta_form(k0, t),
        # order 2
        (0, 1, 2): lambda: t.conv2,
        (0, 0, 1): lambda: np.einsum("jk,...kl->...jl", k0, kern),
        (0, 1, 1): lambda: np.einsum("...jk,kl->...jl", kern, k0),
        (0, 1, 0): lambda: _delta_form(t.pair_sum, t),
        (0, 0, 0): lambda: _delta_form(k0 @ k0, t),
        # order 3
        (0, 1, 2, 3): lambda: t.conv3,
        (0, 0, 1, 2): lambda: np.einsum("jk,...kl->...jl", k0, t.conv2),
        (0, 1, 1, 2): lambda: t.mid,
        (0, 1, 2, 2): lambda: np.einsum("...jk,kl->...jl", t.conv2, k0),
        (0, 1, 0, 2): lambda: np.einsum("jk,...kl->...jl", t.pair_sum, kern),
        (0, 1, 2, 1): lambda: np.einsum("...jk,kl->...jl", kern, t.pair_sum),
        (0, 1, 2, 0): lambda: _delta_form(t.conv3_zero, t),
        (0, 0, 1, 1): lambda: np.einsum("jk,...kl,lm->...jm", k0, kern, k0),
        (0, 1, 0, 1): lambda: t.triple,
        (0, 1, 1, 0): lambda: _delta_form(t.mid_sum, t),
        (0, 0, 0, 1): lambda: np.einsum("jk,kl,...lm->...jm", k0, k0, kern),
        (0, 0, 1, 0): lambda: _delta_form(k0 @ t.pair_sum, t),
        (0, 1, 0, 0): lambda: _delta_form(t.pair_sum @ k0, t),
        (0, 1, 1, 1): lambda: np.einsum("...jk,kl,lm->...jm", kern, k0, k0),
        (0, 0, 0, 0): lambda: _delta_form(k0 @ k0 @ k0, t),
    }
    try:
        return forms[sig]()
    except KeyError:
        raise NumericalError(f"no chain form for pattern {sig}") from None


def _box_slice(full: np.ndarray, d: int, n: int, radius: int) -> np.ndarray:
    lo, hi = n // 2 - radius, n // 2 + radius + 1
    return full[(slice(lo, hi),) * d]


# ---------------------------------------------------------------------------
# series assembly


def _check_contrast(contrast: float, limit: float) -> float:
    c = float(contrast)
    if not 0.0 <= c < limit:
        raise ConfigError(f"contrast must lie in [0, {limit}), got {c}")
    return c


def series_term(model: MomentModel, contrast: float, order: int, d: int = 3,
                radius: int | None = None, resolution: int | None = None,
                limit: float = CONTRAST_LIMIT) -> MatrixKernel:
    """Single series term of the perturbative kernel (prefactor included).

    The order-n term is contrast * (-contrast)^n times the sum of
    coefficient-weighted constrained chains of n Helmholtz kernels.
    """
    validate_dimension(d)
    c = _check_contrast(contrast, limit)
    if not 1 <= order <= MAX_ORDER:
        raise ConfigError(f"series order must be in 1..{MAX_ORDER}")
    r = SERIES_RADIUS[d] if radius is None else int(radius)
    n = SERIES_RESOLUTION[d] if resolution is None else int(resolution)
    if 2 * r + 1 > n - 1:
        raise ConfigError(f"radius {r} too large for resolution {n}")
    t = _tables(d, n)
    box = np.zeros((2 * r + 1,) * d + (d, d))
    parts, coeffs = _chain_coefficients(model, order)
    for part, coef in zip(parts, coeffs):
        if abs(coef) < 1e-14:
            continue
        full = _form_array(_signature(part, order), t)
        box += coef * _box_slice(full, d, n, r)
    box *= c * (-c) ** order
    return MatrixKernel(box, r, {
        "kind": "series_term", "order": order, "model": model.name,
        "contrast": c, "resolution": n})


def perturbation_kernel(model: MomentModel, contrast: float, order: int = MAX_ORDER,
                        d: int = 3, radius: int | None = None,
                        resolution: int | None = None,
                        limit: float = CONTRAST_LIMIT) -> MatrixKernel:
    """Perturbative kernel through the given order, exactly symmetrized.

    Every term already satisfies K(-x)^T = K(x) analytically; the final
    averaging with the reflected transpose only removes float residue
    (its size is recorded in meta["asymmetry"]).  meta["term_scale"]
    records max|term_n| per order; the ratio of the last two is a
    truncation diagnostic.
    """
    validate_dimension(d)
    c = _check_contrast(contrast, limit)
    r = SERIES_RADIUS[d] if radius is None else int(radius)
    n = SERIES_RESOLUTION[d] if resolution is None else int(resolution)
    box = np.zeros((2 * r + 1,) * d + (d, d))
    scales = []
    for k in range(1, order + 1):
        term = series_term(model, c, k, d, r, n, limit).array
        scales.append(float(np.abs(term).max()))
        box += term
    refl = np.swapaxes(box[(slice(None, None, -1),) * d], -1, -2)
    asym = float(np.abs(box - refl).max())
    box = 0.5 * (box + refl)
    tail = scales[-1] / scales[0] if len(scales) > 1 and scales[0] > 0 else 0.0
    return MatrixKernel(box, r, {
        "kind": "perturbation", "model": model.name, "contrast": c,
        "order": order, "resolution": n, "asymmetry": asym,
        "term_scale": scales, "tail_ratio": tail})


# ---------------------------------------------------------------------------
# walk kernel and effective matrix


def walk_kernel(kernel: MatrixKernel) -> ScalarKernel:
    """Step distribution of the auxiliary walk attached to a kernel.

    T(x) = 1/2 at the origin, 1/(4d) on unit neighbors, plus
    (1/4d) sum_jk of the double-difference combination
    -K_jk(x) + K_jk(x - e_j) + K_jk(x + e_k) - K_jk(x - e_j + e_k),
    the unique placement making 4d(1 - T_hat(theta)) equal the symbol
    of the averaged operator exactly.  Support radius grows by one.
    """
    d = kernel.dim
    r = kernel.radius + 1
    side = 2 * r + 1
    out = np.zeros((side,) * d)
    center = (r,) * d
    out[center] += 0.5
    for ax in range(d):
        for step in (-1, 1):
            idx = list(center)
            idx[ax] += step
            out[tuple(idx)] += 1.0 / (4 * d)
    emb = np.zeros((side,) * d + (d, d))
    emb[(slice(1, -1),) * d] = kernel.array
    bracket = np.zeros((side,) * d)
    for j in range(d):
        for k in range(d):
            comp = emb[..., j, k]
            term = -comp
            term = term + np.roll(comp, 1, axis=j)
            term = term + np.roll(comp, -1, axis=k)
            term = term - np.roll(np.roll(comp, 1, axis=j), -1, axis=k)
            bracket += term
    out += bracket / (4 * d)
    # T is even because K(-x) = K(x)^T, but the j,k summation order is
    # not reflection-invariant in float arithmetic; restore evenness
    # bitwise so parity reductions downstream are exact.
    out = 0.5 * (out + out[(slice(None, None, -1),) * d])
    # The double-difference bracket telescopes to zero total mass, but
    # float summation order leaves an ulp-scale residue; push it into
    # the origin weight so the unit total holds bitwise.
    repair = 0.0
    for _ in range(4):
        residue = float(np.sum(out)) - 1.0
        if residue == 0.0:
            break
        out[center] -= residue
        repair += residue
    return ScalarKernel(out, r, {
        "kind": "walk", "mass_repair": repair,
        **{k: v for k, v in kernel.meta.items()
           if k in ("model", "contrast", "order", "resolution")}})


def homogenized_matrix(kernel: MatrixKernel | None, d: int | None = None) -> HomogenizedData:
    """Effective quadratic-form matrix Q = I + sum_x K(x) and normalizers.

    Raises NumericalError if Q fails to be positive definite (the
    contrast is then outside the usable range).
    """
    if kernel is None:
        if d is None:
            raise ConfigError("dimension required when no kernel is given")
        validate_dimension(d)
        eye = np.eye(d)
        return HomogenizedData(eye, 1.0, eye.copy(), 0.0, {"kind": "free"})
    d = kernel.dim
    q = np.eye(d) + kernel.total()
    q = 0.5 * (q + q.T)
    lam, vec = np.linalg.eigh(q)
    if lam.min() <= 0.0:
        raise NumericalError(f"effective matrix not positive definite: spectrum {lam}")
    sigma = float(np.exp(np.sum(np.log(lam)) / (2 * d)))
    inv_sqrt = (vec / np.sqrt(lam)) @ vec.T
    return HomogenizedData(q, sigma, inv_sqrt, float(kernel.meta.get("contrast", 0.0)),
                           {"kind": "homogenized", **{k: v for k, v in kernel.meta.items()
                                                      if k in ("model", "order", "resolution")}})


@dataclass(frozen=True)
class AperiodicityReport:
    origin_mass: float
    neighbor_min: float
    total: float
    mean_drift: float
    witnesses: tuple  # lattice points among {0, +-e_j} with mass <= 0

    @property
    def ok(self) -> bool:
        return not self.witnesses


def aperiodicity_check(walk: ScalarKernel) -> AperiodicityReport:
    """Positivity of the origin and nearest-neighbor masses.

    The walk is aperiodic when T(0) > 0 and T(+-e_j) > 0 for every
    axis; violating points are returned as witnesses.  Normalization
    and centering sums ride along as diagnostics.
    """
    d = walk.dim
    witnesses = []
    origin = float(walk.at((0,) * d))
    if origin <= 0.0:
        witnesses.append((0,) * d)
    neigh = []
    for ax in range(d):
        for step in (-1, 1):
            x = [0] * d
            x[ax] = step
            mass = float(walk.at(x))
            neigh.append(mass)
            if mass <= 0.0:
                witnesses.append(tuple(x))
    pts, vals = walk.points_values()
    drift = float(np.abs(vals @ pts.astype(float)).max())
    return AperiodicityReport(origin, float(min(neigh)),
                              walk.total(), drift, tuple(witnesses))


def second_moment_matrix(walk: ScalarKernel) -> np.ndarray:
    """sum_x T(x) x x^T (equals Q/(2d) for walk kernels built here)."""
    pts, vals = walk.points_values()
    return np.einsum("i,ij,ik->jk", vals, pts.astype(float), pts.astype(float))


def moment_summability(walk: ScalarKernel, extra_order: int | None = None) -> float:
    """Weighted tail mass sum |T(x)| |x|^(2+m) (log factor in d = 4).

    m defaults to the expansion depth for the kernel's dimension; for
    d = 4 the weight carries the logarithmic factor required there.
    """
    d = walk.dim
    if extra_order is None:
        from .asymptotics import expansion_depth
        extra_order = expansion_depth(d)
    pts, vals = walk.points_values()
    rr = np.sqrt(np.sum(pts.astype(float) ** 2, axis=1))
    keep = rr > 0
    w = rr[keep] ** (2 + extra_order)
    if d == 4:
        w = w * np.log(np.maximum(rr[keep], 1.0))
    return float(np.sum(np.abs(vals[keep]) * w))


@dataclass(frozen=True)
class ScanRow:
    contrast: float
    min_value: float
    argmin: tuple
    origin_mass: float
    neighbor_min: float
    total: float

    @property
    def negative(self) -> bool:
        return self.min_value < 0.0


def positivity_scan(model: MomentModel, contrasts, order: int = MAX_ORDER,
                    d: int = 3, radius: int | None = None,
                    resolution: int | None = None,
                    scan_radius: int | None = None) -> list:
    """Minimum of the walk kernel across a contrast sweep.

    Positivity of every entry is an aperiodicity-style property the
    perturbative construction does not guarantee; the scan records
    where (if anywhere) it fails, restricted to the sup-norm ball of
    scan_radius when given (full truncated support otherwise).
    """
    rows = []
    for c in sorted(float(x) for x in contrasts):
        kern = perturbation_kernel(model, c, order, d, radius, resolution)
        walk = walk_kernel(kern)
        rep = aperiodicity_check(walk)
        arr = walk.array
        offset = 0
        if scan_radius is not None and scan_radius < walk.radius:
            lo = walk.radius - scan_radius
            arr = arr[(slice(lo, lo + 2 * scan_radius + 1),) * d]
            offset = lo
        idx = np.unravel_index(int(np.argmin(arr)), arr.shape)
        argmin = tuple(int(i) + offset - walk.radius for i in idx)
        rows.append(ScanRow(c, float(arr.min()), argmin,
                            rep.origin_mass, rep.neighbor_min, rep.total))
    return rows
