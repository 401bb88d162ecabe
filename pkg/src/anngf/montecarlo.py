"""Monte Carlo oracle: sample fields, solve finite boxes, average.

Every estimator here is independent of the series construction: a
coefficient field is drawn per sample, the divergence-form system is
solved matrix-free by conjugate gradients, and sample statistics of the
solution (point values, finite differences, or discrete-frequency
transforms) are reduced in sample-index order.  Per-sample streams are
derived from (master seed, sample index) alone, so results are
bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ConvergenceError
from .lattice import LatticeField, validate_dimension
from .quadrature import _difference_stencil
from .stencil import apply_operator

__all__ = [
    "LAWS",
    "BoxProblem",
    "EstimatorResult",
    "FieldSample",
    "FormEstimate",
    "SolveResult",
    "box_problem",
    "estimate_annealed_green",
    "estimate_derivative",
    "estimate_kdelta_form",
    "sample_field",
    "solve_box",
]

LAWS = ("rademacher", "uniform", "two_point")

# P(sigma = 1) for the asymmetric two-point law before rescaling; the
# negative atom -p/(1-p) is rescaled into [-1, 1], leaving atoms
# {3/7, -1} with mean zero and a nonzero third moment.
_TWO_POINT_P = 0.7


@dataclass(frozen=True)
class FieldSample:
    """One realization of the i.i.d. site field on a box."""

    law: str
    box: int
    dim: int
    master_seed: int
    index: int
    values: np.ndarray  # shape (box,) * dim, entries in [-1, 1]


def _law_draw(law: str, rng: np.random.Generator, shape) -> np.ndarray:
    if law == "rademacher":
        return rng.integers(0, 2, size=shape).astype(float) * 2.0 - 1.0
    if law == "uniform":
        return rng.uniform(-1.0, 1.0, size=shape)
    if law == "two_point":
        p = _TWO_POINT_P
        hi = (1.0 - p) / p  # 3/7 after rescaling the unit atom
        return np.where(rng.random(size=shape) < p, hi, -1.0)
    raise ConfigError(f"unknown law {law!r}; choose from {LAWS}")


def sample_field(law: str, box: int, d: int, master_seed: int,
                 index: int) -> FieldSample:
    """Draw the i.i.d. field for one sample, reproducibly.

    The stream is derived from (master seed, index) by seed-sequence
    spawning, never sequentially, so any subset of indices can be drawn
    in any order or process and still match bit for bit.
    """
    validate_dimension(d)
    if box < 3:
        raise ConfigError("box extent must be at least 3")
    seq = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    rng = np.random.default_rng(seq)
    values = _law_draw(law, rng, (int(box),) * d)
    return FieldSample(law, int(box), d, int(master_seed), int(index), values)


@dataclass(frozen=True)
class BoxProblem:
    """Finite-box system L u = rhs for one field realization."""

    sample: FieldSample
    contrast: float
    boundary: str  # "periodic" or "dirichlet"
    source: tuple  # grid index of the point source

    def coefficients(self) -> np.ndarray:
        return 1.0 + self.contrast * self.sample.values

    def rhs(self) -> np.ndarray:
        out = np.zeros_like(self.sample.values)
        out[self.source] = 1.0
        if self.boundary == "periodic":
            out -= 1.0 / out.size  # mean-corrected so the system is solvable
        return out


def box_problem(sample: FieldSample, contrast: float, boundary: str = "dirichlet",
                source=None) -> BoxProblem:
    """Assemble a box system with the conventional source placement."""
    if not 0.0 <= contrast < 1.0:
        raise ConfigError("contrast must lie in [0, 1) for uniform ellipticity")
    if boundary not in ("periodic", "dirichlet"):
        raise ConfigError(f"unknown boundary {boundary!r}")
    d, box = sample.dim, sample.box
    if source is None:
        if boundary == "dirichlet":
            if box % 2 == 0:
                raise ConfigError("dirichlet boxes must have odd extent")
            source = ((box - 1) // 2,) * d
        else:
            source = (0,) * d
    source = tuple(int(s) % box for s in source)
    return BoxProblem(sample, float(contrast), boundary, source)


@dataclass(frozen=True)
class SolveResult:
    field: LatticeField
    iterations: int
    relative_residual: float


def _cg(matvec, b: np.ndarray, tol: float, cap: int):
    """Plain conjugate gradients from zero, relative-residual stop."""
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = float(np.dot(r.ravel(), r.ravel()))
    bnorm = math.sqrt(rs)
    if bnorm == 0.0:
        return x, 0, 0.0
    for it in range(cap):
        if math.sqrt(rs) <= tol * bnorm:
            return x, it, math.sqrt(rs) / bnorm
        ap = matvec(p)
        alpha = rs / float(np.dot(p.ravel(), ap.ravel()))
        x += alpha * p
        r -= alpha * ap
        rs_next = float(np.dot(r.ravel(), r.ravel()))
        p = r + (rs_next / rs) * p
        rs = rs_next
    raise ConvergenceError(
        f"conjugate gradients exceeded {cap} iterations "
        f"(relative residual {math.sqrt(rs) / bnorm:.3e})")


def solve_box(problem: BoxProblem, tol: float = 1e-10,
              cap: int | None = None) -> SolveResult:
    """Matrix-free conjugate-gradient solve of the box system.

    The operator application uses only the forward/adjoint difference
    stencil and the site coefficient field.  The iteration cap defaults
    to 10 box^1.5, generous for a uniformly elliptic system.
    """
    a = problem.coefficients()
    rule = "periodic" if problem.boundary == "periodic" else "zero"
    if cap is None:
        cap = int(10 * problem.sample.box ** 1.5)
    x, iterations, rel = _cg(lambda u: apply_operator(u, a, rule),
                             problem.rhs(), tol, cap)
    field = LatticeField(x, offset=tuple(-s for s in problem.source),
                         boundary=rule)
    return SolveResult(field, iterations, rel)


# ---------------------------------------------------------------------------
# estimators


@dataclass(frozen=True)
class EstimatorResult:
    """Sample mean with its standard error."""

    mean: float
    stderr: float
    n: int


@dataclass(frozen=True)
class FormEstimate:
    """Quadratic-form estimate at one frequency, with reality diagnostics."""

    mean: float  # real part of 1/transform_mean - |v|^2
    stderr: float
    n: int
    imag: float
    imag_stderr: float
    indeterminate: bool  # transform mean statistically indistinguishable from 0


def _point_columns(box: int, d: int, source, offsets, alpha, boundary):
    """Flat-index gather lists: value columns as sums of grid entries."""
    stencil = _difference_stencil(tuple(alpha)) if alpha is not None else [
        ((0,) * d, 1.0)]
    margin_need = max(abs(int(b)) for beta, _ in stencil for b in beta)
    cols = []
    half = (box - 1) // 2
    for x in offsets:
        x = tuple(int(c) for c in x)
        if len(x) != d:
            raise ConfigError("point dimension mismatch")
        reach = max(abs(c) for c in x) + margin_need if x else margin_need
        if boundary == "dirichlet":
            # margin >= box/4 from the boundary keeps the cutoff bias down
            if half - reach < box / 4.0:
                raise ConfigError(
                    f"point {x} too close to the boundary for box {box}")
        elif reach > half:
            raise ConfigError(f"point {x} outside the unambiguous range")
        idx, coef = [], []
        for beta, c in stencil:
            site = tuple((s + xc + bc) % box for s, xc, bc in zip(source, x, beta))
            idx.append(int(np.ravel_multi_index(site, (box,) * d)))
            coef.append(float(c))
        cols.append((np.array(idx), np.array(coef)))
    return cols


def _run_point_chunk(task: dict, indices) -> tuple:
    rows = np.empty((len(indices), len(task["cols"])), dtype=float)
    for row, index in enumerate(indices):
        sample = sample_field(task["law"], task["box"], task["d"],
                              task["seed"], int(index))
        problem = box_problem(sample, task["contrast"], task["boundary"],
                              task["source"])
        g = solve_box(problem, task["tol"]).field.values.ravel()
        for k, (idx, coef) in enumerate(task["cols"]):
            rows[row, k] = float(np.dot(g[idx], coef))
    return list(indices), rows


def _run_form_chunk(task: dict, indices) -> tuple:
    freq_idx = task["freq_idx"]
    rows = np.empty((len(indices), len(freq_idx)), dtype=complex)
    for row, index in enumerate(indices):
        sample = sample_field(task["law"], task["box"], task["d"],
                              task["seed"], int(index))
        problem = box_problem(sample, task["contrast"], "periodic", None)
        g = solve_box(problem, task["tol"]).field.values
        ghat = np.fft.fftn(g).ravel()
        rows[row] = ghat[freq_idx]
    return list(indices), rows


_CHUNK_RUNNERS = {"point": _run_point_chunk, "form": _run_form_chunk}


def _gather(kind: str, task: dict, n: int, workers: int, width: int,
            dtype) -> np.ndarray:
    """All per-sample rows, assembled in sample-index order.

    The reduction over the assembled array is identical however the
    indices were split across workers, which is what makes every
    estimate worker-count independent.
    """
    if n < 1:
        raise ConfigError("need at least one sample")
    runner = _CHUNK_RUNNERS[kind]
    rows = np.empty((n, width), dtype=dtype)
    if workers <= 1:
        idx, vals = runner(task, list(range(n)))
        rows[idx] = vals
        return rows
    chunks = [list(c) for c in np.array_split(np.arange(n), workers) if c.size]
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        for idx, vals in pool.map(runner, [task] * len(chunks), chunks):
            rows[idx] = vals
    return rows


def estimate_annealed_green(law: str, contrast: float, box: int, points,
                            n: int, master_seed: int, d: int = 3,
                            boundary: str = "dirichlet", tol: float = 1e-10,
                            workers: int = 1) -> dict:
    """Sample mean and stderr of the Green's function at source-relative points."""
    return estimate_derivative(law, contrast, box, points, n, master_seed,
                               alpha=None, d=d, boundary=boundary, tol=tol,
                               workers=workers)


def estimate_derivative(law: str, contrast: float, box: int, points, n: int,
                        master_seed: int, alpha=None, d: int = 3,
                        boundary: str = "dirichlet", tol: float = 1e-10,
                        workers: int = 1) -> dict:
    """Per-sample finite differences of the box solution, then averaged.

    alpha=None (or all zeros) reduces to the plain point estimate.
    """
    validate_dimension(d)
    if boundary not in ("periodic", "dirichlet"):
        raise ConfigError(f"unknown boundary {boundary!r}")
    if boundary == "dirichlet" and box % 2 == 0:
        raise ConfigError("dirichlet boxes must have odd extent")
    source = ((box - 1) // 2,) * d if boundary == "dirichlet" else (0,) * d
    points = [tuple(int(c) for c in x) for x in points]
    if alpha is not None:
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != d or any(a < 0 for a in alpha):
            raise ConfigError("alpha must be a nonnegative multi-index")
    cols = _point_columns(box, d, source, points, alpha, boundary)
    task = {"law": law, "contrast": float(contrast), "box": int(box), "d": d,
            "seed": int(master_seed), "boundary": boundary, "source": source,
            "tol": float(tol), "cols": cols}
    rows = _gather("point", task, int(n), int(workers), len(cols), float)
    out = {}
    for k, x in enumerate(points):
        col = rows[:, k]
        stderr = float(np.std(col, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        out[x] = EstimatorResult(float(np.mean(col)), stderr, int(n))
    return out


def estimate_kdelta_form(law: str, contrast: float, box: int, freqs, n: int,
                         master_seed: int, d: int = 3, tol: float = 1e-10,
                         workers: int = 1) -> dict:
    """Quadratic form of the series kernel from periodic-box statistics.

    At each box-commensurate frequency the sample mean of the solution
    transform estimates the reciprocal symbol, so 1/mean - |v|^2 targets
    <v, K_hat v>.  The standard error propagates the (Re, Im) covariance
    of the transform mean through the reciprocal.
    """
    validate_dimension(d)
    box = int(box)
    freqs = [tuple(int(k) for k in f) for f in freqs]
    freq_idx = []
    for f in freqs:
        if len(f) != d:
            raise ConfigError("frequency dimension mismatch")
        if all(k % box == 0 for k in f):
            raise ConfigError("zero frequency carries no form information")
        freq_idx.append(int(np.ravel_multi_index(
            tuple(k % box for k in f), (box,) * d)))
    task = {"law": law, "contrast": float(contrast), "box": box, "d": d,
            "seed": int(master_seed), "tol": float(tol),
            "freq_idx": np.array(freq_idx)}
    rows = _gather("form", task, int(n), int(workers), len(freqs), complex)
    out = {}
    for k, f in enumerate(freqs):
        col = rows[:, k]
        mean = complex(np.mean(col))
        if n > 1:
            cov = np.cov(np.stack([col.real, col.imag]), ddof=1) / n
        else:
            cov = np.zeros((2, 2))
        mean_err = math.sqrt(max(cov[0, 0] + cov[1, 1], 0.0))
        indeterminate = abs(mean) <= 3.0 * mean_err
        theta = 2.0 * math.pi * np.array(f, dtype=float) / box
        v2 = float(np.sum(np.abs(np.exp(1j * theta) - 1.0) ** 2))
        if indeterminate:
            out[f] = FormEstimate(float("nan"), float("inf"), int(n),
                                  float("nan"), float("inf"), True)
            continue
        est = 1.0 / mean - v2
        w = -1.0 / mean ** 2  # derivative of the reciprocal at the mean
        grad_re = np.array([w.real, -w.imag])
        grad_im = np.array([w.imag, w.real])
        stderr = math.sqrt(max(grad_re @ cov @ grad_re, 0.0))
        imag_err = math.sqrt(max(grad_im @ cov @ grad_im, 0.0))
        out[f] = FormEstimate(float(est.real), float(stderr), int(n),
                              float(est.imag), float(imag_err), False)
    return out
