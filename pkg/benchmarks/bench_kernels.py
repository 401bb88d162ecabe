"""Time the hot operator apply and a full box solve on both backends.

Run from the repository root:

    python3 benchmarks/bench_kernels.py --box 33 --repeats 50
"""

import argparse
import time

import numpy as np

from anngf.backend import HAS_NUMBA, use_backend
from anngf.montecarlo import box_problem, sample_field, solve_box
from anngf.stencil import apply_operator


def time_call(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--box", type=int, default=33)
    ap.add_argument("--repeats", type=int, default=50)
    args = ap.parse_args()

    sample = sample_field("rademacher", args.box, 3, 2024, 0)
    a = 1.0 + 0.15 * sample.values
    u = np.random.default_rng(1).standard_normal(a.shape)
    problem = box_problem(sample, 0.15, boundary="periodic")

    rows = []
    outputs = {}
    for backend in ("numpy", "numba"):
        with use_backend(backend):
            apply_operator(u, a, "periodic")  # warm the JIT cache
            t_apply = time_call(lambda: apply_operator(u, a, "periodic"),
                                args.repeats)
            outputs[backend] = apply_operator(u, a, "periodic")
            t_solve = time_call(lambda: solve_box(problem),
                                max(3, args.repeats // 10))
        rows.append((backend, t_apply, t_solve))

    if not HAS_NUMBA:
        print("numba unavailable: both rows use the numpy path")
    print(f"box {args.box}^3, contrast 0.15, periodic")
    print(f"{'backend':<8} {'apply (ms)':>12} {'solve (ms)':>12}")
    for backend, t_apply, t_solve in rows:
        print(f"{backend:<8} {t_apply * 1e3:>12.3f} {t_solve * 1e3:>12.3f}")
    base, fast = rows[0], rows[1]
    print(f"speedup: apply x{base[1] / fast[1]:.1f}, "
          f"solve x{base[2] / fast[2]:.1f}")
    same = np.array_equal(outputs["numpy"], outputs["numba"])
    print(f"backends agree bitwise: {same}")
    if not same:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
