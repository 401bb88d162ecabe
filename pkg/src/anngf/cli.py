"""Command line entry points.

Subcommands
-----------
kernel       build the perturbative kernel and write it as CSV + sidecar
green        evaluate the annealed Green function at lattice points
mc           Monte Carlo estimates (pointwise values or the quadratic form)
asymptotics  ray fits of the residual after leading-order subtraction
tscan        contrast sweep of walk-kernel positivity and aperiodicity
verify       run an acceptance suite and report one line per criterion

Every run writes ``run_manifest.json`` next to its data files; passing a
manifest back through ``--config`` reproduces the run (data files are
byte-identical; only the recorded wall time of ``mc`` may differ).

Exit codes: 0 success, 1 failed verification, 2 configuration error,
3 numerical failure, 4 iteration did not converge.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

import numpy as np

from .asymptotics import (calibrate_leading, default_rays, leading_term,
                          make_ray_probe, residual_fit)
from .config import RunConfig, load_run_input, manifest_text, resolve_out
from .containers import kernel_sidecar, matrix_kernel_to_csv
from .errors import ConfigError, ConvergenceError, NumericalError
from .montecarlo import estimate_annealed_green, estimate_kdelta_form
from .perturbation import homogenized_matrix, moment_model, perturbation_kernel, positivity_scan
from .quadrature import DEFAULT_RESOLUTION, GreenEvaluator, QuadratureConfig

DEFAULT_POINTS = {
    3: ((4, 0, 0), (0, 5, 0), (2, 2, 2), (3, 1, 0), (6, 0, 0)),
    4: ((4, 0, 0, 0), (0, 5, 0, 0), (2, 2, 2, 0), (3, 1, 0, 0), (6, 0, 0, 0)),
    5: ((4, 0, 0, 0, 0), (0, 5, 0, 0, 0), (2, 2, 2, 0, 0), (3, 1, 0, 0, 0),
        (6, 0, 0, 0, 0)),
}
DEFAULT_FREQS = {
    3: ((1, 0, 0), (2, 0, 0), (1, 1, 0), (2, 1, 0), (3, 1, 1), (4, 0, 0),
        (2, 2, 2), (5, 1, 0)),
    4: ((1, 0, 0, 0), (2, 0, 0, 0), (1, 1, 0, 0), (2, 1, 0, 0), (3, 1, 1, 0),
        (4, 0, 0, 0), (2, 2, 2, 0), (5, 1, 0, 0)),
    5: ((1, 0, 0, 0, 0), (2, 0, 0, 0, 0), (1, 1, 0, 0, 0), (2, 1, 0, 0, 0),
        (3, 1, 1, 0, 0), (4, 0, 0, 0, 0), (2, 2, 2, 0, 0), (5, 1, 0, 0, 0)),
}
DEFAULT_CONTRASTS = "0.01:0.2:0.01"
ASYMPTOTIC_RADII = (8, 12, 16, 24, 32)
TSCAN_RADIUS = 6


def _fmt(v) -> str:
    return repr(float(v))


def _parse_vector(text: str, d: int, name: str) -> tuple:
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != d:
        raise ConfigError(f"{name} needs {d} comma-separated integers, got {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{name} must be integers, got {text!r}") from None


def _vector_list(flags, extras, key: str, cfg: RunConfig, fallback) -> tuple:
    """Points/frequencies: CLI flags win, then manifest extras, then defaults."""
    if flags:
        return tuple(_parse_vector(t, cfg.d, key) for t in flags)
    stored = extras.get(key)
    if stored is not None:
        return tuple(_parse_vector(",".join(str(c) for c in v), cfg.d, key)
                     for v in stored)
    return fallback[cfg.d]


def _parse_contrasts(text: str) -> tuple:
    """Either "start:stop:step" or a comma-separated list of values."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"contrast range must be start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"bad contrast range {text!r}") from None
        if step <= 0 or stop < start:
            raise ConfigError(f"bad contrast range {text!r}")
        count = int(round((stop - start) / step)) + 1
        return tuple(round(start + i * step, 12) for i in range(count))
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise ConfigError(f"bad contrast list {text!r}") from None


def _quad_config(cfg: RunConfig, points) -> QuadratureConfig:
    """Resolution from the config, or auto-doubled until the points fit."""
    if cfg.quad_resolution:
        return QuadratureConfig(resolution=cfg.quad_resolution)
    n = DEFAULT_RESOLUTION[cfg.d]
    reach = max((max(abs(int(c)) for c in p) for p in points), default=0)
    while n < 2 * reach + 2:
        n *= 2
    return QuadratureConfig(resolution=n)


def _series_kernel(cfg: RunConfig):
    if cfg.contrast == 0.0:
        return None
    return perturbation_kernel(moment_model(cfg.law), cfg.contrast, cfg.order,
                               cfg.d, cfg.radius or None, cfg.resolution or None)


def _write_outputs(out: Path, command: str, cfg: RunConfig, extras: dict,
                   files: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text)
    (out / "run_manifest.json").write_text(manifest_text(command, cfg, extras))


# ---------------------------------------------------------------------------
# subcommands


def cmd_kernel(cfg: RunConfig, extras: dict, args) -> int:
    kern = _series_kernel(cfg)
    if kern is None:
        header = ",".join(f"x{j}" for j in range(cfg.d)) + ",row,col,value\n"
        csv = header
        side = json.dumps({"contrast": 0.0, "dim": cfg.d, "kind": "perturbation",
                           "model": cfg.law, "order": cfg.order},
                          sort_keys=True, indent=2) + "\n"
    else:
        csv = matrix_kernel_to_csv(kern)
        doc = json.loads(kernel_sidecar(kern))
        hom = homogenized_matrix(kern)
        doc["effective_matrix"] = [[_fmt(v) for v in row] for row in hom.matrix]
        doc["effective_sigma"] = _fmt(hom.sigma)
        side = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    _write_outputs(Path(resolve_out(cfg)), "kernel", cfg, {},
                   {"kdelta_kernel.csv": csv, "kdelta_kernel.json": side})
    return 0


def cmd_green(cfg: RunConfig, extras: dict, args) -> int:
    points = _vector_list(args.point, extras, "points", cfg, DEFAULT_POINTS)
    dyadic = bool(args.dyadic or extras.get("dyadic", False))
    ev = GreenEvaluator(_series_kernel(cfg), cfg.d, _quad_config(cfg, points))
    values = ev.green(points)
    head = ",".join(f"x{j}" for j in range(cfg.d))
    lines = [head + ",value"]
    for p, v in zip(points, values):
        lines.append(",".join(str(c) for c in p) + f",{_fmt(v)}")
    files = {"green_values.csv": "\n".join(lines) + "\n"}
    if dyadic:
        rows = ["point,level,scale,magnitude"]
        for p in points:
            if all(c == 0 for c in p):
                continue
            rep = ev.dyadic_probe(p)
            tag = " ".join(str(c) for c in p)
            for level, val in enumerate(rep.shells, start=1):
                rows.append(f"{tag},{level},{_fmt(rep.cutoff * 2.0 ** -level)},"
                            f"{_fmt(abs(val))}")
        files["dyadic_probes.csv"] = "\n".join(rows) + "\n"
    new_extras = {"points": [list(p) for p in points], "dyadic": dyadic}
    _write_outputs(Path(resolve_out(cfg)), "green", cfg, new_extras, files)
    return 0


def cmd_mc(cfg: RunConfig, extras: dict, args) -> int:
    mode = args.mode or extras.get("mode", "green")
    if mode not in ("green", "form"):
        raise ConfigError(f"mc mode must be green or form, got {mode!r}")
    start = time.monotonic()
    if mode == "green":
        points = _vector_list(args.point, extras, "points", cfg, DEFAULT_POINTS)
        est = estimate_annealed_green(
            cfg.law, cfg.contrast, cfg.box, points, cfg.samples, cfg.seed,
            d=cfg.d, boundary=cfg.boundary, tol=cfg.tol, workers=cfg.workers)
        head = ",".join(f"x{j}" for j in range(cfg.d))
        lines = [head + ",mean,stderr,n"]
        for p in points:
            r = est[p]
            lines.append(",".join(str(c) for c in p)
                         + f",{_fmt(r.mean)},{_fmt(r.stderr)},{r.n}")
        files = {"mc_green.csv": "\n".join(lines) + "\n"}
        new_extras = {"mode": mode, "points": [list(p) for p in points]}
    else:
        freqs = _vector_list(args.freq, extras, "freqs", cfg, DEFAULT_FREQS)
        est = estimate_kdelta_form(cfg.law, cfg.contrast, cfg.box, freqs,
                                   cfg.samples, cfg.seed, d=cfg.d, tol=cfg.tol,
                                   workers=cfg.workers)
        head = ",".join(f"k{j}" for j in range(cfg.d))
        lines = [head + ",mean,stderr,imag,imag_stderr,indeterminate,n"]
        for f in freqs:
            r = est[f]
            lines.append(",".join(str(c) for c in f)
                         + f",{_fmt(r.mean)},{_fmt(r.stderr)},{_fmt(r.imag)}"
                         + f",{_fmt(r.imag_stderr)},{int(r.indeterminate)},{r.n}")
        files = {"mc_form.csv": "\n".join(lines) + "\n"}
        new_extras = {"mode": mode, "freqs": [list(f) for f in freqs]}
    new_extras["wall_time_s"] = round(time.monotonic() - start, 3)
    _write_outputs(Path(resolve_out(cfg)), "mc", cfg, new_extras, files)
    return 0


def cmd_asymptotics(cfg: RunConfig, extras: dict, args) -> int:
    kern = _series_kernel(cfg)
    hom = homogenized_matrix(kern, cfg.d)
    calib = calibrate_leading(cfg.d)
    terms = [leading_term(hom, calib.factor)]
    radii = tuple(extras.get("radii", ASYMPTOTIC_RADII))
    quad = _quad_config(cfg, [tuple(r * np.array(u)) for u in default_rays(cfg.d)
                              for r in radii])
    ev = GreenEvaluator(kern, cfg.d, quad)
    rays = []
    for direction in default_rays(cfg.d):
        probe = make_ray_probe(direction, radii, ev.green)
        fit = residual_fit(probe, terms, hom)
        rays.append({"direction": list(direction),
                     "exponent": fit.exponent, "amplitude": fit.amplitude,
                     "rms": fit.rms})
    report = {"d": cfg.d, "delta": cfg.contrast, "model": cfg.law,
              "calibration": calib.constant, "calibration_factor": calib.factor,
              "rays": rays}
    files = {"expansion_report.json": json.dumps(report, sort_keys=True,
                                                 indent=2) + "\n"}
    _write_outputs(Path(resolve_out(cfg)), "asymptotics", cfg,
                   {"radii": list(radii)}, files)
    return 0


def cmd_tscan(cfg: RunConfig, extras: dict, args) -> int:
    if args.contrasts:
        contrasts = _parse_contrasts(args.contrasts)
    elif "contrasts" in extras:
        contrasts = tuple(float(c) for c in extras["contrasts"])
    else:
        contrasts = _parse_contrasts(DEFAULT_CONTRASTS)
    rows = positivity_scan(moment_model(cfg.law), contrasts, cfg.order, cfg.d,
                           cfg.radius or None, cfg.resolution or None,
                           scan_radius=TSCAN_RADIUS)
    head = ("contrast,min_value,"
            + ",".join(f"arg{j}" for j in range(cfg.d))
            + ",origin_mass,neighbor_min,total")
    lines = [head]
    for r in rows:
        lines.append(f"{_fmt(r.contrast)},{_fmt(r.min_value)},"
                     + ",".join(str(c) for c in r.argmin)
                     + f",{_fmt(r.origin_mass)},{_fmt(r.neighbor_min)},{_fmt(r.total)}")
    _write_outputs(Path(resolve_out(cfg)), "tscan", cfg,
                   {"contrasts": [float(c) for c in contrasts],
                    "scan_radius": TSCAN_RADIUS},
                   {"tscan.csv": "\n".join(lines) + "\n"})
    return 0


def cmd_verify(cfg: RunConfig, extras: dict, args) -> int:
    from . import verify as verify_mod

    suite = args.suite or extras.get("suite", "all")
    results = verify_mod.run_suites(suite, cfg)
    for r in results:
        print(verify_mod.format_line(r))
    out = Path(resolve_out(cfg))
    out.mkdir(parents=True, exist_ok=True)
    (out / "verify_report.json").write_text(verify_mod.report_text(suite, results))
    return 0 if all(r.passed for r in results) else 1


COMMANDS = {
    "kernel": cmd_kernel,
    "green": cmd_green,
    "mc": cmd_mc,
    "asymptotics": cmd_asymptotics,
    "tscan": cmd_tscan,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anngf",
        description="Annealed Green function toolkit: kernels, quadrature, "
                    "sampling, and acceptance checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", default=None, required=config_required,
                       help="run configuration (key=value lines or a manifest)")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="master seed")
        p.add_argument("--workers", type=int, default=None,
                       help="sampling worker processes")

    common(sub.add_parser("kernel", help="write the perturbative kernel"))
    green = sub.add_parser("green", help="annealed Green function values")
    common(green)
    green.add_argument("--point", action="append", default=None,
                       metavar="X1,...,XD", help="evaluation point (repeatable)")
    green.add_argument("--dyadic", action="store_true",
                       help="also write dyadic shell probes")
    mc = sub.add_parser("mc", help="Monte Carlo estimates")
    common(mc)
    mc.add_argument("--mode", choices=("green", "form"), default=None)
    mc.add_argument("--point", action="append", default=None,
                    metavar="X1,...,XD", help="lattice point (repeatable)")
    mc.add_argument("--freq", action="append", default=None,
                    metavar="K1,...,KD", help="integer wave index (repeatable)")
    common(sub.add_parser("asymptotics", help="residual ray fits"))
    tscan = sub.add_parser("tscan", help="contrast sweep of kernel positivity")
    common(tscan)
    tscan.add_argument("--contrasts", default=None,
                       help="start:stop:step or comma list")
    ver = sub.add_parser("verify", help="run an acceptance suite")
    common(ver, config_required=False)
    ver.add_argument("--suite", default=None,
                     help="structural, quadrature, expansion, oracle, or all")
    return parser


def _load(args) -> tuple:
    if args.config is None:
        cfg, extras = RunConfig(d=3), {}
    else:
        cfg, extras = load_run_input(args.config)
    overrides = {}
    if args.out is not None:
        overrides["out"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    return cfg, extras


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, extras = _load(args)
        return COMMANDS[args.command](cfg, extras, args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return 4
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
