"""Flat key = value run configuration with lossless round-trips.

A run is described by one human-editable file of ``key = value`` lines
(``#`` starts a comment).  Every command resolves its defaults into the
JSON manifest it writes next to its outputs, so a finished run never
depends on implicit defaults and can be repeated bit-identically from
the manifest alone; ``--config`` accepts either format.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

from .errors import ConfigError

__all__ = ["RunConfig", "config_to_text", "load_run_input", "manifest_text",
           "parse_config_text", "resolve_out"]

OUT_ENV = "ANNGF_OUT"

# keys that must be stated explicitly in a config file
_REQUIRED = ("d",)


@dataclass(frozen=True)
class RunConfig:
    """Resolved parameters shared by the command-line entry points."""

    d: int
    contrast: float = 0.0
    law: str = "rademacher"
    order: int = 3
    radius: int = 8
    resolution: int = 0  # kernel-series grid, 0 = automatic
    quad_resolution: int = 0  # quadrature grid per axis, 0 = per-d default
    dyadic_depth: int = 6
    box: int = 33
    boundary: str = "dirichlet"
    samples: int = 200
    seed: int = 0
    workers: int = 1
    tol: float = 1e-10
    out: str = ""

    def __post_init__(self):
        if self.law not in ("rademacher", "uniform", "two_point"):
            raise ConfigError(f"unknown law {self.law!r}")
        if self.boundary not in ("dirichlet", "periodic"):
            raise ConfigError(f"unknown boundary {self.boundary!r}")
        if not 0.0 <= self.contrast < 1.0:
            raise ConfigError("contrast must lie in [0, 1)")
        if self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _convert(key: str, raw: str):
    kind = _FIELDS[key].type
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "'\"":
            return raw[1:-1]
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def _from_mapping(data: dict) -> RunConfig:
    unknown = sorted(set(data) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = [k for k in _REQUIRED if k not in data]
    if missing:
        raise ConfigError(f"missing required config field: {', '.join(missing)}")
    values = {}
    for key, raw in data.items():
        if isinstance(raw, str):
            values[key] = _convert(key, raw)
        else:
            kind = _FIELDS[key].type
            values[key] = int(raw) if kind == "int" else float(raw)
    return RunConfig(**values)


def parse_config_text(text: str) -> RunConfig:
    """Parse key = value lines (or a JSON manifest) into a RunConfig."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        payload = json.loads(text)
        base = payload.get("config", payload)
        return _from_mapping({k: v for k, v in base.items()})
    data = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key = value, got {body!r}")
        key, _, raw = body.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in data:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        data[key] = raw
    missing = [k for k in _REQUIRED if k not in data]
    if missing:
        raise ConfigError(f"missing required config field: {', '.join(missing)}")
    return RunConfig(**{k: _convert(k, v) for k, v in data.items()})


def config_to_text(cfg: RunConfig) -> str:
    """Render every field, resolved; parse(config_to_text(c)) == c."""
    lines = []
    for f in dataclasses.fields(RunConfig):
        value = getattr(cfg, f.name)
        rendered = value if isinstance(value, str) else repr(value)
        lines.append(f"{f.name} = {rendered}")
    return "\n".join(lines) + "\n"


def load_run_input(path: str) -> tuple[RunConfig, dict]:
    """Read a config or manifest file; extras are the manifest's own keys."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg = parse_config_text(text)
    extras = {}
    if text.lstrip().startswith("{"):
        payload = json.loads(text)
        extras = {k: v for k, v in payload.items() if k != "config"}
    return cfg, extras


def resolve_out(cfg: RunConfig) -> str:
    """Output directory: explicit config, else environment, else cwd."""
    return cfg.out or os.environ.get(OUT_ENV, "") or "."


def manifest_text(command: str, cfg: RunConfig, extras: dict | None = None) -> str:
    """JSON manifest with the fully resolved configuration echoed back."""
    payload = {"command": command, "config": dataclasses.asdict(cfg)}
    for key, value in (extras or {}).items():
        payload[key] = value
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
