import json

import pytest

from anngf.config import (RunConfig, config_to_text, load_run_input,
                          manifest_text, parse_config_text, resolve_out)
from anngf.errors import ConfigError


def test_text_round_trip():
    cfg = RunConfig(d=3, contrast=0.15, law="two_point", box=17,
                    samples=500, seed=42, out="results")
    assert parse_config_text(config_to_text(cfg)) == cfg


def test_manifest_round_trip():
    cfg = RunConfig(d=4, contrast=0.05, boundary="periodic", tol=1e-8)
    text = manifest_text("green", cfg, {"points": [[1, 0, 0, 0]]})
    assert parse_config_text(text) == cfg
    payload = json.loads(text)
    assert payload["command"] == "green"
    assert payload["points"] == [[1, 0, 0, 0]]


def test_comments_and_spacing():
    cfg = parse_config_text(
        "# run setup\nd = 3\n\ncontrast = 0.1  # mid strength\nlaw=uniform\n")
    assert cfg.d == 3
    assert cfg.contrast == 0.1
    assert cfg.law == "uniform"


def test_missing_required_field_named():
    with pytest.raises(ConfigError, match="missing required config field: d"):
        parse_config_text("contrast = 0.1\n")


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config_text("d = 3\nnot a pair\n")
    with pytest.raises(ConfigError, match="line 3: unknown config key"):
        parse_config_text("d = 3\ncontrast = 0.1\nshade = 4\n")
    with pytest.raises(ConfigError, match="line 3: duplicate key"):
        parse_config_text("d = 3\ncontrast = 0.1\ncontrast = 0.2\n")


def test_value_validation():
    with pytest.raises(ConfigError, match="bad value for d"):
        parse_config_text("d = three\n")
    with pytest.raises(ConfigError, match="unknown law"):
        parse_config_text("d = 3\nlaw = gauss\n")
    with pytest.raises(ConfigError, match="contrast"):
        parse_config_text("d = 3\ncontrast = 1.5\n")
    with pytest.raises(ConfigError, match="seed"):
        parse_config_text("d = 3\nseed = -1\n")


def test_load_run_input_returns_extras(tmp_path):
    cfg = RunConfig(d=3, samples=50)
    p = tmp_path / "run_manifest.json"
    p.write_text(manifest_text("mc", cfg, {"mode": "green",
                                           "wall_time_s": 1.25}))
    loaded, extras = load_run_input(str(p))
    assert loaded == cfg
    assert extras == {"command": "mc", "mode": "green", "wall_time_s": 1.25}

    q = tmp_path / "plain.cfg"
    q.write_text("d = 3\nsamples = 50\n")
    loaded2, extras2 = load_run_input(str(q))
    assert loaded2 == cfg
    assert extras2 == {}

    with pytest.raises(ConfigError, match="cannot read config"):
        load_run_input(str(tmp_path / "absent.cfg"))


def test_resolve_out(monkeypatch):
    monkeypatch.delenv("ANNGF_OUT", raising=False)
    assert resolve_out(RunConfig(d=3)) == "."
    assert resolve_out(RunConfig(d=3, out="x")) == "x"
    monkeypatch.setenv("ANNGF_OUT", "envdir")
    assert resolve_out(RunConfig(d=3)) == "envdir"
    assert resolve_out(RunConfig(d=3, out="x")) == "x"
