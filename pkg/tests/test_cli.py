"""End-to-end CLI runs: exit codes, report envelopes, reproducibility."""

import json
import os
import re
import subprocess
import sys

import numpy as np
import pytest

from berglab import cli

BASE_CONFIG = {
    "space": {"kind": "bergman_disc", "alpha": 0.0, "d": 2},
    "n_modes": 8,
    "seed": 11,
    "p": 4.0,
    "symbols": {
        "drift": {"type": "poly", "entries": [
            {"i": 0, "k": 0, "terms": [{"a": 1, "b": 0, "c": 1.0}]},
            {"i": 1, "k": 1, "terms": [{"a": 0, "b": 0, "c": 0.5}]}]},
        "bump": {"type": "ball", "center": [0.1, 0.0], "radius": 0.3,
                 "matrix": [[1, 0], [0, 1]]},
    },
    "operator": {"type": "toeplitz", "symbol": "drift"},
    "covering_r": [1.0, 4.0],
    "rank1": {"n_pairs": 2, "degree": 2},
}


@pytest.fixture()
def config_path(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(BASE_CONFIG))
    return str(path)


def _run(command, config_path, out, extra=()):
    return cli.main([command, "--config", config_path, "--out", str(out), *extra])


def _load(out, command):
    stem = command.replace("-", "_")
    report = json.loads((out / f"{stem}.json").read_text())
    csv_text = (out / f"{stem}.csv").read_text()
    return report, csv_text


@pytest.mark.parametrize("command", [
    "kernel", "toeplitz", "berezin", "rkt", "essnorm", "rf",
    "covering", "localize", "rank1", "verify-axioms",
])
def test_commands_run_and_report(command, config_path, tmp_path):
    out = tmp_path / "out"
    assert _run(command, config_path, out) == 0
    report, csv_text = _load(out, command)
    assert report["tool"] == "berglab"
    assert report["command"] == command
    assert report["seed"] == 11
    assert report["claim"]["id"]
    assert report["claim"]["statement"]
    assert report["config"]["n_modes"] == 8
    assert csv_text.count("\n") >= 1


def test_schur_command(config_path, tmp_path):
    rng = np.random.default_rng(0)
    kern = tmp_path / "kern.json"
    kern.write_text(json.dumps({
        "values": np.abs(rng.standard_normal((5, 4, 2, 2))).tolist(),
        "mu": [0.2] * 5, "nu": [0.25] * 4, "p": 2.0}))
    cfg = dict(BASE_CONFIG, schur_kernel_file=str(kern))
    path = tmp_path / "cfg2.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "out"
    assert _run("schur", str(path), out) == 0
    report, _ = _load(out, "schur")
    res = report["result"]
    assert res["dominates"] is True
    assert res["bound"] >= res["discretized_norm"] - 1e-12


def test_verify_axioms_all_pass(config_path, tmp_path):
    out = tmp_path / "out"
    assert _run("verify-axioms", config_path, out) == 0
    report, _ = _load(out, "verify-axioms")
    assert report["result"]["all_pass"] is True
    assert all(c["pass"] for c in report["result"]["checks"])


def test_reports_byte_identical_modulo_timestamp(config_path, tmp_path):
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        assert _run("essnorm", config_path, out) == 0
        assert _run("covering", config_path, out) == 0
    for command in ("essnorm", "covering"):
        texts = []
        for out in outs:
            report, csv_text = _load(out, command)
            raw = (out / f"{command}.json").read_text()
            texts.append((re.sub(r'^\s*"timestamp".*\n', "", raw, flags=re.M), csv_text))
        assert texts[0] == texts[1]


def test_seed_flag_overrides_config(config_path, tmp_path):
    out = tmp_path / "out"
    assert _run("rank1", config_path, out, extra=["--seed", "99"]) == 0
    report, _ = _load(out, "rank1")
    assert report["seed"] == 99
    assert report["config"]["seed"] == 99


def test_resolution_scale_changes_orders(config_path, tmp_path):
    out = tmp_path / "out"
    assert _run("rf", config_path, out, extra=["--resolution-scale", "1.5"]) == 0
    report, _ = _load(out, "rf")
    assert report["result"]["I"][0] == pytest.approx(0.5, abs=1e-8)


def test_bad_config_exits_2_and_writes_nothing(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n_mode": 3}))
    out = tmp_path / "out"
    assert cli.main(["kernel", "--config", str(bad), "--out", str(out)]) == 2
    err = capsys.readouterr().err
    payload = json.loads(err)
    assert payload["command"] == "kernel"
    assert "error" in payload
    assert not out.exists()


def test_unreadable_symbol_reference_exits_2(tmp_path, capsys):
    cfg = dict(BASE_CONFIG, operator={"type": "toeplitz", "symbol": "ghost"})
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert cli.main(["toeplitz", "--config", str(path), "--out", str(tmp_path / "o")]) == 2
    assert not (tmp_path / "o").exists()
    capsys.readouterr()


def test_console_script_installed(config_path, tmp_path):
    out = tmp_path / "out"
    proc = subprocess.run(
        ["berglab", "rf", "--config", config_path, "--out", str(out), "--threads", "1"],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (out / "rf.json").exists()
