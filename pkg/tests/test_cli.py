import json
import subprocess
import sys

import numpy as np
import pytest

from heatreach.cli import main
from heatreach.verify import run_suite


def run(tmp_path, cmd, cfg=None, *extra):
    args = [cmd] if isinstance(cmd, str) else list(cmd)
    if cfg is not None:
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(cfg))
        args += ["--config", str(p)]
    return main(args + ["--out", str(tmp_path / "out"), *extra])


def report(tmp_path, name):
    return json.loads((tmp_path / "out" / f"{name}.json").read_text())


def test_simulate_sine_decay(tmp_path):
    assert run(tmp_path, "simulate", {"t_grid": [0, 0.5, 1]}) == 0
    r = report(tmp_path, "simulate")
    assert [a["re"] for a in r["a1"]] == pytest.approx([1, np.exp(-0.5), np.exp(-1)], rel=1e-13)
    assert r["schema"] == 1
    head = (tmp_path / "out" / "states.csv").read_text().splitlines()[0]
    assert head == "t,n,re,im"


def test_simulate_constant_control(tmp_path):
    assert run(tmp_path, "simulate", {"initial": None, "control": {"u0": "1"}, "t_grid": [1], "N": 4}) == 0
    a1 = report(tmp_path, "simulate")["a1"][0]
    assert a1["re"] == pytest.approx(2 / np.pi * (1 - np.exp(-1)), rel=1e-13)


@pytest.mark.parametrize("cfg", [{"t_grid": []}, {"bogus": 1}, {"N": 5000}, {"tau": -1},
                                 {"t_grid": [2.0]}, {"initial": "import os"}])
def test_simulate_usage_errors(tmp_path, cfg):
    assert run(tmp_path, "simulate", cfg) == 2


def test_control_horizon_mismatch(tmp_path):
    (tmp_path / "u.csv").write_text("time,u0,upi\n0,1,0\n1,1,0\n")
    assert run(tmp_path, "simulate", {"tau": 0.5, "t_grid": [0.5], "control": {"file": str(tmp_path / "u.csv")}}) == 2


def test_synthesize_null_control(tmp_path):
    assert run(tmp_path, "synthesize", {"scenario": "null"}) == 0
    r = report(tmp_path, "synthesize")
    assert r["final_relative_norm"] < 1e-8
    assert {"residual", "lambda", "condition_estimate", "K", "N"} <= set(r)
    assert (tmp_path / "out" / "control.csv").exists()


def test_synthesize_inverse_crime_with_sweep(tmp_path):
    assert run(tmp_path, "synthesize", {"scenario": "inverse_crime", "sweep": True}, "--seed", "7") == 0
    r = report(tmp_path, "synthesize")
    assert r["residual"] < 1e-6 and r["lcurve_monotone"] and r["seed"] == 7
    rows = (tmp_path / "out" / "lcurve.csv").read_text().splitlines()
    assert rows[0] == "lambda,residual,solution_norm" and len(rows) == 14


def test_synthesize_above_threshold_fails(tmp_path):
    cfg = {"scenario": "target", "target": "x*(pi - x)", "K": 2, "threshold": 1e-12}
    assert run(tmp_path, "synthesize", cfg) == 1
    assert report(tmp_path, "synthesize")["pass"] is False


def test_decompose_constant_trace(tmp_path):
    assert run(tmp_path, "decompose", {"trace": "1"}) == 0
    r = report(tmp_path, "decompose")
    c = r["center_reconstruction"]
    assert abs(c["re"] - 1) < 1e-8 and abs(c["im"]) < 1e-8
    assert len(list((tmp_path / "out").glob("piece_*.csv"))) == 4


def test_decompose_rejects_infinite_trace(tmp_path):
    assert run(tmp_path, "decompose", {"trace": "1/z", "singular_vertices": ["0"]}) == 1
    r = report(tmp_path, "decompose")
    assert r["quantity"]["name"] == "l1"


def test_cousin_rejects_constant(tmp_path):
    assert run(tmp_path, "cousin", {"phi": "1"}) == 1
    q = report(tmp_path, "cousin")["quantity"]
    assert q["name"] == "vertex_weighted_norm" and q["diverges_at"] == ["z0", "z1"]


def test_verify_unknown_suite(tmp_path):
    assert run(tmp_path, ["verify", "foo"]) == 2


def test_verify_rejects_unknown_keys(tmp_path):
    assert run(tmp_path, ["verify", "growth"], {"nope": 1}) == 2


def test_verify_growth_suite(tmp_path):
    assert run(tmp_path, ["verify", "growth"]) == 0
    r = report(tmp_path, "verify_growth")
    assert all({"name", "value", "bound", "pass"} <= set(c) for c in r["checks"])


def test_unknown_subcommand():
    assert main(["frobnicate"]) == 2


def test_reports_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    for d in (a, b):
        assert run(d, "synthesize", {"scenario": "inverse_crime"}) == 0
    assert (a / "out" / "synthesize.json").read_bytes() == (b / "out" / "synthesize.json").read_bytes()


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "heatreach", "verify", "foo", "--out", str(tmp_path)],
                       capture_output=True, text=True)
    assert r.returncode == 2 and "unknown suite" in r.stderr


def test_run_suite_unknown():
    with pytest.raises(KeyError):
        run_suite("foo")
