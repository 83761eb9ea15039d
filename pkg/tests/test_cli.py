import json
from fractions import Fraction
from pathlib import Path

import pytest

from shiftinv import cli, vertexcore

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(out):
    return json.loads(out)


def test_verify_filter_runs_one_suite(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--filter", "ybe", "--out", str(tmp_path / "v"))
    rep = report(out)
    assert code == 0 and [s["name"] for s in rep["suites"]] == ["ybe"]
    assert rep["schema"] == "v1" and rep["build"].startswith("0.1.0")
    assert rep["manifest"]["filter"] == ["ybe"]
    assert json.loads((tmp_path / "v" / "report.json").read_text()) == rep


@pytest.mark.slow
def test_verify_without_filter_runs_everything(capsys):
    code, out, _ = run(capsys, "verify", "--trials", "1")
    assert code == 0 and [s["name"] for s in report(out)["suites"]] == list(cli.SUITES)


def test_injected_weight_bug_exits_one(capsys, monkeypatch):
    orig = vertexcore.r_weight

    def broken(q, z, i, j, k, l):
        w = orig(q, z, i, j, k, l)
        return w * Fraction(9, 10) if (i, j, k, l) == (2, 1, 1, 2) else w

    monkeypatch.setattr(vertexcore, "r_weight", broken)
    code, out, _ = run(capsys, "verify", "--filter", "ybe", "--trials", "2")
    rep = report(out)
    assert code == 1 and not rep["passed"]
    fail = rep["suites"][0]["failures"][0]
    assert {"q", "x", "y", "z", "bad_externals"} <= set(fail)


@pytest.mark.parametrize("name, value", [("two_row", "128/767"), ("z_shaped", "27/59")])
def test_shift_exact_configs(capsys, name, value):
    code, out, _ = run(capsys, "shift-exact", "--config", str(CONFIGS / f"{name}.json"))
    rep = report(out)
    assert code == 0 and rep["phi"] == rep["psi"] == value
    assert rep["parameters"]["kind"] in ("two-row", "z-shaped")


def test_shift_exact_quadrant(capsys):
    code, out, _ = run(capsys, "shift-exact", "--config", str(CONFIGS / "quadrant_delta0.json"))
    assert code == 0 and report(out)["passed"]
    code, out, _ = run(capsys, "shift-exact", "--config", str(CONFIGS / "quadrant_shift.json"))
    rep = report(out)
    assert code == 0 and rep["law_before"] == rep["law_after"]


def test_shift_exact_reports_failed_identity(capsys, tmp_path):
    cfg = json.loads((CONFIGS / "two_row.json").read_text())
    cfg["x"] = ["1/2", "1/2"]
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    code, out, _ = run(capsys, "shift-exact", "--config", str(p))
    assert code == 0   # equal rapidities: swapping is a no-op and the identity still holds
    cfg["m"] = 0
    p.write_text(json.dumps(cfg))
    code, _, err = run(capsys, "shift-exact", "--config", str(p))
    assert code == 2 and "error" in err


def test_shift_mc_beta_accepts(capsys, tmp_path):
    out_dir = tmp_path / "beta"
    code, out, _ = run(capsys, "shift-mc", "--config", str(CONFIGS / "beta_polymer.json"),
                       "--replicas", "20000", "--out", str(out_dir), "--workers", "1")
    rep = report(out)
    assert code == 0 and rep["accepted"] and rep["max_moment_z"] < 4
    header = (out_dir / "samples_A.csv").read_text().splitlines()[0]
    assert header == '"logZ(0,0)->(1,6)","logZ(0,1)->(2,5)"'
    assert (out_dir / "samples_B.csv").read_text().splitlines()[0] == '"logZ(0,0)->(1,6)","logZ(0,2)->(2,6)"'
    assert rep["manifest"]["seed"] == "20240917"


def test_shift_mc_zero_shift(capsys, tmp_path):
    cfg = json.loads((CONFIGS / "gamma_polymer.json").read_text())
    cfg["delta"] = 0
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    code, out, _ = run(capsys, "shift-mc", "--config", str(p), "--replicas", "5000", "--workers", "1")
    assert code == 0 and report(out)["accepted"]


def test_shift_mc_broken_geometry_needs_force(capsys, tmp_path):
    cfg = json.loads((CONFIGS / "beta_polymer.json").read_text())
    cfg["iota"] = 1
    cfg["delta"] = 2
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    code, _, err = run(capsys, "shift-mc", "--config", str(p), "--replicas", "2000")
    assert code == 2 and "need" in err
    code, out, _ = run(capsys, "shift-mc", "--config", str(p), "--replicas", "2000", "--force", "--workers", "1")
    rep = report(out)
    assert code == 0 and rep["experiment"]["exploratory"] and rep["experiment"]["violations"]


def test_shift_mc_oy_reports_richardson(capsys):
    code, out, _ = run(capsys, "shift-mc", "--config", str(CONFIGS / "oy_delayed_horizontal.json"),
                       "--replicas", "1000", "--workers", "1")
    rep = report(out)
    assert code in (0, 1) and "richardson" in rep and "warning" in rep


def test_sample_reruns_are_byte_identical(capsys, tmp_path):
    args = ["sample", "--config", str(CONFIGS / "gamma_polymer.json"), "--replicas", "1500", "--seed", "77"]
    run(capsys, *args, "--out", str(tmp_path / "a"), "--workers", "1")
    run(capsys, *args, "--out", str(tmp_path / "b"), "--workers", "2")
    assert (tmp_path / "a" / "samples.csv").read_bytes() == (tmp_path / "b" / "samples.csv").read_bytes()
    side = json.loads((tmp_path / "a" / "samples.json").read_text())
    assert side["seed"] == "77" and side["replicas"] == 1500
    code, out, _ = run(capsys, *args)
    assert code == 0 and out == (tmp_path / "a" / "samples.csv").read_text()


def test_output_directory_must_be_empty(capsys, tmp_path):
    d = tmp_path / "full"
    d.mkdir()
    (d / "x").write_text("keep")
    code, _, err = run(capsys, "verify", "--filter", "merge", "--out", str(d))
    assert code == 2 and (d / "x").read_text() == "keep"
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".partial")]


@pytest.mark.parametrize("argv", [
    ["verify", "--filter", "nonsense"],
    ["verify", "--seed", "-4"],
    ["verify", "--seed", "abc"],
    ["shift-exact", "--config", "/does/not/exist.json"],
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("shiftinv: error:")


def test_bad_json_exits_two(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{")
    assert run(capsys, "sample", "--config", str(p))[0] == 2
    p.write_text("[1, 2]")
    assert run(capsys, "sample", "--config", str(p))[0] == 2
    p.write_text(json.dumps({"model": "beta", "queries": [[0, [0, 1]]]}))
    assert run(capsys, "sample", "--config", str(p))[0] == 2


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["shift-mc"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli.main(["sample", "--config", "x", "--replicas", "0"])
    assert e.value.code == 2
