import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from robustfl import io
from robustfl.cli import main
from robustfl.excitation import pe_check
from robustfl.robustness import certify
from robustfl.sysid import error_bound, estimation_error, ls_estimate
from robustfl.system import double_integrator


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_design_round_trip_and_determinism(tmp_path, capsys):
    code, out, _ = run(capsys, "design", "--T", 50, "--k", 3, "--target-alpha", 0.48, "--seed", 9, "--out", tmp_path / "a.csv")
    assert code == 0
    u = io.read_signal_csv(tmp_path / "a.csv")
    side = io.read_json(tmp_path / "a.json")
    assert side["alpha"] == pytest.approx(pe_check(u, 3).alpha, rel=1e-12)
    assert side["alpha"] == pytest.approx(0.48, rel=1e-12)
    run(capsys, "design", "--T", 50, "--k", 3, "--target-alpha", 0.48, "--seed", 9, "--out", tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_pipeline_commands(tmp_path, capsys):
    run(capsys, "design", "--target-alpha", 0.48, "--seed", 1, "--out", tmp_path / "u.csv")
    code, _, _ = run(capsys, "simulate", "--u", tmp_path / "u.csv", "--noise-std", 0, "--out-dir", tmp_path / "clean")
    assert code == 0
    code, out, _ = run(capsys, "certify", "--u", tmp_path / "clean/u.csv", "--x", tmp_path / "clean/x.csv", "--rho", 0.105, "--n", 2)
    assert code == 0
    cert = json.loads(out)
    assert set(cert) == {"alpha", "rho", "n", "delta_cert", "delta_actual"}
    assert cert["delta_cert"] == pytest.approx(cert["alpha"] * 0.105 / math.sqrt(3), rel=1e-12)
    assert cert["delta_actual"] >= cert["delta_cert"]

    run(capsys, "simulate", "--u", tmp_path / "u.csv", "--seed", 3, "--out-dir", tmp_path / "noisy")
    code, out, _ = run(
        capsys, "identify", "--u", tmp_path / "noisy/u.csv", "--x", tmp_path / "noisy/x.csv",
        "--noise", tmp_path / "noisy/w.csv", "--out", tmp_path / "p.json",
    )
    assert code == 0
    res = json.loads(out)
    u = io.read_signal_csv(tmp_path / "noisy/u.csv")
    x = io.read_signal_csv(tmp_path / "noisy/x.csv")
    sys = double_integrator()
    assert estimation_error(ls_estimate(u, x), sys.A, sys.B) <= res["error_bound"]

    code, out, _ = run(capsys, "dpc", "--predictor", tmp_path / "p.json", "--steps", 30, "--seed", 2, "--out", tmp_path / "cl.csv")
    assert code == 0
    summary = json.loads(out)
    xs, us, costs = io.read_closed_loop_csv(tmp_path / "cl.csv")
    assert xs.length == 31 and us.length == 30
    assert summary["tracking_cost"] == pytest.approx(costs.sum())
    recomputed = np.sum((xs.samples[:-1] - [1, 0]) ** 2) + np.sum(us.samples**2)
    assert summary["tracking_cost"] == pytest.approx(recomputed, rel=1e-12)


def test_rho0_command(capsys):
    code, out, _ = run(capsys, "rho0", "--grid")
    assert code == 0
    res = json.loads(out)
    assert res["rho0_estimate"] == pytest.approx(0.105, abs=0.005)
    assert res["rho0_grid"] == pytest.approx(res["rho0_estimate"], abs=1e-3)


def test_exit_codes(tmp_path, capsys):
    (tmp_path / "bad.csv").write_text("t,u1\n0,1\n")
    (tmp_path / "x.csv").write_text("t,x2\n0,1\n")
    code, _, err = run(capsys, "certify", "--u", tmp_path / "bad.csv", "--x", tmp_path / "x.csv", "--rho", 0.1, "--n", 2)
    assert code == 2 and "'x1'" in err and "x.csv:1" in err
    code, _, _ = run(capsys, "design", "--T", 4, "--k", 3, "--target-alpha", 1, "--out", tmp_path / "u.csv")
    assert code == 2
    code, _, _ = run(capsys, "certify", "--u", tmp_path / "missing.csv", "--x", tmp_path / "x.csv", "--rho", 0.1, "--n", 2)
    assert code == 4
    (tmp_path / "sys.json").write_text(json.dumps({"A": [[1, 0], [0, 1]], "B": [[1], [0]]}))
    code, _, err = run(capsys, "rho0", "--system", tmp_path / "sys.json")
    assert code == 2 and "controllable" in err


def test_stage_tagged_failure(tmp_path, capsys):
    (tmp_path / "sys.json").write_text(json.dumps({"A": [[1, 0], [0, 1]], "B": [[1], [0]]}))
    code, _, err = run(capsys, "reproduce-sec4", "--system", tmp_path / "sys.json", "--seeds", 1, "--out-dir", tmp_path / "o")
    assert code == 2 and "[rho0]" in err


def test_reproduce_outputs_recomputable(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ROBUSTFL_OUTPUT_DIR", str(tmp_path / "env_out"))
    code, out, _ = run(capsys, "reproduce-sec4", "--seeds", 3, "--steps", 30)
    assert code == 0
    out_dir = tmp_path / "env_out"
    report = io.read_json(out_dir / "report.json")
    cfg = io.read_json(out_dir / "config.json")
    manifest = io.read_json(out_dir / "seeds.json")
    assert report["seeds"] == manifest["seeds"] == [0, 1, 2]
    sys = double_integrator()
    rho = report["rho0_estimate"]
    for s in report["seeds"]:
        for i, rec in enumerate(report["runs"][str(s)]):
            d = out_dir / f"seed_{s}" / f"data_{i + 1}"
            u = io.read_signal_csv(d / "u.csv")
            x = io.read_signal_csv(d / "x.csv")
            w = io.read_signal_csv(d / "w.csv")
            cert = certify(u, x, rho, 2)
            assert rec["alpha"] == cert.alpha
            assert rec["delta_actual"] == cert.delta_actual
            assert rec["delta_cert"] == cert.delta_cert
            assert rec["id_error"] == estimation_error(ls_estimate(u, x), sys.A, sys.B)
            assert rec["error_bound"] == error_bound(w, u, x)
            xs, us, costs = io.read_closed_loop_csv(d / "closed_loop.csv")
            r = np.array(cfg["reference"])
            stage = np.sum((xs.samples[:-1] - r) ** 2, axis=1) + np.sum(us.samples**2, axis=1)
            np.testing.assert_allclose(stage, costs, rtol=1e-12)
            assert rec["tracking_cost"] == pytest.approx(costs.sum(), rel=1e-12)
    root = ET.parse(out_dir / "trajectories.svg").getroot()
    assert root.tag.endswith("svg")
    assert len(root.findall("{http://www.w3.org/2000/svg}polyline")) == 6


def test_reproduce_deterministic(tmp_path, capsys):
    for name in ("a", "b"):
        run(capsys, "reproduce-sec4", "--seeds", 2, "--steps", 10, "--out-dir", tmp_path / name)
    for rel in ["report.json", "seed_1/data_2/closed_loop.csv", "trajectories.svg", "seeds.json"]:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()


def test_config_file_with_overrides(tmp_path, capsys):
    (tmp_path / "cfg.json").write_text(json.dumps({"T": 40, "scalings": [1.0, 0.1], "seeds": [5]}))
    code, _, _ = run(capsys, "--config", tmp_path / "cfg.json", "reproduce-sec4", "--steps", 5, "--out-dir", tmp_path / "o")
    assert code == 0
    report = io.read_json(tmp_path / "o/report.json")
    assert report["seeds"] == [5] and len(report["records"]) == 2
    assert io.read_signal_csv(tmp_path / "o/seed_5/data_1/u.csv").length == 40
    (tmp_path / "bad.json").write_text(json.dumps({"Tee": 3}))
    code, _, err = run(capsys, "--config", tmp_path / "bad.json", "rho0")
    assert code == 2 and "Tee" in err
