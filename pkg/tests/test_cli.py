import hashlib
import json
import subprocess

import numpy as np

from fockatten.cli import main

FAST_MZI = ["--xi", "0.25", "--cutoff", "6", "--samples", "8"]


def digest_tree(root):
    out = {}
    for path in sorted(root.rglob("*")):
        if path.is_file():
            out[path.name] = hashlib.sha256(path.read_bytes()).hexdigest()
    return out


def read_summary(out_dir):
    return json.loads((out_dir / "summary.json").read_text())


def test_cat_atten_run_and_summary(tmp_path):
    out = tmp_path / "run"
    code = main(
        ["cat-atten", "--alpha", "1.0", "--cutoff", "14", "--mode", "heralded",
         "--grid", "-4:4:81", "--out", str(out)]
    )
    assert code == 0
    assert sorted(p.name for p in out.iterdir()) == [
        "plots.md", "summary.json", "wigner.csv"
    ]
    doc = read_summary(out)
    assert doc["config"]["scenario"] == "cat-atten"
    assert doc["config"]["parameters"]["alpha"] == 1.0
    assert doc["config"]["parameters"]["grid"] == [-4.0, 4.0, 81]
    assert doc["tool"]["name"] == "fockatten"
    assert 0.0 < doc["results"]["herald_probability"] <= 1.0
    assert abs(doc["results"]["normalization"] - 1.0) < 1e-2
    lines = (out / "wigner.csv").read_text().strip().split("\n")
    assert lines[0] == "x,p,w"
    assert len(lines) == 1 + 81 * 81


def test_smsv_atten_emits_fit(tmp_path):
    out = tmp_path / "run"
    code = main(["smsv-atten", "--s", "3.0", "--mode", "ordinary", "--out", str(out)])
    assert code == 0
    fit = json.loads((out / "fit.json").read_text())
    # ordinary 50-50 loss turns squeeze ratio 3 into sqrt(3)
    assert abs(fit["s"] - 3.0**0.5) < 0.02
    assert abs(fit["sigma"] - 0.7598) < 0.005
    doc = read_summary(out)
    assert doc["config"]["parameters"]["s"] == 3.0
    assert abs(doc["config"]["parameters"]["xi"] - 0.5 * np.log(3.0)) < 1e-12
    assert doc["results"]["fit"] == fit


def test_wigner_scenario_defaults(tmp_path):
    out = tmp_path / "w"
    assert main(["wigner", "--out", str(out)]) == 0
    doc = read_summary(out)
    assert doc["config"]["parameters"]["family"] == "even-cat"
    assert doc["config"]["parameters"]["alpha"] == 2.0
    assert doc["config"]["parameters"]["cutoff"] == 20
    assert doc["results"]["negativity"] > 0.2


def test_mzi_sweep_run(tmp_path):
    out = tmp_path / "m"
    assert main(["mzi-sweep", *FAST_MZI, "--mode", "heralded", "--out", str(out)]) == 0
    doc = read_summary(out)
    assert abs(doc["results"]["visibility"] - 1.0) < 1e-9
    lines = (out / "curve.csv").read_text().strip().split("\n")
    assert lines[0] == "phi,p_coincidence"
    assert len(lines) == 1 + 8


def test_eta_sweep_run(tmp_path):
    out = tmp_path / "e"
    assert main(["eta-sweep", *FAST_MZI, "--etas", "0,0.5,1", "--out", str(out)]) == 0
    doc = read_summary(out)
    rows = doc["results"]["visibility_vs_eta"]
    assert [r[0] for r in rows] == [0.0, 0.5, 1.0]
    vis = [r[1] for r in rows]
    assert vis[0] < vis[1] < vis[2]
    assert abs(vis[2] - 1.0) < 1e-9
    lines = (out / "eta_visibility.csv").read_text().strip().split("\n")
    assert lines[0] == "eta,visibility"
    assert len(lines) == 4


def test_runs_are_byte_identical(tmp_path):
    out = tmp_path / "d"
    args = ["cat-atten", "--alpha", "1.0", "--cutoff", "14", "--grid", "-4:4:61",
            "--mode", "heralded", "--out", str(out)]
    assert main(args) == 0
    first = digest_tree(out)
    assert main(args) == 0
    second = digest_tree(out)
    assert first == second


def test_invalid_config_exits_2_and_writes_nothing(tmp_path, capsys):
    out = tmp_path / "x"
    code = main(["cat-atten", "--mode", "efficiency", "--eta", "1.5", "--out", str(out)])
    assert code == 2
    assert not out.exists()
    err = capsys.readouterr().err
    assert "eta" in err


def test_numerical_failure_exits_3_and_writes_nothing(tmp_path, capsys):
    out = tmp_path / "x"
    code = main(["wigner", "--cutoff", "4", "--out", str(out)])
    assert code == 3
    assert not out.exists()
    err = capsys.readouterr().err
    assert "cutoff" in err


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "scenario": "cat-atten",
        "parameters": {"alpha": 1.5, "mode": "ordinary", "cutoff": 16},
        "output": str(tmp_path / "from-file"),
    }))
    assert main(["cat-atten", "--config", str(cfg), "--alpha", "1.0",
                 "--grid", "-4:4:41"]) == 0
    doc = read_summary(tmp_path / "from-file")
    assert doc["config"]["parameters"]["alpha"] == 1.0  # flag wins
    assert doc["config"]["parameters"]["mode"] == "ordinary"  # file survives
    assert doc["config"]["parameters"]["cutoff"] == 16


def test_unknown_keys_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"scenario": "mzi-sweep", "bogus": 1}))
    code = main(["mzi-sweep", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "bogus" in capsys.readouterr().err

    code = main(["mzi-sweep", *FAST_MZI, "--alpha", "2.0", "--out", str(tmp_path / "o2")])
    assert code == 2  # alpha is not an mzi-sweep parameter


def test_scenario_mismatch_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"scenario": "mzi-sweep"}))
    code = main(["cat-atten", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "mzi-sweep" in capsys.readouterr().err


def test_validate_reports_all_violations(capsys):
    assert main(["validate", "cat-atten", "--mode", "efficiency", "--eta", "1.5",
                 "--keep", "2.0"]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert len(lines) == 2
    assert any("eta" in l for l in lines)
    assert any("keep" in l for l in lines)


def test_validate_predicts_truncation(capsys):
    assert main(["validate", "wigner", "--cutoff", "4"]) == 0
    out = capsys.readouterr().out
    assert "cutoff 4" in out


def test_validate_accepts_reference_configs(capsys):
    for scenario in ("wigner", "cat-atten", "smsv-atten", "mzi-sweep", "eta-sweep"):
        assert main(["validate", scenario]) == 0
        assert capsys.readouterr().out == ""


def test_console_entry_point():
    proc = subprocess.run(
        ["fockatten", "validate", "mzi-sweep"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout == ""
