"""CLI behavior: determinism, exit codes, file outputs, self-verification."""

import json
import subprocess
import sys

import pytest

from roundkit.cli import main

RUN = [sys.executable, "-m", "roundkit.cli"]


def run_cli(args, **kwargs):
    return subprocess.run(RUN + args, capture_output=True, text=True, **kwargs)


def test_volume_cube_output(tmp_path):
    out = tmp_path / "vol.json"
    code = main(
        ["volume", "--body", "cube", "--dim", "3", "--samples", "20000", "--seed", "4", "--out", str(out)]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["exact"] == 8.0
    assert abs(doc["estimate"]["value"] - 8.0) <= 3.0 * doc["estimate"]["std_error"]


def test_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["subquotient", "--body", "lp:3", "--k", "0", "--n", "2", "--seed", "11"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_subquotient_then_verify_fresh_process(tmp_path):
    cert = tmp_path / "cert.json"
    result = run_cli(
        ["subquotient", "--body", "cube", "--k", "0", "--n", "2", "--seed", "7", "--out", str(cert)]
    )
    assert result.returncode == 0, result.stderr
    verify = run_cli(
        ["verify", "--body", "cube", "--dim", "4", "--cert", str(cert), "--seed", "3"]
    )
    assert verify.returncode == 0, verify.stderr
    doc = json.loads(verify.stdout)
    assert doc["report"]["passed"]
    assert doc["report"]["gauge_mismatch"] <= 1e-6


def test_verify_rejects_tampered_certificate(tmp_path):
    cert = tmp_path / "cert.json"
    assert main(["subquotient", "--body", "cube", "--k", "0", "--n", "2", "--seed", "7", "--out", str(cert)]) == 0
    doc = json.loads(cert.read_text())
    doc["s_final"] /= 2.0
    cert.write_text(json.dumps(doc))
    assert main(["verify", "--body", "cube", "--dim", "4", "--cert", str(cert), "--seed", "3"]) == 2


def test_corollary_command(tmp_path):
    out = tmp_path / "cor.json"
    assert main(["corollary", "--body", "cube", "--dim", "6", "--seed", "9", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["verified"] and doc["s_final"] <= 256.0
    assert doc["meta"]["k"] == 0 and doc["frame"]["original_dim"] == 6


def test_averaging_command(capsys):
    assert main(["averaging", "--f", "x1sq", "--dim", "4", "--d", "2", "--outer", "100", "--inner", "400", "--seed", "3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["agrees_3sigma"]
    assert doc["reference"] == 0.25


def test_inequality_lab_writes_tables(tmp_path):
    out_dir = tmp_path / "lab"
    assert main(["inequality-lab", "--out", str(out_dir), "--n-max", "12", "--samples", "5000", "--seed", "1"]) == 0
    stirling = (out_dir / "stirling.csv").read_text().splitlines()
    assert stirling[1].startswith("2,0.49999999999999")
    findings = json.loads((out_dir / "findings.json").read_text())
    assert len(findings["findings"]) == 3


def test_john_command(capsys):
    assert main(["john", "--body", "cube", "--dim", "3", "--seed", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["certificate"]["s"] == pytest.approx(doc["sqrt_dim"], rel=1e-9)


def test_mahler_command(capsys):
    assert main(["mahler", "--body", "cross", "--dim", "4", "--samples", "10000", "--seed", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["normalized"] <= 1.0
    assert doc["normalized"] >= doc["reverse_bound"]


def test_usage_errors_exit_one():
    assert run_cli(["volume", "--body", "nosuchbody", "--dim", "3"]).returncode == 1
    assert run_cli(["volume", "--unknown-flag", "1"]).returncode == 1
    assert run_cli(["averaging", "--f", "x1sq", "--dim", "3", "--d", "5"]).returncode == 1
    assert run_cli(["volume", "--body", "cube", "--dim", "3", "--samples", "-5"]).returncode == 1


def test_csv_format(capsys):
    assert main(["volume", "--body", "cube", "--dim", "2", "--samples", "2000", "--seed", "1", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 2
    header = lines[0].split(",")
    assert "estimate.value" in header and "exact" in header
    row = dict(zip(header, lines[1].split(",")))
    assert float(row["exact"]) == 4.0


def test_inline_json_body(capsys):
    spec = json.dumps({"kind": "lp_ball", "dim": 2, "p": 2.0})
    assert main(["volume", "--body", spec, "--samples", "5000", "--seed", "1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["exact"] == pytest.approx(3.14159265, rel=1e-6)


def test_random_polytope_builtin(capsys):
    assert main(["volume", "--body", "random-polytope:10", "--dim", "3", "--samples", "20000", "--seed", "5"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc["estimate"]["value"] - doc["exact"]) <= 3.0 * doc["estimate"]["std_error"]
