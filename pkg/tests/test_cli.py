import csv
import json
import subprocess
import sys

import pytest

from heckeqf.cli import main
from heckeqf.eigenform import make_eigenform


def run(argv, tmp_path, name="out"):
    path = tmp_path / name
    code = main(argv + ["--out", str(path)])
    return code, path.read_text() if path.exists() else None


def csv_body(text):
    lines = text.splitlines()
    assert lines[0].startswith("# schema: heckeqf/")
    return list(csv.reader(l for l in lines[1:] if not l.startswith("#")))


def test_eigenform_csv(tmp_path):
    code, text = run(["eigenform", "--weight", "12", "--limit", "100"], tmp_path)
    assert code == 0
    assert text.splitlines()[0] == "# schema: heckeqf/eigenform/v1"
    rows = csv_body(text)
    assert rows[0] == ["n", "a_n", "lambda_n"]
    assert len(rows) == 101
    n, a, lam = rows[2]
    assert (n, a) == ("2", "-24")
    assert float(lam) == pytest.approx(-0.5303300858899106, abs=1e-16)
    assert "\r" not in text


def test_eigenform_json(tmp_path):
    code, text = run(["eigenform", "--weight", "16", "--limit", "10", "--format", "json"], tmp_path)
    payload = json.loads(text)
    assert code == 0 and payload["schema"] == "heckeqf/eigenform/v1"
    assert payload["a_n"][:2] == ["1", "216"]
    assert len(payload["lambda_n"]) == 10


@pytest.mark.parametrize("argv", [
    ["eigenform", "--weight", "13"],
    ["eigenform", "--weight", "12", "--limit", "0"],
    ["qform", "--disc", "-5"],
    ["qform", "--disc", "4"],
    ["sums", "--disc", "-23", "--r", "2"],
    ["decomp", "--disc", "-4", "--r", "9"],
    ["signs", "--disc", "-4", "--x", "0"],
    ["sums", "--disc", "-4", "--r", "2", "--workers", "0"],
])
def test_usage_errors(argv, tmp_path, capsys):
    code, text = run(argv, tmp_path)
    assert code == 2
    assert text is None
    assert "error" in capsys.readouterr().err


def test_qform(tmp_path):
    code, text = run(["qform", "--disc", "-4", "--limit", "10"], tmp_path)
    assert code == 0
    rows = csv_body(text)
    assert rows[0] == ["n", "r_Q"]
    assert [int(r[1]) for r in rows[1:]] == [1, 4, 4, 0, 4, 8, 0, 0, 4, 4, 8]
    assert "# h=1 forms=(1,0,1)" in text
    code, text = run(["qform", "--disc", "-23", "--limit", "5", "--format", "json"], tmp_path)
    payload = json.loads(text)
    assert payload["h"] == 3
    assert [(f["a"], f["b"], f["c"]) for f in payload["forms"]] == [(1, 1, 6), (2, -1, 3), (2, 1, 3)]


def test_decomp_pass(tmp_path):
    code, text = run(["decomp", "--weight", "12", "--disc", "-4", "--r", "2", "--limit", "5000"], tmp_path)
    assert code == 0
    assert text.rstrip().endswith("# verdict=PASS")
    rows = csv_body(text)
    assert rows[0] == ["n", "R_n", "L_n", "U_n", "recon_abs_err", "squarefree"]
    assert len(rows) == 5001


def test_decomp_json(tmp_path):
    code, text = run(["decomp", "--disc", "-3", "--r", "3", "--limit", "300", "--format", "json"], tmp_path)
    payload = json.loads(text)
    assert code == 0 and payload["verdict"] == "PASS"
    assert payload["summary"]["w_D"] == 6
    assert payload["rows"][0]["U"] == pytest.approx(6)


def test_signs_json(tmp_path):
    code, text = run(["signs", "--weight", "12", "--disc", "-4", "--x", "10000", "--format", "json"], tmp_path)
    payload = json.loads(text)
    assert code == 0
    assert payload["schema"] == "heckeqf/signs/v1"
    assert payload["count"] >= 10 and payload["passed"] is True
    assert payload["interval"] == [10000, 20000]


def test_signs_csv(tmp_path):
    code, text = run(["signs", "--disc", "-163", "--x", "1000"], tmp_path)
    assert code == 0
    rows = csv_body(text)
    assert rows[0] == ["n", "sign", "change"]
    changes = sum(int(r[2]) for r in rows[1:])
    assert f"# count={changes}" in text


def test_sums(tmp_path):
    argv = ["sums", "--disc", "-4", "--r", "2", "--limit", "20000", "--format", "json"]
    code, text = run(argv, tmp_path)
    payload = json.loads(text)
    assert code == 0 and payload["verdict"] == "PASS"
    assert [c["x"] for c in payload["checkpoints"]] == [1000, 1500, 2250, 3375, 5063, 7594, 11391, 17086, 20000]
    assert payload["summary"]["max_route_rel_diff"] <= 1e-6


def test_sums_route_failure_exit_code(tmp_path):
    # the divisor-sum formula is not a lattice count for this non-fundamental discriminant
    code, text = run(["sums", "--disc", "-12", "--r", "1", "--limit", "3000"], tmp_path)
    assert code == 1
    assert text.rstrip().endswith("# verdict=FAIL")


@pytest.mark.parametrize("argv", [
    ["decomp", "--disc", "-3", "--r", "4", "--limit", "2000"],
    ["sums", "--disc", "-7", "--r", "2", "--limit", "30000"],
    ["qform", "--disc", "-163", "--limit", "5000"],
])
def test_byte_identical_across_workers(argv, tmp_path):
    outs = {w: run(argv + ["--workers", str(w)], tmp_path, f"w{w}")[1] for w in (1, 4)}
    assert outs[1] == outs[4]


def test_stdout_and_console_script(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "heckeqf.cli", "eigenform", "--weight", "12", "--limit", "3"],
        capture_output=True, text=True, check=True,
    )
    lines = proc.stdout.splitlines()
    assert lines[1] == "n,a_n,lambda_n"
    rows = [line.split(",") for line in lines[2:]]
    assert [r[:2] for r in rows] == [["1", "1"], ["2", "-24"], ["3", "252"]]
    # 17 significant digits round-trip exactly
    f = make_eigenform(12, 3)
    assert [float(r[2]) for r in rows] == [float(v) for v in f.lam[1:]]
