import json
import subprocess
import sys

import pytest

from hardycomp.cli import EXIT_ERROR, EXIT_USAGE, run
from hardycomp.reports import comparable


def load(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_classify_exit_code_and_json(tmp_path, capsys):
    code = run(["classify", "--symbol", "half_plus", "--p", "1", "--trials", "50",
                "--out", str(tmp_path)])
    assert code == 1
    data = load(tmp_path / "classify.json")
    assert data["verdict"] == "FixesLpOnly(ii)" and data["exit_code"] == 1
    assert data["seed"] == 0 and "schema_version" in data
    assert "FixesLpOnly(ii)" in capsys.readouterr().out


def test_compact_exit_code():
    assert run(["classify", "--symbol", "dilation(0.5)", "--p", "2"]) == 0


def test_classify_is_deterministic(tmp_path):
    for d in ("a", "b"):
        run(["classify", "--symbol", "half_plus", "--p", "1", "--trials", "50", "--seed", "3",
             "--out", str(tmp_path / d)])
    assert comparable(load(tmp_path / "a" / "classify.json")) == \
        comparable(load(tmp_path / "b" / "classify.json"))


def test_csv_and_plot_outputs(tmp_path):
    pytest.importorskip("matplotlib")
    code = run(["shapiro", "--symbol", "half_plus", "--rays", "8", "--m-max", "10",
                "--format", "csv", "--plot", "--out", str(tmp_path)])
    assert code == 0
    text = (tmp_path / "shapiro.csv").read_bytes()
    assert text.startswith(b"ray_angle,abs_w,ratio\r\n")
    assert (tmp_path / "shapiro.png").stat().st_size > 0
    run(["contact", "--symbol", "half_plus", "--tau", "0.1,0.01", "--format", "csv",
         "--out", str(tmp_path)])
    assert (tmp_path / "contact_curve.csv").exists()


def test_hump_roundtrip_verify(tmp_path):
    assert run(["hump", "--symbol", "half_plus", "--p", "1", "--trials", "100",
                "--out", str(tmp_path)]) == 0
    cert = tmp_path / "hump_certificate.json"
    assert run(["hump", "--verify", str(cert), "--out", str(tmp_path)]) == 0
    assert load(tmp_path / "hump_verify.json")["passed"]
    data = load(cert)
    data["checks"][1]["iii"] *= 0.5
    cert.write_text(json.dumps(data), encoding="utf-8")
    assert run(["hump", "--verify", str(cert)]) == 1


def test_lacunary_roundtrip_verify(tmp_path):
    assert run(["lacunary", "--symbol", "power(2)", "--trials", "100",
                "--out", str(tmp_path)]) == 0
    cert = tmp_path / "lacunary_certificate.json"
    assert run(["lacunary", "--symbol", "power(2)", "--verify", str(cert)]) == 0
    assert run(["lacunary", "--symbol", "half_plus"]) == EXIT_ERROR


def test_paley_and_pullback(tmp_path, capsys):
    assert run(["paley", "--powers", "1,2,4,8", "--p", "4", "--trials", "50",
                "--out", str(tmp_path)]) == 0
    assert load(tmp_path / "paley.json")["extra"]["max_exact_deviation"] < 1e-12
    assert run(["pullback", "--symbol", "power(2)", "--arcs", "16", "--pullback-nodes", "4096",
                "--out", str(tmp_path)]) == 0
    assert load(tmp_path / "pullback.json")["lower_bound"]["passed"]


@pytest.mark.parametrize("argv,code", [
    (["classify", "--symbol", "powr(2)"], EXIT_ERROR),
    (["classify", "--symbol", "mobius(1.5)"], EXIT_ERROR),
    (["classify"], EXIT_USAGE),
    (["frobnicate"], EXIT_USAGE),
    (["classify", "--symbol", "identity", "--p", "0.5"], EXIT_ERROR)])
def test_errors(argv, code, capsys):
    assert run(argv + ["--error-json"]) == code
    err = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert err["exit_code"] == code and err["message"]


def test_syntax_error_reports_position(capsys):
    run(["classify", "--symbol", "power(2", "--error-json"])
    err = json.loads(capsys.readouterr().out)
    assert err["error"] == "SymbolSyntaxError" and "position 7" in err["message"]


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "hardycomp.cli", "classify", "--symbol",
                          "const(0.2)"], capture_output=True, text=True)
    assert res.returncode == 0 and "Compact(i)" in res.stdout


def test_documented_examples(tmp_path, capsys):
    assert run(["classify", "--symbol", "half_plus", "--p", "1", "--seed", "7",
                "--trials", "100"]) == 1
    capsys.readouterr()
    assert run(["contact", "--symbol", "power(2)", "--tau", "0.1,0.01"]) == 0
    lines = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("tau=")]
    assert lines == ["tau=0.1 measure=1.000000", "tau=0.01 measure=1.000000"]
    assert run(["paley", "--powers", "2,4,8,16", "--p", "4", "--trials", "100", "--seed", "1",
                "--out", str(tmp_path)]) == 0
    data = load(tmp_path / "paley.json")
    assert 1 - 1e-12 <= data["min"] and data["max"] <= 2 ** 0.25 + 1e-12


def test_thread_count_does_not_change_results(tmp_path):
    for t in ("1", "4"):
        run(["shapiro", "--symbol", "mobius(0.5)", "--rays", "16", "--threads", t,
             "--out", str(tmp_path / t)])
    assert (tmp_path / "1" / "shapiro.json").read_bytes() == \
        (tmp_path / "4" / "shapiro.json").read_bytes()
