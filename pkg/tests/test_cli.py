import csv
import io
import json

import pytest

from minkowski_lab import __version__
from minkowski_lab.cli import dispatch


def _run(capsys, *argv):
    code = dispatch(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _csv_rows(text):
    body = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_qm_eval(capsys):
    code, out, _ = _run(capsys, "qm", "eval", "0.5")
    assert code == 0 and float(out) == 0.5
    code, out, _ = _run(capsys, "qm", "eval", "1/3")
    assert code == 0 and float(out) == 0.25


def test_qm_inverse_and_cf(capsys):
    code, out, _ = _run(capsys, "qm", "inverse", "0.25")
    assert code == 0 and out.split()[1] == "1/3"
    code, out, _ = _run(capsys, "qm", "cf", "7/10")
    assert code == 0 and out.strip() == "[0; 1, 2, 3]"
    code, out, _ = _run(capsys, "qm", "cf", "0.3")
    assert code == 0 and out.strip() == "[0; 3, 3]"
    code, out, _ = _run(capsys, "qm", "cf", "0.3", "--float")
    assert code == 0 and out.strip().startswith("[0; 3, 2, 1, ") and out.strip().endswith("...]")


def test_coeffs_csv_header(capsys):
    code, out, _ = _run(capsys, "coeffs", "--max-n", "8")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == f"# minkowski-lab {__version__}"
    assert lines[1].startswith("# config: ")
    rows = _csv_rows(out)
    assert rows[0]["n"] == "0" and float(rows[0]["d_n"]) == 1.0
    assert float(rows[1]["d_n"]) == pytest.approx(-0.36987418271425593, abs=1e-12)


def test_coeffs_json_to_file(tmp_path, capsys):
    path = tmp_path / "d.jsonl"
    code, out, _ = _run(capsys, "coeffs", "--max-n", "4", "--format", "json", "--out", str(path))
    assert code == 0 and "5 coefficients" in out
    lines = path.read_text().splitlines()
    assert json.loads(lines[0])["header"]["version"] == __version__
    assert [json.loads(ln)["n"] for ln in lines[1:]] == [0, 1, 2, 3, 4]


def test_transform(capsys):
    code, out, _ = _run(capsys, "transform", "--t", "0,6.283185307179586", "--format", "json")
    row = json.loads(out.splitlines()[1])
    assert code == 0 and row["m_re"] == pytest.approx(-0.36987418271425593, abs=1e-11)


def test_verify_bessel_passes(capsys):
    code, out, _ = _run(capsys, "verify", "bessel", "--x", "1", "--s", "2", "--eta", "0.05")
    assert code == 0 and _csv_rows(out)[0]["pass"] == "PASS"


def test_verify_symmetry(capsys):
    code, out, _ = _run(capsys, "verify", "symmetry", "--t", "3", "--format", "json")
    assert code == 0 and json.loads(out.splitlines()[1])["pass"] == "PASS"


def test_oscillatory_p(capsys):
    code, out, _ = _run(capsys, "oscillatory", "p", "--a", "1", "--b", "100", "--tol", "1e-12")
    row = _csv_rows(out)[0]
    assert code == 0 and float(row["P"]) == pytest.approx(-0.016432193152735107, abs=1e-12)
    assert "stationary_phase" in row


def test_lemma_scan_jobs_agree(capsys):
    args = ["lemma", "scan", "--a-grid", "0,1", "--b-grid=-50,10,200"]
    _, serial, _ = _run(capsys, *args)
    _, parallel, _ = _run(capsys, *args, "--jobs", "2")
    strip = lambda t: [ln for ln in t.splitlines() if not ln.startswith("# config")]
    assert strip(serial) == strip(parallel)
    assert "empirical_C_pos=" in serial


def test_usage_errors(capsys):
    assert _run(capsys, "qm", "eval", "abc")[0] == 2
    assert _run(capsys, "nonsense")[0] == 2
    assert _run(capsys, "lemma", "scan", "--b-grid", "1,2")[0] == 2
    assert _run(capsys, "qm", "eval", "5/3")[0] == 2


def test_budget_error_exit_code(capsys):
    code, _, err = _run(capsys, "appendix", "scan", "--windows", "10", "--bits", "64")
    assert code == 3 and "error" in err


def test_suite_subset(capsys):
    code, out, _ = _run(capsys, "suite", "--only", "3,12")
    assert code == 0
    assert sum(ln.startswith("[PASS]") for ln in out.splitlines()) == 2
