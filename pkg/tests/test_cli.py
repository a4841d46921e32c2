import json
import subprocess
import sys

import pytest

from period_engine.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_frobenius_bundled(capsys):
    code, out, _ = run(capsys, "frobenius", "--op", "lpf", "--order", "6")
    assert code == 0
    doc = json.loads(out)
    assert json.dumps(doc)  # plain JSON
    assert "5/9" in out


def test_frobenius_at_infinity(capsys):
    code, out, _ = run(capsys, "frobenius", "--op", "lpf", "--order", "5", "--point", "infinity")
    assert code == 0 and '"1/3"' in out and '"2/3"' in out


def test_mirror_map_gauge(capsys):
    code, out, _ = run(capsys, "mirror-map", "--op", "lpf", "--order", "6", "--gauge-shift", "27")
    assert code == 0
    doc = json.loads(out)
    assert doc["z_of_q"]["coeffs"][:3] == ["0", "27", "-405"]


def test_yukawa(capsys):
    code, out, _ = run(capsys, "yukawa", "--op", "lpf", "--order", "8")
    doc = json.loads(out)
    assert code == 0
    assert doc["algebraic"] == {"num": [1], "den": [1, -1], "exponent": "-1"}
    assert doc["flat"]["coeffs"] == ["1"] + ["0"] * 7


def test_tsv_output(capsys):
    code, out, _ = run(capsys, "yukawa", "--op", "lk3", "--order", "4", "--format", "tsv")
    assert code == 0
    rows = dict(line.split("\t") for line in out.splitlines())
    assert rows["algebraic.exponent"] == "-2"


def test_prepotential_file(tmp_path, capsys):
    f = tmp_path / "c.json"
    f.write_text(json.dumps({"exponent": "0", "order": 5, "coeffs": ["5", "1", "0", "27", "0"]}))
    code, out, _ = run(capsys, "prepotential", "--in", str(f))
    doc = json.loads(out)
    assert code == 0 and doc["kappa"] == "5" and doc["instanton"]["coeffs"] == ["0", "1", "0", "1", "0"]
    code, _, err = run(capsys, "prepotential", "--in", str(f), "--kappa", "4")
    assert code == 3 and json.loads(err)["error"] == "NonzeroConstantMismatch"


def test_symsq(capsys):
    code, out, _ = run(capsys, "symsq", "--op", "ltri", "--construct")
    assert code == 0 and json.loads(out)["theta_coeffs"][0] == [0, -3]
    code, out, _ = run(capsys, "symsq", "--op", "lk3", "--detect")
    assert code == 0 and json.loads(out)["symmetric_square"] is True
    code, _, err = run(capsys, "symsq", "--op", "lpf", "--detect")
    assert code == 3 and json.loads(err)["kind"] == "math"


def test_pullback(capsys):
    code, out, _ = run(capsys, "pullback", "--op", "lpf", "--subst", "affine:-1,1")
    assert code == 0 and json.loads(out)["theta_coeffs"] == [[0, -2], [0, -9], [9, -9]]
    code, _, err = run(capsys, "pullback", "--op", "lpf", "--subst", "spline")
    assert code == 2 and json.loads(err)["kind"] == "schema"


def test_monodromy_around(capsys):
    code, out, _ = run(capsys, "monodromy", "--op", "lpf", "--around", "0", "--precision", "20")
    doc = json.loads(out)
    assert code == 0
    assert float(doc["matrix"][1][0][0]) == pytest.approx(1)
    assert float(doc["determinant_residual"]) < 1e-15


def test_monodromy_path_file(tmp_path, capsys):
    f = tmp_path / "loop.json"
    f.write_text(json.dumps({"vertices": [["1/2", 0], [0, "1/2"], ["-1/2", 0], [0, "-1/2"], ["1/2", 0]]}))
    code, out, _ = run(capsys, "monodromy", "--op", "lpf", "--in", str(f), "--precision", "20")
    assert code == 0 and float(json.loads(out)["matrix"][1][0][0]) == pytest.approx(1)


def test_fricke_check(capsys):
    code, out, _ = run(capsys, "fricke-check", "--op", "lpf", "--alpha", "1/3", "--precision", "20")
    doc = json.loads(out)
    assert code == 0 and doc["gauge_shift"] == "27" and float(doc["checks"][0]["residual"]) < 1e-15


def test_cayley(capsys):
    code, out, _ = run(capsys, "cayley", "--op", "lpf", "--precision", "20")
    doc = json.loads(out)
    assert code == 0
    assert float(doc["tau_star"][0]) == pytest.approx(0.5)
    assert float(doc["tau_star"][1]) == pytest.approx(0.28867513459481287)


def test_toric(capsys):
    code, out, _ = run(capsys, "toric", "polar", "--in", "p2")
    assert code == 0 and json.loads(out)["vertices"] == [[-1, -1], [1, 0], [0, 1]]
    code, out, _ = run(capsys, "toric", "points", "--in", "p2")
    assert json.loads(out)["count"] == 10
    code, out, _ = run(capsys, "toric", "sections", "--in", "p2", "--rays", "[[1,0],[0,1],[-1,-1]]")
    assert "z1*z2*z3" in out
    code, _, err = run(capsys, "toric", "sections", "--in", "p2", "--rays", "[[1,1]]")
    assert code == 3 and json.loads(err)["error"] == "RaysMismatch"


def test_identity_suite_subset(capsys):
    code, out, _ = run(capsys, "identity-suite", "--name", "clausen", "--name", "toric")
    assert code == 0
    assert out.splitlines()[-1] == "2/2 passed"


def test_identity_suite_failure_exit(capsys):
    code, out, _ = run(capsys, "identity-suite", "--name", "j-expansion", "--format", "json")
    assert code == 3 and json.loads(out)["passed"] == 0


@pytest.mark.parametrize("argv", [
    ["frobenius", "--op", "nope.json"],
    ["frobenius", "--op", "lpf", "--order", "2"],
    ["monodromy", "--op", "lpf", "--precision", "8"],
    ["identity-suite", "--name", "bogus"],
    ["fricke-check", "--op", "lpf", "--alpha", "0.5"],
])
def test_schema_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and json.loads(err)["kind"] == "schema"


def test_bad_operator_file(tmp_path, capsys):
    f = tmp_path / "op.json"
    f.write_text("{not json")
    code, _, err = run(capsys, "yukawa", "--op", str(f))
    assert code == 2


def test_out_file(tmp_path, capsys):
    target = tmp_path / "o.json"
    code, out, _ = run(capsys, "toric", "points", "--in", "p2dual", "--out", str(target))
    assert code == 0 and out == "" and json.loads(target.read_text())["count"] == 4


def test_deterministic(capsys):
    a = run(capsys, "mirror-map", "--op", "lk3", "--order", "8")[1]
    b = run(capsys, "mirror-map", "--op", "lk3", "--order", "8")[1]
    assert a == b


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "period_engine", "toric", "points", "--in", "p2"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["count"] == 10
