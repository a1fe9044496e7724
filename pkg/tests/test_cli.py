import csv
import io
import json

import pytest

from bumpforge.cli import EXIT_FAIL, EXIT_INPUT, EXIT_NOT_APPLICABLE, EXIT_OK, export_slice, main
from bumpforge.errors import SliceOutsideBall

HE = "|z1|^4 + 2*|z1*z2|^2 + |z2|^4"


@pytest.fixture(scope="module")
def he_file(tmp_path_factory, he_cert):
    p = tmp_path_factory.mktemp("certs") / "he.json"
    p.write_text(json.dumps(he_cert.to_json()))
    return p


def _json(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_analyze_h_extendible(capsys):
    code, res = _json(capsys, ["analyze", HE, "--weights", "4,4", "--json"])
    assert code == EXIT_OK
    assert res["classification"]["verdict"] == "H_EXTENDIBLE" and res["curves"] == []


def test_analyze_text_output(capsys):
    assert main(["analyze", "|z2|^8 + |z2|^4*|z1|^2 + |z1|^6", "--weights", "4,8"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "classification: ALMOST_H_EXTENDIBLE" in out and "xi=inf" in out


def test_analyze_infer_weights(capsys):
    code, res = _json(capsys, ["analyze", "|z1|^4 + |z2|^4", "--infer-weights", "--json"])
    assert code == EXIT_OK and res["weights"] == [4, 4]


def test_not_applicable_exit(capsys):
    code, res = _json(capsys, ["analyze", "|z1^2 - z2|^2 + |z2|^4", "--weights", "4,2", "--json"])
    assert code == EXIT_NOT_APPLICABLE
    assert res["classification"]["verdict"] == "NOT_APPLICABLE"
    code, err = _json(capsys, ["bump", "|z1^2 - z2|^2 + |z2|^4", "--weights", "4,2", "--json"])
    assert code == EXIT_NOT_APPLICABLE and err["error"] == "NotApplicable"


@pytest.mark.parametrize("argv", [
    ["analyze", "|z1|^3", "--weights", "4,4"],
    ["analyze", "|z1|^4 + |z2|^4"],
    ["analyze", "|z1|^4 + |z2|^4", "--weights", "four"],
    ["verify", "/nonexistent/cert.json"],
])
def test_input_errors(argv, capsys):
    assert main(argv) == EXIT_INPUT
    assert "error:" in capsys.readouterr().err


def test_parse_error_json(capsys):
    code, err = _json(capsys, ["analyze", "|z1|^3", "--weights", "4,4", "--json"])
    assert code == EXIT_INPUT and err["error"] == "NonPolynomialModulus"


def test_verify_pass_and_fail(he_file, tmp_path, capsys):
    assert main(["verify", str(he_file), "--samples", "5000"]) == EXIT_OK
    assert "verdict: PASS" in capsys.readouterr().out
    bad = json.loads(he_file.read_text())
    bad["domain"]["text"] = "|z1|^4 + |z2|^4"
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad))
    code, rep = _json(capsys, ["verify", str(p), "--samples", "5000", "--json"])
    assert code == EXIT_FAIL
    assert rep["verdict"] == "FAIL"


def test_bump_writes_certificate(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, summary = _json(capsys, ["bump", HE, "--weights", "4,4", "--json", "--out", str(out)])
    assert code == EXIT_OK and summary["out"] == str(out)
    assert json.loads(out.read_text())["schema"] == "bumpforge-cert/1"


def test_slice_ray(he_file, capsys):
    assert main(["slice", str(he_file), "--ray", "1,0.5i", "--resolution", "50"]) == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 50 and set(rows[0]) == {"t", "rho", "G", "rho_minus_G"}
    assert all(float(r["rho_minus_G"]) > 0 for r in rows)


def test_slice_plane_json(he_file, capsys, he_cert):
    e = he_cert.R / 4
    code, rows = _json(capsys, ["slice", str(he_file), "--plane", "1,0;0,1", "--extent", str(e),
                                "--resolution", "11", "--format", "json"])
    assert code == EXIT_OK
    # the origin is dropped from the 11 x 11 grid
    assert len(rows) == 120 and {"a", "b", "G"} <= set(rows[0])


def test_slice_errors(he_file, he_cert, capsys):
    assert main(["slice", str(he_file), "--ray", "0,0"]) == EXIT_INPUT
    assert main(["slice", str(he_file), "--ray", "1,0", "--t-max", str(10 * he_cert.R)]) == EXIT_INPUT
    with pytest.raises(SliceOutsideBall):
        export_slice(he_cert, {"kind": "plane", "u": [1, 0], "v": [0, 1], "extent": 0})
