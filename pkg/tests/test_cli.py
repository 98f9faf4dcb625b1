"""CLI behavior: commands, exit codes, report schema, determinism."""

import json

from lgtoric.cli import dumps_report, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_info(capsys):
    code, out, _ = run(capsys, "info", "--model", "cpn(2)")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == 1
    assert rep["sections"]["rank"] == 3
    assert len(rep["sections"]["facets"]) == 3
    assert rep["sections"]["primitive_collections"][0]["omega"] == "1"


def test_potential_csv_f2(capsys):
    code, out, _ = run(capsys, "potential", "--model", "f2(1/4)",
                       "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "powers,coeff"
    assert len(lines) == 5  # header + 4 monomial rows
    two_term = [l for l in lines if l.count("T^") == 2]
    assert len(two_term) == 1 and "0;-1" in two_term[0]


def test_critical_command(capsys):
    code, out, _ = run(capsys, "critical", "--model", "cpn(2)", "--seed", "7")
    assert code == 0
    rep = json.loads(out)
    assert rep["sections"]["count"] == 3
    assert rep["sections"]["interior_count"] == 3
    pt = rep["sections"]["points"][0]
    assert pt["valuation"] == ["1/3", "1/3"]
    assert pt["interior"] and pt["nondegenerate"]


def test_critical_with_lift(capsys):
    code, out, _ = run(capsys, "critical", "--model", "cpn(1)",
                       "--cutoff", "2")
    assert code == 0
    rep = json.loads(out)
    lifted = rep["sections"]["points"][0]["lifted"]
    assert lifted is not None and "T^(1/2)" in lifted[0]


def test_residue_and_ztrace(capsys):
    code, out, _ = run(capsys, "residue", "--model", "cpn(2)")
    assert code == 0
    rep = json.loads(out)
    assert all(v["pass"] for v in rep["verdicts"])
    code, out, _ = run(capsys, "z-trace", "--model", "blowup_cp2")
    assert code == 0
    rep = json.loads(out)
    names = {v["name"] for v in rep["verdicts"]}
    assert "ztrace.sum_formula" in names


def test_qsr_command(capsys):
    code, out, _ = run(capsys, "qsr", "--model", "s2xs2(0)")
    assert code == 0
    rep = json.loads(out)
    assert any("Z1*Z3" in r for r in rep["sections"]["relations"])


def test_c1check_command(capsys):
    code, out, _ = run(capsys, "c1check", "--model", "f2", "--alpha", "1/4")
    assert code == 0
    rep = json.loads(out)
    assert all(v["pass"] for v in rep["verdicts"])


def test_verify_single_model(capsys):
    code, out, _ = run(capsys, "verify", "--model", "blowup_cp2")
    assert code == 0
    rep = json.loads(out)
    names = {v["name"] for v in rep["verdicts"]}
    assert "blowup_cp2.count_equals_rank" in names
    assert "blowup_cp2.sum_formula" in names
    assert "blowup_cp2.z_closed_form" in names
    assert all(v["pass"] for v in rep["verdicts"])


def test_usage_errors(capsys):
    assert run(capsys, "verify", "--model", "nope!")[0] == 2
    assert run(capsys, "critical", "--model", "cpn(2)", "--input", "x.json")[0] == 2
    assert run(capsys, "critical")[0] == 2
    assert run(capsys, "frobnicate", "--model", "cpn(2)")[0] == 2


def test_custom_potential_input(tmp_path, capsys):
    doc = {
        "dim": 2,
        "terms": [
            {"powers": [1, 0], "coeff": "(1,0)"},
            {"powers": [0, 1], "coeff": "(1,0)"},
            {"powers": [1, 1], "coeff": "(1,0)"},
            {"powers": [-1, -1], "coeff": "(1,0)*T^(1)"},
        ],
    }
    path = tmp_path / "po.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "critical", "--input", str(path),
                       "--starts", "240", "--seed", "5")
    assert code == 0
    rep = json.loads(out)
    assert rep["sections"]["count"] == 4
    assert rep["sections"]["interior_count"] == 3
    vals = [p["valuation"] for p in rep["sections"]["points"]]
    assert ["0", "0"] in vals


def test_report_round_trip(capsys):
    _, out, _ = run(capsys, "verify", "--model", "cpn(1)", "--seed", "3")
    rep = json.loads(out)
    assert dumps_report(rep) + "\n" == out


def test_same_seed_byte_identical(capsys):
    _, out1, _ = run(capsys, "verify", "--model", "cpn(2)", "--seed", "9")
    _, out2, _ = run(capsys, "verify", "--model", "cpn(2)", "--seed", "9")
    assert out1 == out2


def test_model_document_input(tmp_path, capsys):
    doc = {
        "name": "p1xp1",
        "dim": 2,
        "facets": [
            {"normal": [1, 0], "lambda": "0"},
            {"normal": [0, 1], "lambda": "0"},
            {"normal": [-1, 0], "lambda": "-1"},
            {"normal": [0, -1], "lambda": "-1"},
        ],
    }
    path = tmp_path / "model.json"
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "critical", "--input", str(path))
    assert code == 0
    assert json.loads(out)["sections"]["count"] == 4
