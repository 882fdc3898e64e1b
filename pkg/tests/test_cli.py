import json
import shutil
import subprocess
import sys
from importlib import resources

import pytest

from ahweights.cli import RunConfig, SchemaError, build_table, main, run


def invoke(capsys, *argv):
    status = main(list(argv))
    return status, json.loads(capsys.readouterr().out)


def test_weights_example(capsys):
    status, doc = invoke(capsys, "weights", "--p", "3", "--f", "2", "--sig", "1,3", "--class", "zero")
    assert status == 0
    assert doc["weights"] == ["[0,0;1,3]", "[1,2;1,1]", "[1,2;3,3]", "[2,0;3,1]"]


def test_weights_f1_kind_and_twist(capsys):
    _, doc = invoke(capsys, "weights", "--p", "5", "--sig", "3", "--class", "nonsplit")
    assert doc["weights"] == ["[0;3]"]
    _, doc = invoke(capsys, "weights", "--p", "5", "--sig", "3", "--class", "nonsplit", "--twist", "1")
    assert doc["weights"] == ["[1;3]"]


def test_irreducible_weights(capsys):
    _, doc = invoke(capsys, "weights", "--p", "3", "--f", "2", "--exponent", "5")
    assert doc["weights"] == ["[0,0;2,1]", "[0,1;1,2]", "[1,1;2,1]", "[1,2;1,2]"]


def test_filtration_admissible_mu(capsys):
    _, doc = invoke(capsys, "filtration", "--p", "3", "--sig", "1,3")
    assert doc["filtration"]["jumps"] == {"5/4": 1, "9/4": 1}
    _, doc = invoke(capsys, "admissible", "--p", "3", "--sig", "1,3")
    assert doc["admissible"] == [[], [0], [0, 1]]
    _, doc = invoke(capsys, "mu", "--p", "3", "--sig", "1,3", "--J", "1")
    assert doc["mu"] == [0]


def test_usage_errors(capsys):
    status, doc = invoke(capsys, "weights", "--sig", "1,3")
    assert status == 2 and doc["error"] == "SchemaError"
    status, doc = invoke(capsys, "weights", "--p", "3", "--sig", "1,9")
    assert status == 2 and doc["error"] == "BadSignature"
    status, _ = invoke(capsys, "class-from-norms", "--fixture", "missing.json")
    assert status == 2


def test_config_file_is_strict(tmp_path, capsys):
    good = tmp_path / "run.json"
    good.write_text(json.dumps({"command": "weights", "p": 3, "sig": "1,3", "cls": "zero"}))
    status, doc = invoke(capsys, "--config", str(good))
    assert status == 0 and len(doc["weights"]) == 4
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"command": "weights", "p": 3, "colour": "red"}))
    status, doc = invoke(capsys, "--config", str(bad))
    assert status == 2 and "colour" in doc["message"]
    with pytest.raises(SchemaError):
        RunConfig.from_dict({"command": "nope"})


def test_output_file(tmp_path, capsys):
    out = tmp_path / "w.json"
    assert main(["weights", "--p", "3", "--sig", "2", "--class", "split", "--output", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["weights"] == ["[0;2]"]


def test_class_from_norms(capsys):
    status, doc = invoke(capsys, "class-from-norms", "--fixture", "ib2.json")
    assert status == 0
    assert doc["weights"] == ["[1,1;2,1]", "[1,2;1,2]"]
    assert doc["memberships"] == {"L_0": True, "L_1": False}


def test_precision_failure_exit_code(capsys):
    status, doc = invoke(capsys, "class-from-norms", "--fixture", "ia.json", "--N", "2")
    assert status == 3 and doc["error"] == "PrecisionExceeded"


def test_fixture_directory_override(tmp_path, monkeypatch, capsys):
    src = resources.files("ahweights") / "fixtures" / "ia.json"
    data = json.loads(src.read_text())
    data["expected"]["weights"] = ["[0,0;1,1]"]
    (tmp_path / "ia.json").write_text(json.dumps(data))
    monkeypatch.setenv("AHWEIGHTS_FIXTURES", str(tmp_path))
    monkeypatch.chdir(tmp_path.parent)
    status, doc = invoke(capsys, "class-from-norms", "--fixture", "ia.json")
    assert status == 1 and doc["diagnosis"].startswith("mismatch")


def test_open_fixture_is_not_judged(tmp_path, capsys):
    path = tmp_path / "open.json"
    path.write_text(json.dumps({"label": "X", "expected": "open"}))
    status, doc = invoke(capsys, "class-from-norms", "--fixture", str(path))
    assert status == 0 and doc["status"] == "open"


def test_norm_membership(capsys):
    status, doc = invoke(capsys, "norm-membership", "--fixture", "iiib1.json", "--level", "5")
    assert status == 0 and doc["all"] and doc["index"] == 9
    _, doc = invoke(capsys, "norm-membership", "--fixture", "ia.json", "--level", "5", "--a", "a")
    assert doc["rows"] == [{"a": "a^1", "in_norm_group": False}]


def test_match_hecke(tmp_path, capsys):
    status, doc = invoke(capsys, "match-hecke")
    assert status == 0 and doc["passed"] == 157
    rows = tmp_path / "rows.json"
    rows.write_text(json.dumps([{"a": "a^2", "d": "1", "N": 7, "expect": "5A", "name": "bad"}]))
    status, doc = invoke(capsys, "match-hecke", "--input", str(rows))
    assert status == 1 and doc["failed"] == 1


def test_verify_lemmas(capsys):
    status, doc = invoke(capsys, "verify-lemmas", "--p", "3", "--f", "1")
    assert status == 0 and doc["all_pass"]


def test_replay_tables_match_goldens(capsys):
    status, doc = invoke(capsys, "replay-tables")
    assert status == 0
    assert all(not v["diff"] and not v["internal_failures"] for v in doc.values())


def test_replay_detects_drift(tmp_path, monkeypatch, capsys):
    import ahweights.cli as cli

    golden = tmp_path / "qp.json"
    rows = build_table("qp")
    rows[0]["weights"] = []
    golden.write_text(json.dumps(rows))
    monkeypatch.setattr(cli, "_golden_path", lambda name: tmp_path / f"{name}.json")
    status, doc = invoke(capsys, "replay-tables", "--table", "qp")
    assert status == 1 and doc["qp"]["diff"][0]["row"] == 0


def test_run_returns_status_and_document():
    status, doc = run(RunConfig("weights", p=3, sig="1,3", cls="generic"))
    assert status == 0 and doc["weights"]


def test_console_script():
    exe = shutil.which("ahweights")
    cmd = [exe] if exe else [sys.executable, "-m", "ahweights.cli"]
    proc = subprocess.run(cmd + ["weights", "--p", "3", "--f", "2", "--sig", "1,3", "--class", "zero"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert len(json.loads(proc.stdout)["weights"]) == 4
