import json

import pytest

from sogopacity.cli import main
from sogopacity.io import dumps


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name, expected", [("br", 0), ("fog", 0), ("cpr", 1), ("cpub", 0), ("app", 1)])
@pytest.mark.parametrize("variant", ["simple", "kweak", "kstrong"])
def test_check_exit_codes(capsys, name, expected, variant):
    code, out, _ = run(capsys, "check", f"corpus:{name}", "--variant", variant, "-k", "1")
    assert code == expected
    doc = json.loads(out)
    assert doc["opaque"] == (expected == 0)
    assert doc["k"] == (0 if variant == "simple" else 1)


def test_check_cpr_reports_two_counterexamples(capsys):
    code, out, _ = run(capsys, "check", "corpus:cpr")
    assert code == 1
    assert len(json.loads(out)["counterexamples"]) == 2


def test_check_text_format(capsys):
    code, out, _ = run(capsys, "check", "corpus:cpr", "--format", "text")
    assert "NOT opaque" in out and "T7! T13? T16! T18?" in out


def test_enforce_then_check_and_validate(capsys, tmp_path):
    target = tmp_path / "cpr.fixed.json"
    code, out, _ = run(capsys, "enforce", "corpus:cpr", "-o", str(target))
    assert code == 0
    report = json.loads((tmp_path / "cpr.fixed.patch.json").read_text())
    assert report["verdict_after"] == {"opaque": True}
    assert len(report["new_transitions"]) == 2
    assert report["k_step"]["before"] == {"k_weak": False, "k_strong": False}
    assert run(capsys, "check", str(target))[0] == 0
    assert run(capsys, "validate", str(target))[0] == 0


def test_enforce_already_opaque(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SOGOPACITY_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "enforce", "corpus:fog", "--format", "text")
    assert code == 1 and "identity patch" in out
    report = json.loads((tmp_path / "fog.opacified.patch.json").read_text())
    assert report["new_transitions"] == [] and "note" in report
    original = run(capsys, "check", "corpus:fog")[1]
    assert run(capsys, "check", str(tmp_path / "fog.opacified.json"))[1] == original


def test_enforce_lts_model(capsys, tmp_path):
    model = tmp_path / "m.json"
    model.write_text(dumps({
        "states": ["q0", "q1"], "initial": "q0",
        "events": [{"id": "o", "observable": True}],
        "edges": [{"from": "q0", "event": "o", "to": "q1"}],
        "secret_states": ["q1"],
    }))
    assert run(capsys, "check", str(model))[0] == 1
    assert run(capsys, "enforce", str(model), "-o", str(tmp_path / "out.json"))[0] == 0
    assert run(capsys, "check", str(tmp_path / "out.json"))[0] == 0
    code, _, err = run(capsys, "validate", str(model))
    assert code == 2 and "needs a net" in err


def test_export_dot_writes_two_files(capsys, tmp_path):
    code, _, _ = run(capsys, "export-dot", "corpus:fog", "-o", str(tmp_path))
    assert code == 0
    assert (tmp_path / "fog.sog.dot").read_text().startswith('digraph "fog SOG"')
    assert (tmp_path / "fog.lts.dot").exists()


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", "corpus:cpr", "-k", "0", "--oracle-depth", "12")
    simple = {tuple(d["trace"]) for d in json.loads(out) if d["variant"] == "simple"}
    assert code == 0 and simple == {("T7", "T13", "T16", "T18"), ("T7", "T13", "T19", "T21")}


def test_errors_exit_2_and_name_the_culprit(capsys, tmp_path):
    code, _, err = run(capsys, "check", str(tmp_path / "missing.json"))
    assert code == 2 and "missing.json" in err
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"places": [], "transitions": [], "arcs": [], "initial_marking": {}, "oops": 1}))
    code, _, err = run(capsys, "check", str(bad))
    assert code == 2 and "bad.json: $.oops: unknown field" in err
    code, _, err = run(capsys, "check", "corpus:nothing")
    assert code == 2 and "nothing" in err


def test_bad_arguments_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["check", "corpus:fog", "-k", "-1"])
    assert exc.value.code == 2
