import json
import subprocess
import sys

import jsonschema
import pytest

from symfind.analysis import load_schema
from symfind.cli import EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USER, bundled_models, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def analyze_json(capsys, tmp_path, name, *extra):
    path = tmp_path / f"{name}.json"
    code, out, _ = run(capsys, "analyze", name, "--json", str(path), "--no-timestamp", *extra)
    assert code == EXIT_OK
    return json.loads(path.read_text()), out


def test_bundled_models_are_listed():
    assert {"goodwin", "mammillary4", "llw1987", "seirq", "signflip"} <= set(bundled_models())


def test_parse_prints_canonical_form(capsys):
    code, out, _ = run(capsys, "parse", "goodwin")
    assert code == EXIT_OK
    assert "X" in out and "k1" in out


def test_parse_json_to_stdout(capsys):
    code, out, _ = run(capsys, "parse", "mammillary4", "--json", "-")
    data = json.loads(out)
    assert code == EXIT_OK and len(data["states"]) == 4


def test_detsys_command(capsys):
    code, out, _ = run(capsys, "detsys", "decay", "--ansatz")
    assert code == EXIT_OK and "algebraic system" in out
    code, out, _ = run(capsys, "detsys", "llw1987", "--infinitesimal", "--ansatz")
    assert code == EXIT_OK and "linear system" in out


def test_missing_model_is_a_user_error(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", str(tmp_path / "nope.sfm"))
    assert code == EXIT_USER and "not found" in err


def test_malformed_model_is_a_user_error(capsys, tmp_path):
    bad = tmp_path / "bad.sfm"
    bad.write_text("states: x\nd/dt x = x +\n")
    assert run(capsys, "parse", str(bad))[0] == EXIT_USER


def test_bad_option_is_a_user_error(capsys):
    assert run(capsys, "analyze", "goodwin", "--fix-param", "zzz")[0] == EXIT_USER
    assert run(capsys, "analyze", "goodwin", "--max-steps", "0")[0] == EXIT_USER


def test_step_ceiling_is_inconclusive(capsys):
    code, out, _ = run(capsys, "analyze", "goodwin", "--max-steps", "1")
    assert code == EXIT_INCONCLUSIVE
    assert "inconclusive" in out


def test_report_matches_schema(capsys, tmp_path):
    schema = load_schema()
    for name in ("goodwin", "llw1987", "seirq"):
        extra = ("--fix-param", "gamma", "--remove-state", "R") if name == "seirq" else ()
        data, _ = analyze_json(capsys, tmp_path, name, *extra)
        jsonschema.validate(data, schema)


def test_no_timestamp_is_deterministic(capsys, tmp_path):
    a, _ = analyze_json(capsys, tmp_path, "mammillary4")
    b, _ = analyze_json(capsys, tmp_path, "mammillary4")
    assert "timestamp" not in a and a == b


def test_report_contents(capsys, tmp_path):
    d, out = analyze_json(capsys, tmp_path, "mammillary4")
    assert d["discrete"]["order"] == 6 and d["discrete"]["group_name"] == "S3"
    assert "verification: pass" in out
    d, _ = analyze_json(capsys, tmp_path, "goodwin")
    assert d["discrete"]["order"] == 8 and d["discrete"]["group_name"] == "C4xC2"
    d, _ = analyze_json(capsys, tmp_path, "llw1987")
    assert d["continuous"]["dimension"] >= 1
    assert d["discrete"]["zero_dimensional"] is False


def test_biological_flags(capsys, tmp_path):
    d, _ = analyze_json(capsys, tmp_path, "goodwin", "--positive")
    kept = set(d["biological"]["kept"])
    assert kept == {"g0", "g3"}
    assert d["biological"]["verdicts"]["params"]["k1"]["verdict"] == "global"


def test_verify_round_trip_and_tampering(capsys, tmp_path):
    data, _ = analyze_json(capsys, tmp_path, "goodwin")
    good = tmp_path / "goodwin.json"
    code, out, _ = run(capsys, "verify", "goodwin", str(good))
    assert code == EXIT_OK and "FAIL" not in out

    (el,) = [e for e in data["discrete"]["elements"] if e["id"] == "g3"]
    el["params"]["k2"] = "k2"
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", "goodwin", str(bad))
    assert code == EXIT_FAIL and "state:Y" in out


def test_verify_reduced_model_report(capsys, tmp_path):
    analyze_json(capsys, tmp_path, "seirq", "--fix-param", "gamma", "--remove-state", "R")
    code, _, _ = run(capsys, "verify", "seirq", str(tmp_path / "seirq.json"))
    assert code == EXIT_OK


def test_verify_unreadable_report(capsys, tmp_path):
    assert run(capsys, "verify", "goodwin", str(tmp_path / "missing.json"))[0] == EXIT_USER


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "symfind.cli", "analyze", "decay"], capture_output=True, text=True)
    assert r.returncode == 0 and "discrete symmetries: 1" in r.stdout


@pytest.mark.parametrize("name", ["signflip", "goodwin_m3"])
def test_specialize_flag_keeps_the_count(capsys, tmp_path, name):
    a, _ = analyze_json(capsys, tmp_path, name)
    b, _ = analyze_json(capsys, tmp_path, name, "--specialize", "--seed", "3")
    assert a["discrete"]["order"] == b["discrete"]["order"]
