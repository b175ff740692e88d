import json

from click.testing import CliRunner

from most.cli import main

from helpers import CORPUS


def run(*args, env=None):
    return CliRunner().invoke(main, [str(a) for a in args], env={"MOST_COLOR": "never", **(env or {})})


def test_check_ok_and_exit_codes():
    r = run("check", CORPUS / "ex62.most")
    assert r.exit_code == 0
    assert "relay" in r.output and "I close a ; O close c" in r.output
    assert run("check", CORPUS / "id.most").exit_code == 1


def test_check_proc_and_json():
    r = run("check", CORPUS / "ex62.most", "--proc", "relay", "--json")
    data = json.loads(r.output)
    assert data["schema"] == 1 and data["ok"]
    [d] = data["declarations"]
    assert d["traces"][0]["text"] == "I close a ; O close c"


def test_json_is_byte_stable():
    a = run("check", CORPUS / "doubleneg_spec1.most", "--json").output
    b = run("check", CORPUS / "doubleneg_spec1.most", "--json", "--parallel").output
    assert a == b


def test_derivation_output():
    r = run("check", CORPUS / "ex62.most", "--derivation")
    for rule in ("New", "Par", "STFoc-L", "RTu-L", "STFoc-R", "Red-RTu", "RTu-R"):
        assert rule in r.output
    data = json.loads(run("check", CORPUS / "ex62.most", "--derivation", "--json").output)
    assert data["declarations"][0]["derivation"]["rule"] == "New"


def test_rejection_shows_witnesses():
    r = run("check", CORPUS / "ex61.most", "--proc", "PQ")
    assert r.exit_code == 1
    assert "ConstraintIncompatible" in r.output
    assert "witness: I a.1 ; O b.0 ; I close a ; O close b" in r.output


def test_traces_and_spec_traces():
    r = run("traces", CORPUS / "comp.most", "--proc", "comp")
    assert "S chan a [b] ; S close a ; S close b ; O close c" in r.output
    r = run("spec-traces", CORPUS / "specs.most", "--proc", "bothClosed", "--json")
    assert len(json.loads(r.output)["declarations"][0]["traces"]) == 2


def test_limit_is_reported():
    r = run("spec-traces", CORPUS / "specs.most", "--proc", "negAmbient", "--limit", "3", "--json")
    assert r.exit_code == 1
    assert json.loads(r.output)["declarations"][0]["error"]["kind"] == "ResourceLimit"


def test_verify():
    r = run("verify", CORPUS / "doubleneg_spec1.most")
    assert r.exit_code == 0
    r = run("verify", CORPUS / "auction.most", "--proc", "BidsZero", "--json")
    d = json.loads(r.output)["declarations"][0]
    assert d["status"] == "fail"
    assert not d["checks"]["erasure_equals_denotation"]
    assert d["checks"]["within_specification"]


def test_usage_and_parse_errors(tmp_path):
    assert run("check", CORPUS / "ex62.most", "--proc", "nope").exit_code == 2
    assert run("check", tmp_path / "missing.most").exit_code == 2
    bad = tmp_path / "bad.most"
    bad.write_text("proc p () |- a : 1 = close")
    r = run("check", bad)
    assert r.exit_code == 2
    r = run("check", bad, "--json")
    assert json.loads(r.output)["error"]["kind"] == "ParseError"


def test_strict_flag():
    assert run("check", CORPUS / "auction.most", "--proc", "BidsZero").exit_code == 0
    r = run("check", CORPUS / "auction.most", "--proc", "BidsZero", "--strict")
    assert r.exit_code == 1 and "UncoveredBehaviour" in r.output
