"""Script language parsing, execution, reports and the console entry point."""

import json
import subprocess
import sys

import pytest

from defpair.cli import (ScriptError, parse_script, render_json, render_text,
                         run, main)


def run_script(text, **kw):
    return run(parse_script(text), **kw)


# -- parsing -----------------------------------------------------------------

def test_parse_single_ring():
    script = parse_script("ring R = QQ[x];")
    assert len(script.items) == 1
    assert script.items[0].kind == "ring"
    assert script.items[0].data["vars"] == ["x"]


def test_parse_module_echo():
    script = parse_script("ring R = QQ[x]; module M over R = coker [[x,0],[0,x^2]];")
    decl = script.items[1]
    assert decl.kind == "module"
    assert len(decl.data["rows"]) == 2


def test_parse_errors_have_positions():
    with pytest.raises(ScriptError) as ei:
        parse_script("ring R = QQ[x]\nmodule M;")
    assert "2:" in str(ei.value) or "at 1" in str(ei.value)
    with pytest.raises(ScriptError, match="duplicate"):
        parse_script("ring R = QQ[x]; ring R = QQ[y];")
    with pytest.raises(ScriptError, match="unknown declaration"):
        parse_script("widget W = 3;")


def test_round_trip_pretty():
    text = ("ring R = QQ[x,y] / (y^2 - x^3);\n"
            "module M over R = coker [[x,0],[0,x^2]];\n"
            "artin A = QQ[e]/(e^2);\n"
            "cmd fitting M;\n"
            "cmd cech-cohomology P1 O(-2);\n")
    script = parse_script(text)
    again = parse_script(script.pretty())
    assert script.pretty() == again.pretty()
    assert [type(i) for i in script.items] == [type(i) for i in again.items]


# -- execution ----------------------------------------------------------------

def test_fitting_pipeline():
    reports = run_script(
        "ring R = QQ[x]; module M over R = coker [[x,0],[0,x^2]]; cmd fitting M;")
    assert reports[0].status == "ok"
    chain = reports[0].payload["fitting"]
    assert chain[0] == ["x^3"]
    assert chain[1] == ["x"]
    assert chain[2] == ["1"]


def test_derpairs_command():
    reports = run_script("ring R = QQ[x]; module M over R = coker [[x^2]];"
                         "cmd derpairs R M;")
    assert reports[0].status == "ok"
    payload = reports[0].payload
    assert payload["exact"]
    assert payload["generators"]


def test_groebner_command():
    reports = run_script("ring R = QQ[x,y]; ideal I in R = (x^2 - 1, x*y - 1);"
                         "cmd groebner I;")
    assert reports[0].status == "ok"
    assert reports[0].payload["basis"]


def test_cech_command():
    reports = run_script("cmd cech-cohomology P1 O(-2);")
    assert reports[0].status == "ok"
    assert reports[0].payload["dims"] == {"h0": 0, "h1": 1}


def test_tspaces_command():
    reports = run_script("cmd t-spaces P1 O(2);")
    assert reports[0].status == "ok"
    assert reports[0].payload["T"]["T0"] == 4
    assert reports[0].payload["les_exact"]


def test_mc_check_abelian():
    text = ("dgla L = abelian (1:1, 2:1);\n"
            "artin A = QQ[e]/(e^2);\n"
            "element x in L deg 1 = zero;\n"
            "cmd mc-check L A x;\n")
    reports = run_script(text)
    assert reports[0].status == "ok"
    assert reports[0].payload["mc"] is True
    assert reports[0].payload["residual"] == ["0"]


def test_mc_check_nonzero_element():
    text = ("dgla L = abelian (1:1, 2:1);\n"
            "artin A = QQ[e]/(e^2);\n"
            "element x in L deg 1 = (e);\n"
            "cmd mc-check L A x;\n")
    reports = run_script(text)
    assert reports[0].payload["mc"] is True  # abelian, zero differential


def test_trace_diagram_command():
    text = ("ring R = QQ[x];\n"
            "complex E over R = [[x^2]] in (-1, 0);\n"
            "cmd trace-diagram-check E;\n")
    reports = run_script(text)
    assert reports[0].status == "ok"
    assert reports[0].payload["passed"] and reports[0].payload["violations"] == 0


def test_prorep_command():
    reports = run_script("dgla L = abelian (0:2, 1:1); cmd prorep L;")
    assert reports[0].payload["satisfied"] is True


def test_unknown_command_is_structured_error():
    reports = run_script("cmd make-coffee now;")
    assert reports[0].status == "error"
    assert "unknown command" in reports[0].payload["message"]


def test_artin_info_and_errors():
    reports = run_script("artin A = QQ[s,t]/(s^2, s*t, t^3); cmd artin-info A;")
    assert reports[0].payload["dim"] == 4
    assert reports[0].payload["index"] == 3
    bad = run_script("artin B = QQ[t]/(t^2 - 1); cmd artin-info B;")
    assert bad[0].status == "error"  # declaration failed
    assert bad[1].status == "error"  # command cannot resolve B


def test_fail_fast():
    text = "cmd nonsense; cmd cech-cohomology P1 O;"
    reports = run(parse_script(text), fail_fast=True)
    assert len(reports) == 1


def test_parallel_matches_sequential():
    text = ("ring R = QQ[x]; module M over R = coker [[x]];"
            "cmd fitting M; cmd resolution M; cmd cech-cohomology P1 O;")
    seq = run(parse_script(text))
    par = run(parse_script(text), parallel=True)
    assert [r.payload for r in seq] == [r.payload for r in par]


# -- rendering ------------------------------------------------------------------

def test_json_determinism():
    text = "ring R = QQ[x]; module M over R = coker [[x,0],[0,x^2]]; cmd fitting M;"
    a = render_json(run_script(text), seed=7)
    b = render_json(run_script(text), seed=7)
    assert a == b
    doc = json.loads(a)
    assert doc["schema"] == "defpair/1"
    assert doc["seed"] == 7
    assert doc["reports"][0]["status"] == "ok"
    assert "time_ms" not in doc["reports"][0]


def test_text_rendering():
    out = render_text(run_script("cmd cech-cohomology P1 Theta;"))
    assert "[ok   ]" in out
    assert "h0" in out


# -- entry point -------------------------------------------------------------------

def test_main_exit_codes(tmp_path):
    good = tmp_path / "good.defpair"
    good.write_text("ring R = QQ[x]; module M over R = coker [[x]]; cmd fitting M;")
    assert main(["run", str(good), "--json"]) == 0
    bad = tmp_path / "bad.defpair"
    bad.write_text("cmd explode;")
    assert main(["run", str(bad)]) == 1
    unparsable = tmp_path / "nope.defpair"
    unparsable.write_text("ring = ;")
    assert main(["run", str(unparsable)]) == 2
    assert main(["run", str(tmp_path / "missing.defpair")]) == 2


def test_console_script_installed():
    out = subprocess.run([sys.executable, "-m", "defpair.cli", "run", "/dev/null"],
                         capture_output=True, text=True)
    assert out.returncode == 0
