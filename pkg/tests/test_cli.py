import json

import pytest

from netcoh.cli import ParseError, ValidationError, emit, main, parse_report, parse_scenario, run

MINIMAL = '{"window": [0, 4], "step": 1, "posetKind": "D", "seed": 5, "checks": [{"kind": "z0"}]}'
AA_VA = {"kind": "condition-aa", "params": {"tag": "Va", "window": [0, 4], "step": 1, "count": 1}}


def scenario(*checks, **kw):
    doc = {"window": ["-2", "2"], "step": "1/2", "posetKind": "D", "seed": 3, "checks": list(checks)}
    doc.update(kw)
    return json.dumps(doc, indent=2)


def test_parse_minimal():
    sc = parse_scenario(MINIMAL)
    assert sc.window == (0, 4) and sc.step == 1 and sc.poset_kind == "D" and sc.seed == 5
    assert [c.kind for c in sc.checks] == ["z0"]


def test_unknown_kind_points_at_the_token():
    text = scenario({"kind": "haag-duality"}, {"kind": "haag-dualty"})
    with pytest.raises(ParseError) as e:
        parse_scenario(text)
    line = text.splitlines()[e.value.line - 1]
    assert "haag-dualty" in str(e.value)
    assert line[e.value.column - 1:].startswith("haag-dualty")


def test_malformed_json_has_a_position():
    with pytest.raises(ParseError) as e:
        parse_scenario('{"window": [0, 4],\n  "checks": [}')
    assert e.value.line == 2


def test_validation_errors():
    with pytest.raises(ValidationError):
        parse_scenario(scenario({"kind": "flip-check"}, window=["0", "2"]))
    with pytest.raises(ValidationError):
        parse_scenario(scenario({"kind": "z0"}, step="3/4"))
    with pytest.raises(ValidationError):
        parse_scenario(scenario({"kind": "z0"}, window=[0.5, 2]))
    parse_scenario(scenario({"kind": "flip-check", "params": {"window": ["-1", "1"]}}, window=["0", "2"]))


def test_empty_check_list():
    rep = run(parse_scenario(scenario()))
    assert rep.ok and rep.summary == {"total": 0, "pass": 0, "fail": 0, "skipped": 0, "status": "pass"}


def test_failing_check_is_an_entry_with_witness():
    rep = run(parse_scenario(scenario(AA_VA)))
    (c,) = rep.checks
    assert c.status == "fail" and c.witness and not rep.ok
    expected = dict(AA_VA, params=dict(AA_VA["params"], expect="fails"))
    assert run(parse_scenario(scenario(expected))).ok


def test_report_round_trip_and_csv():
    rep = run(parse_scenario(scenario({"kind": "z0", "params": {"window": [0, 3], "step": 1}}, {"kind": "poset-facts"}, AA_VA)))
    text = emit(rep, "json")
    back = parse_report(text)
    assert emit(back, "json") == text
    assert "." not in "".join(t for t in _numbers(json.loads(text)))
    rows = emit(rep, "csv").strip().splitlines()
    assert len(rows) == len(rep.checks) + 1


def _numbers(x):
    if isinstance(x, float):
        yield repr(x)
    elif isinstance(x, dict):
        for v in x.values():
            yield from _numbers(v)
    elif isinstance(x, list):
        for v in x:
            yield from _numbers(v)


def test_deterministic_modulo_timing():
    sc = parse_scenario(scenario({"kind": "braiding"}, {"kind": "mobius", "params": {"count": 5}}))
    a, b = run(sc).to_dict(), run(sc, jobs=2).to_dict()
    for d in (a, b):
        for c in d["checks"]:
            c.pop("time_ms")
    assert a == b


def test_main_exit_codes(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(scenario({"kind": "z0", "params": {"window": [0, 3], "step": 1}}))
    out = tmp_path / "out.json"
    assert main(["run", str(good), "--out", str(out), "--csv", str(tmp_path / "t.csv")]) == 0
    assert parse_report(out.read_text()).ok
    failing = tmp_path / "fail.json"
    failing.write_text(scenario(AA_VA))
    assert main(["run", str(failing), "--out", str(tmp_path / "f.json")]) == 1
    broken = tmp_path / "broken.json"
    broken.write_text(scenario({"kind": "nope"}))
    assert main(["run", str(broken)]) == 2
    assert main(["run", str(tmp_path / "missing.json")]) == 2
    assert main(["--list-checks"]) == 0
    assert "condition-aa" in capsys.readouterr().out
