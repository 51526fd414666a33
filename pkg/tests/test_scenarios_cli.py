import json

import pytest
from click.testing import CliRunner
from gmpy2 import mpq

from hkschubert import scenarios as sc
from hkschubert.cli import main
from hkschubert.linalg import IntMatrix

FAST = [n for n, s in sc.REGISTRY.items() if not s.slow]


def test_canonical_forms():
    assert sc.canon(mpq(5, 11)) == "5/11" and sc.canon(mpq(4, 2)) == "2"
    assert sc.canon(True) == "true" and sc.canon((640, 990, 5500)) == "(640, 990, 5500)"
    assert sc.canon((3,)) == "(3,)" and sc.canon(frozenset({2, -2})) == "{-2, 2}"
    assert sc.canon(IntMatrix.from_rows([[1, 2], [3, 4]])) == "[[1, 2], [3, 4]]"
    with pytest.raises(sc.ScenarioError):
        sc.canon(0.5)


def test_registry_covers_goldens():
    gold = sc.load_goldens()
    assert set(gold) <= set(sc.REGISTRY)
    for name, entry in gold.items():
        for k, v in entry["values"].items():
            assert v["provenance"].split(":")[0] in ("published", "derived", "trivial"), (name, k)


@pytest.mark.parametrize("name", FAST)
def test_fast_scenarios_pass(name):
    r = sc.run_scenario(name)
    assert r.passed, (r.error, [(v.name, v.value, v.expected) for v in r.values if not v.ok])


def test_json_schema_and_byte_stability():
    runner = CliRunner()
    a = runner.invoke(main, ["mukai", "--format", "json", "--no-timing"])
    b = runner.invoke(main, ["mukai", "--format", "json", "--no-timing"])
    assert a.exit_code == 0 and a.output == b.output
    doc = json.loads(a.output)
    assert set(doc) >= {"scenario", "values", "status", "elapsed_ms"}
    assert doc["status"] == "pass" and doc["elapsed_ms"] == 0
    assert all(set(v) == {"name", "value", "provenance"} for v in doc["values"])


def test_text_output():
    res = CliRunner().invoke(main, ["nonrep"])
    assert res.exit_code == 0
    assert "wall_mod_25 = obstructed" in res.output and "status = pass" in res.output


def test_failing_golden_sets_exit_status(monkeypatch):
    gold = json.loads(json.dumps(sc.load_goldens()))
    gold["plane-lattices"]["values"]["s22_disc"]["value"] = "45"
    monkeypatch.setattr(sc, "load_goldens", lambda: gold)
    res = CliRunner().invoke(main, ["plane-lattices"])
    assert res.exit_code == 1 and "expected 45" in res.output


def test_fixture_override(tmp_path):
    p = tmp_path / "t.tri"
    p.write_text("[012]\ncase = 1\n")
    res = CliRunner().invoke(main, ["trivector-fixtures", "--fixture", str(p)])
    assert res.exit_code == 1 and "fixture_checks_pass = false" in res.output
    res = CliRunner().invoke(main, ["nonrep", "--fixture", str(p)])
    assert res.exit_code == 2


def test_tower_fixture(tmp_path):
    p = tmp_path / "t.tower"
    p.write_text("G = grass(2, 5)\nemit('deg', integral(G, schubert(G, [1])**6))\n")
    res = CliRunner().invoke(main, ["k3-normal", "--fixture", str(p)])
    assert "deg = 5" in res.output and res.exit_code == 0


def test_timeout_reported():
    r = sc.run_scenario("divisor-degrees", timeout=0.5)
    assert r.status == "timeout" and not r.passed


def test_seed_changes_nothing_golden():
    for seed in (1, 2):
        assert sc.run_scenario("trivector-fixtures", seed=seed).passed


def test_run_script_command(tmp_path):
    p = tmp_path / "s.tower"
    p.write_text("emit('x', 1/3)\n")
    res = CliRunner().invoke(main, ["run-script", str(p)])
    assert res.output.strip() == "x = 1/3"
    p.write_text("import os\n")
    assert CliRunner().invoke(main, ["run-script", str(p)]).exit_code == 1


def test_all_skip_slow_json():
    res = CliRunner().invoke(main, ["all", "--skip-slow", "--format", "json", "--no-timing"])
    assert res.exit_code == 0
    docs = json.loads(res.output)
    assert {d["scenario"] for d in docs} == set(FAST)
