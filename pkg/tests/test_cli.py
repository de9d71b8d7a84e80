import json
import shutil
import subprocess
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from strata_lab.cli import main

SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "report.schema.json").read_text())

# a one-object Z/3 whose product table has one wrong entry: 1 * 1 should be 2
BROKEN = """kind: finite-groupoid
groupoid:
  objects: 1
  src: [0, 0, 0]
  tgt: [0, 0, 0]
  unit: [0]
  inv: [0, 2, 1]
  mul: [[0, 0, 0], [0, 1, 1], [0, 2, 2], [1, 0, 1], [2, 0, 2],
        [1, 1, 1], [1, 2, 0], [2, 1, 0], [2, 2, 1]]
"""


def run(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = main([*argv, "--json", str(out)])
    report = json.loads(out.read_text()) if out.exists() else None
    if report is not None:
        jsonschema.validate(report, SCHEMA)
    return code, report


@pytest.mark.parametrize("argv", [
    ("strata", "--example", "s3_standard"),
    ("strata", "--example", "circle_1_2", "--inertia"),
    ("validate", "--example", "z4_plane", "--samples", "300"),
    ("validate", "--example", "z2_free"),
    ("derham", "--example", "z2_line", "--max-degree", "3"),
    ("derham", "--example", "circle_1", "--max-degree", "3"),
    ("groupoid", "--example", "z2_free"),
    ("groupoid", "--example", "s3_group", "--op", "inertia"),
    ("whitney", "--example", "z2_line", "--samples-per-scale", "4"),
])
def test_success_reports_match_schema(tmp_path, argv):
    code, report = run(tmp_path, *argv)
    assert code == 0
    assert report["command"] == argv[0] and report["timing"] is None


def test_strata_counts_in_report(tmp_path):
    _, report = run(tmp_path, "strata", "--example", "s3_standard")
    res = report["results"]
    assert len(res["strata"]) == 6 and res["max_depth"] == 2
    assert max(s["components"] for s in res["strata"]) == 6


def test_invariant_failure_exits_1(tmp_path):
    spec = tmp_path / "broken.yaml"
    spec.write_text(BROKEN)
    code, report = run(tmp_path, "groupoid", "--input", str(spec))
    assert code == 1 and not report["results"]["valid"]
    assert any("associativity" in v for v in report["results"]["violations"])


def test_bad_claimed_order_exits_1(tmp_path):
    claims = tmp_path / "claims.json"
    claims.write_text(json.dumps({"strata": [{"dim": d} for d in (2, 1, 1, 0, 0, 0)], "hasse": []}))
    code, report = run(tmp_path, "validate", "--example", "s3_standard", "--samples", "200",
                       "--check-file", str(claims))
    assert code == 1
    failed = {c["invariant"] for c in report["results"]["checks"] if not c["passed"]}
    assert failed


@pytest.mark.parametrize("argv", [
    ("strata",),
    ("strata", "--example", "nope"),
    ("bogus",),
    ("strata", "--example", "z2_free"),
    ("groupoid", "--example", "z2_line"),
    ("derham", "--example", "z2_line", "--max-degree", "0"),
    ("whitney", "--example", "s3_standard", "--base", "0", "--upper", "1"),
    ("whitney", "--example", "s3_standard", "--base", "1"),
    ("strata", "--example", "z2_line", "--cap", "0"),
])
def test_usage_errors_exit_2(tmp_path, argv, capsys):
    assert main(list(argv)) == 2
    assert capsys.readouterr().err


def test_parse_error_exits_2_with_position(tmp_path, capsys):
    spec = tmp_path / "bad.yaml"
    spec.write_text("kind: finite-matrix\ngenerators:\n  - [[\"1/0\"]]\n")
    assert main(["strata", "--input", str(spec)]) == 2
    assert "line 3" in capsys.readouterr().err


def test_cap_exits_3(capsys):
    assert main(["strata", "--example", "s3_standard", "--cap", "4"]) == 3
    assert "resource cap" in capsys.readouterr().err


def test_dot_output(tmp_path):
    dot = tmp_path / "h.dot"
    assert main(["strata", "--example", "s3_standard", "--dot", str(dot)]) == 0
    text = dot.read_text()
    assert text.startswith("digraph") and text.count("->") == 3


def test_timing_and_json_stdout(tmp_path, capsys):
    code, report = run(tmp_path, "strata", "--example", "z2_line", "--timing")
    assert code == 0 and report["timing"]["wall_seconds"] >= 0
    capsys.readouterr()
    main(["strata", "--example", "z2_line", "--format", "json"])
    jsonschema.validate(json.loads(capsys.readouterr().out), SCHEMA)


def test_reports_are_deterministic_across_threads(tmp_path, monkeypatch):
    _, one = run(tmp_path, "derham", "--example", "circle_1_2", "--max-degree", "3")
    monkeypatch.setenv("STRATA_LAB_THREADS", "4")
    _, four = run(tmp_path, "derham", "--example", "circle_1_2", "--max-degree", "3")
    assert one == four


def test_input_file_matches_example_digest(tmp_path):
    text = (resources.files("strata_lab") / "specs" / "z4_plane.yaml").read_text()
    spec = tmp_path / "z4.yaml"
    spec.write_text("# relaid\n" + text.replace("[[0, -1], [1, 0]]", "[ [0, -1] , [1, 0] ]"))
    _, a = run(tmp_path, "strata", "--input", str(spec))
    _, b = run(tmp_path, "strata", "--example", "z4_plane")
    assert a["input_digest"] == b["input_digest"]


@pytest.mark.skipif(shutil.which("strata-lab") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["strata-lab", "strata", "--example", "z2_line", "--format", "json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    jsonschema.validate(json.loads(proc.stdout), SCHEMA)
    bad = subprocess.run(["strata-lab", "strata"], capture_output=True, text=True, check=False)
    assert bad.returncode == 2
