from __future__ import annotations

import json
import math
import shutil
import subprocess
from pathlib import Path

import pytest

from metamorph.cli import main

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def write(path, doc):
    path.write_text(json.dumps(doc))
    return path


def beam_doc(n, half, a=0.5, tol=1e-3):
    return {
        "kind": "beam",
        "beam": {"a": a},
        "grid": [{"label": "u1", "min": -half, "max": half, "count": n}, {"label": "u2", "min": 0, "max": 2 * half, "count": n}],
        "tolerance": tol,
    }


def transform_doc(n=33, half=4.0, source=None):
    return {
        "kind": "transform",
        "source": source or {"type": "gaussian"},
        "grid": [{"label": "x", "min": -half, "max": half, "count": n}, {"label": "y", "min": -half, "max": half, "count": n}],
    }


def test_transform_row_count(tmp_path, capsys):
    sc = write(tmp_path / "t.json", transform_doc())
    out = tmp_path / "f.csv"
    assert main(["transform", str(sc), str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1090 and lines[0] == "x,y,re,im"
    assert "max" in capsys.readouterr().out


def test_transform_is_deterministic(tmp_path):
    sc = write(tmp_path / "t.json", transform_doc(17, source={"type": "plane_wave", "k": 1.0}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["transform", str(sc), str(a)]) == 0
    assert main(["transform", str(sc), str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_transform_bad_scenarios(tmp_path, capsys):
    bad = write(tmp_path / "bad.json", dict(transform_doc(), foo=1))
    assert main(["transform", str(bad), str(tmp_path / "o.csv")]) == 1
    assert "foo" in capsys.readouterr().err
    wrong_kind = write(tmp_path / "beam.json", beam_doc(9, 1.0))
    assert main(["transform", str(wrong_kind), str(tmp_path / "o.csv")]) == 1
    assert main(["transform", str(tmp_path / "missing.json"), str(tmp_path / "o.csv")]) == 3


def test_transform_quadrature_error(tmp_path):
    doc = transform_doc(5, source={"type": "plane_wave", "k": 1.0})
    doc["sheet"] = {"r0": 1e-3}
    doc["quadrature"] = {"max_halfwidth": 10.0}
    sc = write(tmp_path / "t.json", doc)
    assert main(["transform", str(sc), str(tmp_path / "o.csv")]) == 3


def test_verify_closed_forms(tmp_path, capsys):
    report = tmp_path / "r.json"
    assert main(["verify", "closed-forms", "--json-report", str(report)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "PASS" in out
    data = json.loads(report.read_text())
    assert data["exit_code"] == 0 and data["checks"] and all(c["passed"] for c in data["checks"])


def test_verify_swapped_mapping_fails():
    assert main(["verify", "annihilators", "--debug-swap-br"]) == 2


def test_verify_usage_errors(capsys):
    assert main(["verify", "nonsense"]) == 1
    assert main(["verify", "closed-forms", "--tol-scale", "0"]) == 1
    assert main([]) == 1
    assert main(["frobnicate"]) == 1


def test_beam_pass_writes_outputs(tmp_path):
    sc = write(tmp_path / "b.json", beam_doc(61, 0.4))
    prefix = tmp_path / "beam"
    report = tmp_path / "r.json"
    assert main(["beam", str(sc), str(prefix), "--json-report", str(report)]) == 0
    for suffix in (".csv", ".pgm", "_phase.pgm"):
        assert (tmp_path / f"beam{suffix}").exists()
    assert (tmp_path / "beam.pgm").read_bytes().startswith(b"P5\n61 61\n255\n")
    check = json.loads(report.read_text())["checks"][0]
    assert check["passed"] and check["residual"] < 1e-3


def test_beam_degenerate_origin_value(tmp_path):
    doc = beam_doc(5, 0.01, a=0.0, tol=1.0)
    doc["beam"]["k"] = 2.0
    doc["grid"][1]["min"] = 0.0
    sc = write(tmp_path / "b.json", doc)
    assert main(["beam", str(sc), str(tmp_path / "beam")]) == 0
    row = (tmp_path / "beam.csv").read_text().splitlines()[1 + 2 * 5]
    u1, u2, re, im = map(float, row.split(","))
    assert (u1, u2) == (0.0, 0.0)
    assert abs(complex(re, im) - 4.0) < 1e-8


def test_beam_under_resolved_fails(tmp_path):
    # k h = 2 pi * 0.1 > 0.5
    sc = write(tmp_path / "b.json", beam_doc(21, 1.0))
    assert main(["beam", str(sc), str(tmp_path / "beam")]) == 2
    assert main(["beam", str(sc), str(tmp_path / "beam"), "--tol-scale", "1000"]) == 0


def test_invert_round_trip(tmp_path):
    sc = write(tmp_path / "t.json", transform_doc(257))
    field = tmp_path / "f.csv"
    assert main(["transform", str(sc), str(field)]) == 0
    out = tmp_path / "u.csv"
    assert main(["invert", str(field), str(out), "--u", "0", "0.5"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "u,re,im" and len(lines) == 3
    _, re, im = map(float, lines[1].split(","))
    assert abs(complex(re, im) - 1) < 1e-4
    _, re, im = map(float, lines[2].split(","))
    assert abs(complex(re, im) - math.exp(-math.pi / 4)) < 1e-4


def test_invert_empty_and_missing_sheet(tmp_path):
    sc = write(tmp_path / "t.json", transform_doc(65))
    field = tmp_path / "f.csv"
    assert main(["transform", str(sc), str(field)]) == 0
    out = tmp_path / "u.csv"
    assert main(["invert", str(field), str(out), "--u"]) == 0
    assert out.read_text() == "u,re,im\n"
    (tmp_path / "f.csv.meta.json").unlink()
    assert main(["invert", str(field), str(out), "--u", "0"]) == 1
    assert main(["invert", str(field), str(out), "--u", "0", "--sheet", "0", "1"]) == 0


def test_invert_boundary_failure(tmp_path):
    sc = write(tmp_path / "t.json", transform_doc(33, half=1.0))
    field = tmp_path / "f.csv"
    assert main(["transform", str(sc), str(field)]) == 0
    assert main(["invert", str(field), str(tmp_path / "u.csv"), "--u", "0"]) == 3


def test_invert_with_scenario(tmp_path):
    field = tmp_path / "f.csv"
    assert main(["transform", str(SCENARIOS / "gaussian_transform.json"), str(field)]) == 0
    (tmp_path / "f.csv.meta.json").unlink()
    out = tmp_path / "u.csv"
    assert main(["invert", str(field), str(out), "--scenario", str(SCENARIOS / "invert_gaussian.json")]) == 0
    assert len(out.read_text().splitlines()) == 6


@pytest.mark.skipif(shutil.which("metamorph") is None, reason="console script not installed")
def test_console_script(tmp_path):
    res = subprocess.run(["metamorph", "verify", "nope"], capture_output=True, text=True)
    assert res.returncode == 1
    res = subprocess.run(["metamorph", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "transform" in res.stdout


def test_verify_all_passes(tmp_path):
    report = tmp_path / "r.json"
    assert main(["verify", "all", "--json-report", str(report)]) == 0
    suites = {c["suite"] for c in json.loads(report.read_text())["checks"]}
    assert suites == {"closed-forms", "annihilators", "roundtrip", "helmholtz"}
