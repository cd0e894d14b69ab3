from __future__ import annotations

import hashlib
import json

import numpy as np
import pytest

from metamorph.core import GridSpec, ReferenceSheet, SampledField
from metamorph.exceptions import ScenarioError
from metamorph.io import (
    export_field_csv,
    export_heatmap,
    format_float,
    import_field_csv,
    load_scenario,
    parse_scenario,
    read_sidecar,
    scenario_schema,
    sidecar_path,
)


def test_csv_minimal_body(tmp_path):
    g = GridSpec.from_ranges(u=(0, 0, 1))
    path = tmp_path / "f.csv"
    export_field_csv(SampledField(g, [1 + 2j], kind="physical"), path)
    assert path.read_bytes() == b"u,re,im\n0,1,2\n"
    assert read_sidecar(path)["kind"] == "physical"


def test_format_float():
    assert format_float(1.0) == "1" and format_float(-0.5) == "-0.5" and format_float(1e-300) == "1e-300"
    with pytest.raises(ValueError):
        format_float(float("inf"))


def test_csv_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    g = GridSpec.from_ranges(x=(-1.3, 2.9, 7), y=(0.1, 0.4, 5))
    vals = rng.normal(size=g.shape) * 10.0 ** rng.integers(-300, 300, g.shape) + 1j * rng.normal(size=g.shape)
    vals[0, 0] = complex(np.nextafter(1, 2), -0.0)
    F = SampledField(g, vals, hbar=0.7, sheet=ReferenceSheet(0.2, 1.5))
    path = tmp_path / "f.csv"
    export_field_csv(F, path)
    G = import_field_csv(path)
    assert np.array_equal(G.values.view(np.uint64), F.values.view(np.uint64))
    assert G.hbar == 0.7 and G.sheet == F.sheet and G.grid.shape == g.shape
    assert np.array_equal(G.grid.coords("x"), g.coords("x"))


def test_csv_without_sidecar(tmp_path):
    g = GridSpec.from_ranges(x=(0, 1, 2), y=(0, 1, 3))
    path = tmp_path / "f.csv"
    export_field_csv(SampledField(g, np.arange(6)), path, sidecar=False)
    assert not sidecar_path(path).exists()
    F = import_field_csv(path)
    assert F.sheet is None and F.kind == "phase"


def test_csv_row_major_order(tmp_path):
    g = GridSpec.from_ranges(a=(0, 1, 2), b=(0, 2, 3))
    path = tmp_path / "f.csv"
    export_field_csv(SampledField(g, np.arange(6), kind="physical"), path, sidecar=False)
    rows = path.read_text().splitlines()
    assert rows[1:4] == ["0,0,0,0", "0,1,1,0", "0,2,2,0"]
    assert len(rows) == 7


@pytest.mark.parametrize(
    "body, match",
    [
        ("u,re\n0,1\n", "missing column 'im'"),
        ("u,re,im\n0,1\n", "missing column 'im'"),
        ("u,re,im\n0,1,x\n", "cannot parse"),
        ("u,re,im\n0,1,nan\n", "non-finite"),
        ("u,re,im\n0,1,2\n0,3,4\n", "duplicate"),
        ("u,re,im\n0,1,2\n1,1,2\n3,1,2\n", "uniformly"),
        ("a,b,re,im\n0,0,1,1\n0,1,1,1\n1,0,1,1\n", "incomplete"),
        ("", "empty"),
        ("u,re,im\n", "no data"),
    ],
)
def test_csv_import_errors(tmp_path, body, match):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(ValueError, match=match):
        import_field_csv(path)


def test_empty_path_rejected():
    g = GridSpec.from_ranges(u=(0, 0, 1))
    with pytest.raises(ValueError):
        export_field_csv(SampledField(g, [1]), "")
    with pytest.raises(ValueError):
        export_heatmap(SampledField(GridSpec.from_ranges(a=(0, 1, 2), b=(0, 1, 2)), np.ones(4)), "magnitude", "")


def _pgm_pixels(path):
    data = path.read_bytes()
    head, _, rest = data.partition(b"\n255\n")
    magic, dims = head.split(b"\n")
    w, h = map(int, dims.split())
    assert magic == b"P5"
    return np.frombuffer(rest, dtype=np.uint8).reshape(h, w)


def test_heatmap_constant_and_zero(tmp_path):
    g = GridSpec.from_ranges(a=(0, 1, 4), b=(0, 1, 3))
    export_heatmap(SampledField(g, np.full(g.shape, 2 - 2j)), "magnitude", tmp_path / "c.pgm")
    assert np.all(_pgm_pixels(tmp_path / "c.pgm") == 255)
    export_heatmap(SampledField(g, np.zeros(g.shape)), "magnitude", tmp_path / "z.pgm")
    px = _pgm_pixels(tmp_path / "z.pgm")
    assert px.shape == (3, 4) and np.all(px == 0)


def test_heatmap_orientation_and_phase(tmp_path):
    g = GridSpec.from_ranges(a=(0, 1, 2), b=(0, 1, 2))
    vals = np.array([[0, 0], [0, 1.0]])  # nonzero at largest a, largest b
    export_heatmap(SampledField(g, vals), "magnitude", tmp_path / "m.pgm")
    assert _pgm_pixels(tmp_path / "m.pgm").tolist() == [[0, 255], [0, 0]]
    export_heatmap(SampledField(g, np.array([[1, -1], [1j, -1j]])), "phase", tmp_path / "p.pgm")
    px = _pgm_pixels(tmp_path / "p.pgm")
    assert px[1, 0] == 128 and px[0, 0] == 255 and px[1, 1] == 191 and px[0, 1] == 64
    with pytest.raises(ValueError):
        export_heatmap(SampledField(g, vals), "hue", tmp_path / "x.pgm")


def test_heatmap_deterministic(tmp_path):
    rng = np.random.default_rng(1)
    g = GridSpec.from_ranges(a=(0, 1, 17), b=(0, 1, 9))
    F = SampledField(g, rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape))
    digests = []
    for name in ("one.pgm", "two.pgm"):
        export_heatmap(F, "magnitude", tmp_path / name)
        digests.append(hashlib.sha256((tmp_path / name).read_bytes()).hexdigest())
    assert digests[0] == digests[1]


def test_scenario_defaults(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"kind": "beam", "grid": [{"label": "u1", "min": -1, "max": 1, "count": 5}, {"label": "u2", "min": 0, "max": 2, "count": 5}]}))
    sc = load_scenario(path)
    assert sc.hbar == 1.0 and sc.sheet == ReferenceSheet(0.0, 1.0)
    assert sc.beam.a == 0.5 and sc.beam.sign == -1 and sc.tolerance == 1e-3
    assert sc.grid.shape == (5, 5)


def test_scenario_errors(tmp_path):
    with pytest.raises(ScenarioError, match="sheet.r0"):
        parse_scenario({"kind": "verify", "sheet": {"r0": -1}})
    with pytest.raises(ScenarioError, match="foo"):
        parse_scenario({"kind": "verify", "foo": 1})
    with pytest.raises(ScenarioError, match="source"):
        parse_scenario({"kind": "transform", "grid": [{"label": "x", "min": 0, "max": 1, "count": 2}]})
    with pytest.raises(ScenarioError, match="grid"):
        parse_scenario({"kind": "verify", "grid": [{"label": "x", "min": 1, "max": 0, "count": 3}]})
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ScenarioError, match="invalid JSON"):
        load_scenario(path)


def test_scenario_source_functions():
    grid = [{"label": "x", "min": 0, "max": 1, "count": 2}, {"label": "y", "min": 0, "max": 1, "count": 2}]
    for src, value in [
        ({"type": "gaussian"}, 1.0),
        ({"type": "wave_packet", "sigma": 1.0, "lam": 0.5}, 1.0),
        ({"type": "plane_wave", "k": 2.0}, 1.0),
        ({"type": "gaussian_poly", "coeffs": [2.0, 1.0]}, 2.0),
    ]:
        sc = parse_scenario({"kind": "transform", "source": src, "grid": grid})
        assert sc.source_function()(np.array([0.0]))[0] == pytest.approx(value)


def test_schema_is_strict():
    schema = scenario_schema()
    assert schema["additionalProperties"] is False
    assert set(schema["properties"]["kind"]["enum"]) == {"transform", "beam", "verify", "invert"}
