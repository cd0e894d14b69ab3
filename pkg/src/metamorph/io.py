"""Field files (CSV and PGM) and JSON scenarios.

CSV layout: a header naming the grid axes followed by ``re`` and ``im``, then
one row per node in row-major order. Floats are written with ``repr`` (the
shortest string that round-trips), minus a trailing ``.0``, so a round trip
is bit-exact. Phase-space metadata (``hbar``, sheet, kind) goes into a
sidecar ``<file>.meta.json``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from .core import Axis, GridSpec, QuadratureSpec, ReferenceSheet, SampledField
from .exceptions import ScenarioError
from .helmholtz import BeamSpec
from .transform import SourceFunction

__all__ = [
    "format_float",
    "export_field_csv",
    "import_field_csv",
    "sidecar_path",
    "read_sidecar",
    "export_heatmap",
    "Scenario",
    "scenario_schema",
    "load_scenario",
    "parse_scenario",
]


def format_float(v: float) -> str:
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"cannot serialise non-finite value {v!r}")
    s = repr(v)
    return s[:-2] if s.endswith(".0") else s


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def _check_path(path):
    if path is None or str(path) == "":
        raise ValueError("an output path is required")
    return Path(path)


def export_field_csv(F: SampledField, path, *, sidecar=True) -> None:
    """Write ``F`` as CSV (and, by default, its metadata sidecar)."""
    path = _check_path(path)
    coords = [a.coords for a in F.grid.axes]
    idx = np.indices(F.grid.shape).reshape(len(coords), -1).T
    vals = F.values.ravel()
    lines = [",".join(F.grid.labels + ("re", "im"))]
    for row, v in zip(idx, vals):
        cells = [format_float(coords[a][i]) for a, i in enumerate(row)]
        cells += [format_float(v.real), format_float(v.imag)]
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    if sidecar:
        meta = {
            "kind": F.kind,
            "hbar": F.hbar,
            "sheet": None if F.sheet is None else {"b0": F.sheet.b0, "r0": F.sheet.r0},
        }
        with open(sidecar_path(path), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(meta, fh, sort_keys=True, indent=2)
            fh.write("\n")


def read_sidecar(path) -> Optional[dict]:
    p = sidecar_path(path)
    if not p.exists():
        return None
    with open(p, encoding="utf-8") as fh:
        meta = json.load(fh)
    if not isinstance(meta, dict):
        raise ValueError(f"{p}: metadata must be a JSON object")
    return meta


def _lattice_axis(label, column):
    uniq = np.unique(column)
    if len(uniq) == 1:
        return Axis(label, uniq[0], uniq[0], 1), uniq
    expected = np.linspace(uniq[0], uniq[-1], len(uniq))
    if np.max(np.abs(uniq - expected)) > 1e-9 * (uniq[-1] - uniq[0]):
        raise ValueError(f"axis {label!r} is not uniformly spaced")
    return Axis(label, uniq[0], uniq[-1], len(uniq)), uniq


def import_field_csv(path, *, kind=None, hbar=None, sheet=None) -> SampledField:
    """Read a field written by :func:`export_field_csv`.

    The sidecar, if present, supplies ``kind``, ``hbar`` and sheet unless
    they are given explicitly.
    """
    path = _check_path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = rows[0]
    for col in ("re", "im"):
        if col not in header:
            raise ValueError(f"{path}: missing column {col!r}")
    if header[-2:] != ["re", "im"] or len(header) < 3:
        raise ValueError(f"{path}: header must list axis labels followed by 're', 'im'")
    labels = header[:-2]
    if len(set(labels)) != len(labels) or any(not lab for lab in labels):
        raise ValueError(f"{path}: invalid axis labels {labels}")
    body = rows[1:]
    if not body:
        raise ValueError(f"{path}: no data rows")
    data = np.empty((len(body), len(header)))
    for n, row in enumerate(body, start=2):
        if len(row) != len(header):
            missing = header[len(row)] if len(row) < len(header) else None
            detail = f"missing column {missing!r}" if missing else "too many columns"
            raise ValueError(f"{path}:{n}: {detail}")
        try:
            data[n - 2] = [float(c) for c in row]
        except ValueError:
            raise ValueError(f"{path}:{n}: cannot parse {row!r}") from None
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{path}: non-finite entries")
    axes, index = [], []
    for a, label in enumerate(labels):
        axis, uniq = _lattice_axis(label, data[:, a])
        axes.append(axis)
        index.append(np.searchsorted(uniq, data[:, a]))
    grid = GridSpec(tuple(axes))
    flat = np.ravel_multi_index(tuple(index), grid.shape)
    if len(np.unique(flat)) != len(flat):
        raise ValueError(f"{path}: duplicate node coordinates")
    if len(flat) != grid.size:
        raise ValueError(f"{path}: incomplete lattice ({len(flat)} of {grid.size} nodes)")
    values = np.empty(grid.size, dtype=complex)
    # assign parts separately: re + 1j * im would turn an imaginary -0.0 into +0.0
    values.real[flat] = data[:, -2]
    values.imag[flat] = data[:, -1]
    meta = read_sidecar(path) or {}
    if kind is None:
        kind = meta.get("kind", "phase" if labels == ["x", "y"] else "physical")
    if hbar is None:
        hbar = meta.get("hbar", 1.0)
    if sheet is None and meta.get("sheet"):
        sheet = ReferenceSheet(**meta["sheet"])
    return SampledField(grid, values, kind=kind, hbar=hbar, sheet=sheet, meta={"path": str(path)})


def export_heatmap(F: SampledField, mode, path) -> None:
    """Binary PGM of ``|F|`` (``mode="magnitude"``) or ``arg F`` (``mode="phase"``).

    Columns follow the first axis, rows the second with the largest
    coordinate on top.
    """
    path = _check_path(path)
    if len(F.grid.axes) != 2:
        raise ValueError("heatmaps need a two-dimensional field")
    if mode == "magnitude":
        mag = np.abs(F.values)
        peak = mag.max()
        scaled = np.zeros_like(mag) if peak == 0 else 255 * mag / peak
    elif mode == "phase":
        scaled = 255 * (np.angle(F.values) + np.pi) / (2 * np.pi)
    else:
        raise ValueError(f"mode must be 'magnitude' or 'phase', got {mode!r}")
    img = np.clip(np.rint(scaled), 0, 255).astype(np.uint8).T[::-1]
    height, width = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img).tobytes())


def scenario_schema() -> dict:
    text = resources.files("metamorph").joinpath("scenario.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def _fill_defaults(instance, schema):
    if not isinstance(instance, dict):
        return instance
    for key, sub in schema.get("properties", {}).items():
        if key not in instance and "default" in sub:
            instance[key] = json.loads(json.dumps(sub["default"]))
        if key in instance:
            if sub.get("type") == "object":
                _fill_defaults(instance[key], sub)
            elif sub.get("type") == "array" and isinstance(sub.get("items"), dict):
                for item in instance[key]:
                    _fill_defaults(item, sub["items"])
    return instance


def _path_of(err) -> str:
    return ".".join(str(p) for p in err.absolute_path) or "<root>"


@dataclass
class Scenario:
    """A validated scenario; ``raw`` holds the document with defaults filled in."""

    kind: str
    hbar: float
    sheet: ReferenceSheet
    quadrature: QuadratureSpec
    grid: Optional[GridSpec] = None
    source: Optional[dict] = None
    beam: Optional[BeamSpec] = None
    tolerance: float = 1e-3
    u: list = field(default_factory=list)
    suite: str = "all"
    raw: dict = field(default_factory=dict, repr=False)

    def source_function(self) -> SourceFunction:
        s = self.source
        if s is None:
            raise ScenarioError("source: required for this scenario")
        t = s["type"]
        if t == "gaussian":
            return SourceFunction.gaussian(s["sigma"], s["shift"])
        if t == "wave_packet":
            return SourceFunction.wave_packet(complex(s["sigma"], s["sigma_im"]), s["lam"], s["shift"])
        if t == "plane_wave":
            return SourceFunction.plane_wave(s["k"])
        if t == "gaussian_poly":
            return SourceFunction.gaussian_poly(s["coeffs"], s["sigma"])
        raise ScenarioError(f"source.type: unknown source {t!r}")


def parse_scenario(doc) -> Scenario:
    """Validate a scenario document (a parsed JSON value) and build a :class:`Scenario`."""
    schema = scenario_schema()
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(e.absolute_path), e.message))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise ScenarioError(f"{_path_of(err)}: {err.message}")
    doc = _fill_defaults(json.loads(json.dumps(doc)), schema)
    where = "<root>"
    try:
        where = "sheet"
        sheet = ReferenceSheet(**doc["sheet"])
        where = "quadrature"
        quad = QuadratureSpec(**doc["quadrature"])
        grid = None
        if "grid" in doc:
            where = "grid"
            grid = GridSpec(tuple(Axis(a["label"], a["min"], a["max"], a["count"]) for a in doc["grid"]))
        beam = None
        if "beam" in doc:
            where = "beam"
            beam = BeamSpec(**doc["beam"])
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{where}: {exc}") from None
    return Scenario(
        kind=doc["kind"],
        hbar=float(doc["hbar"]),
        sheet=sheet,
        quadrature=quad,
        grid=grid,
        source=doc.get("source"),
        beam=beam,
        tolerance=float(doc["tolerance"]),
        u=list(doc.get("u", [])),
        suite=doc.get("suite", "all"),
        raw=doc,
    )


def load_scenario(path) -> Scenario:
    path = _check_path(path)
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"<root>: invalid JSON ({exc})") from None
    return parse_scenario(doc)
