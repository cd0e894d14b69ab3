from __future__ import annotations

import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metamorph.core import (
    Axis,
    ComplexChart,
    GridSpec,
    PhasePoint,
    QuadratureSpec,
    ReferenceSheet,
    SampledField,
    as_coords,
    complex_to_phase,
    phase_to_complex,
    principal_sqrt,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
radius = st.floats(1e-3, 1e3)


@pytest.mark.parametrize(
    "p, z, w",
    [
        ((0, 0, 0, 1), 0, 1j),
        ((1, 1, 0, 1), 1 + 1j, 1j),
        ((1, 0, 2, 1), 1, 2 + 1j),
    ],
)
def test_phase_to_complex_examples(p, z, w):
    c = phase_to_complex(PhasePoint(*p))
    assert c.z == z and c.w == w


@pytest.mark.parametrize(
    "z, w, p",
    [
        (0, 1j, (0, 0, 0, 1)),
        (1 + 1j, 1j, (1, 1, 0, 1)),
        (2, 3 + 4j, (2, 0, 3, 2)),
    ],
)
def test_complex_to_phase_examples(z, w, p):
    assert complex_to_phase(ComplexChart(z, w)).astuple() == pytest.approx(p, abs=1e-15)


def test_degenerate_sheet_rejected():
    with pytest.raises(ValueError, match="degenerate"):
        ComplexChart(1.0, 2.0)
    with pytest.raises(ValueError):
        PhasePoint(0, 0, 0, 0)
    with pytest.raises(ValueError):
        PhasePoint(0, 0, 0, -1)


@given(finite, finite, finite, radius)
@settings(max_examples=200, deadline=None)
def test_chart_round_trip_phase(x, y, b, r):
    p = PhasePoint(x, y, b, r)
    q = complex_to_phase(phase_to_complex(p))
    scale = 1 + abs(x) + abs(b * y) + abs(y) * r**2
    assert abs(q.x - x) <= 1e-12 * scale
    assert abs(q.y - y) <= 1e-12 * (1 + abs(y))
    assert abs(q.b - b) <= 1e-12 * (1 + abs(b))
    assert abs(q.r - r) <= 1e-12 * r


@given(finite, finite, finite, st.floats(1e-6, 1e3))
@settings(max_examples=200, deadline=None)
def test_chart_round_trip_complex(zr, zi, wr, wi):
    c = ComplexChart(complex(zr, zi), complex(wr, wi))
    d = phase_to_complex(complex_to_phase(c))
    assert abs(d.w - c.w) <= 1e-12 * abs(c.w)
    assert abs(d.z - c.z) <= 1e-9 * (1 + abs(c.z) + abs(c.w) * abs(zi) / wi)


@pytest.mark.parametrize("a, expected", [(4, 2), (-1, 1j), (2j, 1 + 1j), (0, 0)])
def test_principal_sqrt_examples(a, expected):
    assert principal_sqrt(a) == pytest.approx(expected, abs=1e-15)


def test_principal_sqrt_negative_zero_imag():
    assert principal_sqrt(complex(-4.0, -0.0)) == pytest.approx(2j)
    assert principal_sqrt(np.array([complex(-1, -0.0)]))[0] == pytest.approx(1j)


@given(finite, finite)
@settings(max_examples=300, deadline=None)
def test_principal_sqrt_squares_back(re, im):
    a = complex(re, im)
    if abs(a) < 1e-300 or (im == 0 and re < 0):
        return
    s = principal_sqrt(a)
    assert s.real >= 0
    assert abs(s * s - a) <= 1e-14 * abs(a) * 4
    assert abs(s - cmath.sqrt(a)) <= 1e-15 * abs(s) * 4


def test_quadrature_spec_validation():
    QuadratureSpec(panels=2, nodes_per_panel=2, truncation_eps=0.5)
    with pytest.raises(ValueError):
        QuadratureSpec(nodes_per_panel=1)
    with pytest.raises(ValueError):
        QuadratureSpec(truncation_eps=1.0)
    with pytest.raises(ValueError):
        QuadratureSpec(panels=0)


def test_reference_sheet_validation():
    assert ReferenceSheet() == ReferenceSheet(0.0, 1.0)
    with pytest.raises(ValueError):
        ReferenceSheet(0.0, 0.0)


def test_grid_spec():
    g = GridSpec.from_ranges(x=(-1, 1, 5), y=(0, 2, 3))
    assert g.labels == ("x", "y") and g.shape == (5, 3) and g.size == 15
    assert g.coords("x") == pytest.approx([-1, -0.5, 0, 0.5, 1])
    X, Y = g.mesh()
    assert X.shape == (5, 3) and Y[0, 2] == 2
    inner = g.interior()
    assert inner.shape == (3, 1) and inner.coords("x")[0] == -0.5
    with pytest.raises(ValueError):
        Axis("x", 1, 1, 3)
    with pytest.raises(ValueError):
        Axis("x", 0, 1, 0)
    with pytest.raises(ValueError):
        Axis("x", 2, 1, 2)
    with pytest.raises(ValueError):
        Axis("a,b", 0, 1, 2)
    with pytest.raises(ValueError, match="duplicate"):
        GridSpec((Axis("x", 0, 1, 2), Axis("x", 0, 1, 2)))


def test_single_node_axis():
    a = Axis("u", 0.0, 0.0, 1)
    assert a.coords.tolist() == [0.0] and a.step == 0.0


def test_sampled_field_checks():
    g = GridSpec.from_ranges(x=(0, 1, 2), y=(0, 1, 2))
    F = SampledField(g, [1, 2, 3, 4])
    assert F.values.shape == (2, 2) and F.values.dtype == complex
    with pytest.raises(ValueError):
        F.values[0, 0] = 3
    with pytest.raises(ValueError, match="expected 4"):
        SampledField(g, [1, 2, 3])
    with pytest.raises(ValueError, match="finite"):
        SampledField(g, [1, 2, 3, np.nan])
    with pytest.raises(ValueError):
        SampledField(g, [1, 2, 3, 4], kind="other")


def test_as_coords():
    assert as_coords(PhasePoint(1, 2, 3, 4)) == (1, 2, 3, 4)
    arr = np.arange(8.0).reshape(2, 4)
    x, y, b, r = as_coords(arr)
    assert x.tolist() == [0, 4] and r.tolist() == [3, 7]
    with pytest.raises(TypeError):
        as_coords((1, 2, 3))
