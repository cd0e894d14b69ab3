from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from metamorph.closed_forms import (
    PlaneWaveSpec,
    WavePacketSpec,
    delta_metamorphism,
    plane_wave_f2,
    plane_wave_metamorphism,
    wave_packet_metamorphism,
)
from metamorph.core import PhasePoint, chart
from metamorph.exceptions import StencilError
from metamorph.jets import (
    ANNIHILATORS,
    D_operator,
    FdScheme,
    HoloJet,
    apply_annihilator,
    apply_D,
    apply_D0,
    contour_derivative,
    lift_G,
    schrodinger_coords,
    schrodinger_coords_inverse,
    structural_residual,
)
from metamorph.transform import SourceFunction, forward

# M(phi'') at p=(0.2, 0.1, 0, 1), phi = exp(-pi u^2), by 30-digit quadrature
D0_EXAMPLE = -2.22655836961136059742775516043 - 0.398662123010742141232716008538j


def gaussian_field(*p):
    return wave_packet_metamorphism(WavePacketSpec(1.0, 0.0), p)


def zero_field(x, y, b, r):
    return np.zeros(np.broadcast(x, y, b, r).shape, dtype=complex)


def test_contour_derivative_exp():
    f = lambda z: np.exp(2 * z)
    assert contour_derivative(f, (0.3 + 0.1j,), 0, 1) == pytest.approx(2 * cmath.exp(0.6 + 0.2j), rel=1e-13)
    assert contour_derivative(f, (0.3 + 0.1j,), 0, 2) == pytest.approx(4 * cmath.exp(0.6 + 0.2j), rel=1e-12)


def test_holojet_fallback_and_arity():
    jet = HoloJet(lambda z, w: z**3 * w, 2)
    assert jet.d(0, 1.0 + 1j, 2.0j) == pytest.approx(3 * (1 + 1j) ** 2 * 2j, rel=1e-12)
    assert jet.dd(0, 1.0 + 1j, 2.0j) == pytest.approx(6 * (1 + 1j) * 2j, rel=1e-12)
    assert jet.d(1, 1.0 + 1j, 2.0j) == pytest.approx((1 + 1j) ** 3, rel=1e-12)
    with pytest.raises(TypeError):
        jet(1.0)
    with pytest.raises(ValueError):
        HoloJet(lambda z: z, 1, grad=[None, None])


def test_fd_scheme_validation():
    with pytest.raises(ValueError):
        FdScheme(first_rel=0)
    with pytest.raises(ValueError):
        FdScheme(index_map=("x", "y", "b", "b"))


def test_c1_example():
    p = PhasePoint(0.3, -0.2, 0.5, 1.1)
    F = gaussian_field(*p.astuple())
    res = apply_annihilator("C1", gaussian_field, p)
    assert abs(res) < 1e-5 * abs(F) + 1e-5


@pytest.mark.parametrize("which", ANNIHILATORS)
@pytest.mark.parametrize(
    "field",
    [
        gaussian_field,
        lambda *p: wave_packet_metamorphism(WavePacketSpec(0.8 - 0.6j, 0.4), p, 1.6),
        lambda *p: plane_wave_metamorphism(PlaneWaveSpec(2.0), p, 1.6),
        lambda *p: delta_metamorphism(0, p, 1.6),
        lambda *p: delta_metamorphism(1, p, 1.6),
    ],
)
def test_annihilators_vanish_on_transforms(which, field):
    rng = np.random.default_rng(11)
    hbar = 1.0 if field is gaussian_field else 1.6
    pts = tuple(np.column_stack([rng.uniform(-1, 1, 10), rng.uniform(-1, 1, 10), rng.uniform(-1, 1, 10), rng.uniform(0.6, 1.6, 10)]).T)
    res, scale = apply_annihilator(which, field, pts, hbar, with_scale=True)
    assert np.all(np.abs(res) < 1e-5 * scale)


@pytest.mark.parametrize("which", ANNIHILATORS)
def test_annihilators_on_zero(which):
    assert apply_annihilator(which, zero_field, (0.1, 0.2, 0.3, 1.0)) == 0


def test_swapped_index_map_breaks_c2():
    fd = FdScheme(index_map=("x", "y", "r", "b"))
    p = (0.3, -0.2, 0.5, 1.1)
    res, scale = apply_annihilator("C2", gaussian_field, p, 1.0, fd, with_scale=True)
    assert abs(res) > 1e-2 * scale


def test_s1_rejects_constant_factor():
    G = lift_G(HoloJet.constant(1.0, 2))
    res, scale = apply_annihilator("S1", G, (0.4, 0.1, -0.3, 0.9), with_scale=True)
    assert abs(res) > 1e-2 * scale
    # C1 and C2 still vanish: every lift is annihilated by the first-order pair
    for which in ("C1", "C2"):
        r, s = apply_annihilator(which, G, (0.4, 0.1, -0.3, 0.9), with_scale=True)
        assert abs(r) < 1e-7 * s


def test_s1_s2_proportional_on_lifts():
    jet = HoloJet(lambda z, w: z**2 * np.exp(-w), 2)
    G = lift_G(jet, 1.0)
    for p in [(0.2, 0.3, -0.5, 1.2), (-0.6, -0.1, 0.4, 0.8)]:
        _z, w = chart(*p)
        s1 = apply_annihilator("S1", G, p)
        s2 = apply_annihilator("S2", G, p)
        assert s2 == pytest.approx(-1j * s1, rel=1e-4)
        z, w = chart(*p)
        r = p[3]
        expected = -(r**2) / w * G(*p) / jet(z, w) * structural_residual(jet, z, w)
        assert s1 == pytest.approx(expected, rel=1e-4)


def test_lift_examples():
    one = HoloJet.constant(1.0, 2)
    assert lift_G(one)(0.0, 0.7, -0.2, 2.25) == pytest.approx(1.5)
    assert lift_G(one)(1.0, 0.0, 0.0, 1.0) == pytest.approx(math.exp(-math.pi), rel=1e-14)


def test_structural_residual_constant():
    assert structural_residual(HoloJet.constant(1.0, 2), 0.3 + 0.1j, 0.2 + 1j, 1.5) == pytest.approx(-2j * math.pi * 1.5)


@pytest.mark.parametrize(
    "z, w, v, expected",
    [
        (0, 1j, 1, (0, -1j, cmath.exp(-1j * math.pi / 4))),
        (1j, 1j, 0, (1, -1j, 0)),
    ],
)
def test_schrodinger_coords_examples(z, w, v, expected):
    assert schrodinger_coords(z, w, v) == pytest.approx(expected, abs=1e-15)


def test_schrodinger_coords_round_trip():
    rng = np.random.default_rng(8)
    for _ in range(20):
        z, w, v = complex(*rng.normal(size=2)), complex(rng.normal(), rng.uniform(0.1, 3)), complex(*rng.normal(size=2))
        z2, w2, v2 = schrodinger_coords_inverse(*schrodinger_coords(z, w, v))
        assert abs(z2 - z) < 1e-14 * (1 + abs(z)) and abs(w2 - w) < 1e-14 * abs(w) and abs(v2 - v) < 1e-14 * (1 + abs(v))
    with pytest.raises(ValueError):
        schrodinger_coords(1, 0, 1)


def test_apply_d_examples():
    w = 0.3 + 1.2j
    assert apply_D(HoloJet.constant(1.0, 2), 0.5, w, 1.3) == pytest.approx(2j * math.pi * 1.3 * w)
    assert apply_D(HoloJet.constant(0.0, 2), 0.5, w) == 0
    rng = np.random.default_rng(9)
    k = 2.2
    jet = plane_wave_f2(k, 0.9)
    for _ in range(10):
        z, w = complex(*rng.normal(size=2)), complex(rng.normal(), rng.uniform(0.3, 2))
        assert apply_D(jet, z, w, 0.9) == pytest.approx(-(k**2) * jet(z, w), rel=1e-9)


def _numeric_field(src, hbar=1.0):
    def F(x, y, b, r):
        arrs = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (x, y, b, r)))
        out = np.array([forward(src, tuple(map(float, pt)), hbar).value for pt in zip(*(a.ravel() for a in arrs))])
        return out.reshape(arrs[0].shape)

    return F


def test_d0_example_gaussian():
    got = apply_D0(gaussian_field, (0.2, 0.1, 0.0, 1.0))
    assert abs(got - D0_EXAMPLE) < 1e-5


def test_d0_on_zero():
    assert apply_D0(zero_field, (0.2, 0.1, 0.0, 1.0)) == 0


def test_d0_intertwines_numeric_transforms():
    rng = np.random.default_rng(10)
    cases = [
        (SourceFunction.gaussian(), SourceFunction.gaussian_poly([-2 * math.pi, 0, 4 * math.pi**2])),
        (SourceFunction.gaussian_poly([0, 1]), SourceFunction.gaussian_poly([0, -6 * math.pi, 0, 4 * math.pi**2])),
    ]
    for f, f2 in cases:
        F = _numeric_field(f)
        for _ in range(3):
            p = (rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.6, 1.5))
            assert abs(apply_D0(F, p) - forward(f2, p).value) < 1e-5


def test_d0_on_plane_wave_is_minus_k_squared():
    k = 1.4
    F = lambda *p: plane_wave_metamorphism(PlaneWaveSpec(k), p)
    rng = np.random.default_rng(12)
    for _ in range(5):
        p = (rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.6, 1.5))
        assert apply_D0(F, p) == pytest.approx(-(k**2) * F(*p), rel=1e-5)


def test_prop2_lift_intertwines_d():
    jet = plane_wave_f2(1.1, 1.2)
    GD = lift_G(D_operator(jet, 1.2), 1.2)
    G = lift_G(jet, 1.2)
    for p in [(0.1, 0.2, 0.3, 1.0), (-0.5, 0.4, -0.7, 0.7)]:
        assert abs(GD(*p) - apply_D0(G, p, 1.2)) < 1e-5


def test_stencil_errors():
    with pytest.raises(StencilError):
        apply_annihilator("C2", gaussian_field, (0.0, 0.0, 0.0, 1e-5))
    bad = lambda x, y, b, r: np.where(np.asarray(x) > 0.1, np.nan, 1.0) + 0j
    with pytest.raises(StencilError):
        apply_annihilator("C1", bad, (0.1, 0.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        apply_annihilator("C9", gaussian_field, (0.1, 0.0, 0.0, 1.0))
