"""Exact transforms of Gaussians, plane waves and point masses.

These serve as oracles for the quadrature engine and as test fields for the
image-space operators. All functions broadcast over numpy arrays of phase
coordinates; scalars in give Python complex out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_hbar, check_phase_arrays, check_real
from .core import as_coords, chart, principal_sqrt
from .exceptions import BranchConsistencyError
from .jets import HoloJet

__all__ = [
    "WavePacketSpec",
    "PlaneWaveSpec",
    "safe_exp",
    "gaussian_integral",
    "wave_packet_metamorphism",
    "plane_wave_metamorphism",
    "delta_metamorphism",
    "reproducing_kernel",
    "wave_packet_f2",
    "plane_wave_f2",
]

# below this the double exponential underflows anyway
_EXP_FLOOR = -745.0


@dataclass(frozen=True)
class WavePacketSpec:
    """``f(u) = exp(-pi sigma u^2 - 2 pi i lam u)`` with ``Re sigma > 0``."""

    sigma: complex = 1.0
    lam: float = 0.0

    def __post_init__(self):
        sigma = complex(self.sigma)
        if not (np.isfinite(sigma) and sigma.real > 0):
            raise ValueError(f"wave packet needs Re(sigma) > 0, got {sigma!r}")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "lam", check_real(self.lam, "lam"))

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return np.exp(-np.pi * self.sigma * u**2 - 2j * np.pi * self.lam * u)


@dataclass(frozen=True)
class PlaneWaveSpec:
    """``f(u) = exp(-i k u)``; ``kbar = k / (2 pi)`` is derived."""

    k: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "k", check_real(self.k, "k"))

    @property
    def kbar(self) -> float:
        return self.k / (2 * np.pi)

    def __call__(self, u):
        return np.exp(-1j * self.k * np.asarray(u, dtype=float))


def _out(v):
    return complex(v) if np.ndim(v) == 0 else v


def safe_exp(e):
    """``exp(e)`` with exact zero where ``Re e < -745``."""
    e = np.asarray(e, dtype=complex)
    small = e.real < _EXP_FLOOR
    return np.where(small, 0.0, np.exp(np.where(small, 0.0, e)))


def gaussian_integral(a, z):
    """``integral exp(-pi a u^2 - 2 pi i z u) du = exp(-pi z^2 / a) / sqrt(a)``."""
    a = np.asarray(a, dtype=complex)
    if np.any(~(a.real > 0)):
        raise ValueError("gaussian_integral requires Re(a) > 0")
    return _out(safe_exp(-np.pi * np.asarray(z, dtype=complex) ** 2 / a) / principal_sqrt(a))


def _phase(p):
    return check_phase_arrays(*as_coords(p))


def wave_packet_metamorphism(spec: WavePacketSpec, p, hbar=1.0, *, check=True):
    """Transform of the wave packet ``spec`` at phase point(s) ``p``.

    Evaluated in chart form; with ``check`` the equivalent real form is
    evaluated as well and a relative exponent mismatch above ``1e-12``
    raises :class:`BranchConsistencyError`.
    """
    hbar = check_hbar(hbar)
    x, y, b, r = _phase(p)
    z, w = chart(x, y, b, r)
    sigma, lam = spec.sigma, spec.lam
    d = -1j * w + sigma / hbar
    e_chart = 1j * np.pi * hbar * (2 * x * y + w * y**2) - np.pi * hbar * (z + lam / hbar) ** 2 / d
    if check:
        e_real = -np.pi * sigma * y**2 - 2j * np.pi * lam * y - np.pi * hbar * (x + (lam - 1j * sigma * y) / hbar) ** 2 / d
        scale = 1 + np.abs(e_real) + np.abs(np.pi * hbar * (z + lam / hbar) ** 2 / d)
        if np.any(np.abs(e_chart - e_real) > 1e-12 * scale):
            raise BranchConsistencyError("wave packet closed forms disagree")
    return _out(np.sqrt(r) / principal_sqrt(d) * safe_exp(e_chart))


def plane_wave_metamorphism(spec: PlaneWaveSpec, p, hbar=1.0):
    """Transform of ``exp(-i k u)`` at ``p``."""
    hbar = check_hbar(hbar)
    x, y, b, r = _phase(p)
    d = r**2 - 1j * b
    e = -1j * spec.k * y - np.pi * hbar * (spec.kbar / hbar + x) ** 2 / d
    return _out(np.sqrt(r) / principal_sqrt(d) * safe_exp(e))


def delta_metamorphism(order, p, hbar=1.0):
    """Transform of the point mass at 0 (``order=0``) or of ``f -> f'(0)``.

    ``order=1`` is ``-2 pi i hbar z`` times the ``order=0`` value, which is
    the transform of the functional ``f -> f'(0)`` (the distribution
    ``-delta'``).
    """
    if order not in (0, 1) or isinstance(order, bool):
        raise ValueError(f"order must be 0 or 1, got {order!r}")
    hbar = check_hbar(hbar)
    x, y, b, r = _phase(p)
    e = -np.pi * hbar * (r**2 - 1j * b) * y**2 + 2j * np.pi * hbar * y * x
    val = np.sqrt(hbar * r) * safe_exp(e)
    if order == 1:
        z, _ = chart(x, y, b, r)
        val = -2j * np.pi * hbar * z * val
    return _out(val)


def reproducing_kernel(p, p0, hbar=1.0):
    """``K(p, p0)``: the transform, evaluated at ``p0``, of the coherent state at ``p``.

    Satisfies ``K(p, p0) = conj(K(p0, p))`` and ``K(p, p) = sqrt(hbar / 2)``.
    """
    hbar = check_hbar(hbar)
    x, y, b, r = _phase(p)
    x0, y0, b0, r0 = _phase(p0)
    w0 = b0 + 1j * r0**2
    dd = r0**2 + r**2 + 1j * (b - b0)
    dy = y0 - y
    e = -np.pi * hbar * (x0 - x + w0 * dy) ** 2 / dd + 1j * np.pi * hbar * (2 * dy * x0 + w0 * dy**2)
    return _out(np.sqrt(hbar) * principal_sqrt(r * r0 / dd) * safe_exp(e))


def wave_packet_f2(spec: WavePacketSpec, hbar=1.0) -> HoloJet:
    """Holomorphic factor of the wave packet transform, with analytic partials.

    ``lift_G(wave_packet_f2(spec))`` reproduces :func:`wave_packet_metamorphism`.
    """
    hbar = check_hbar(hbar)
    sigma, lam = spec.sigma, spec.lam
    pi = np.pi

    def parts(z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        dd = 1j * hbar * w - sigma
        q = -1j * w + sigma / hbar
        phi = pi * (lam**2 + 2 * hbar * lam * z) / dd - 1j * pi * sigma * hbar * z**2 / (w * dd)
        f = safe_exp(phi) / principal_sqrt(q)
        return z, w, dd, q, f

    def value(z, w):
        return _out(parts(z, w)[-1])

    def dz(z, w):
        z, w, dd, q, f = parts(z, w)
        return _out(f * (2 * pi * hbar * lam / dd - 2j * pi * sigma * hbar * z / (w * dd)))

    def dzz(z, w):
        z, w, dd, q, f = parts(z, w)
        phi_z = 2 * pi * hbar * lam / dd - 2j * pi * sigma * hbar * z / (w * dd)
        phi_zz = -2j * pi * sigma * hbar / (w * dd)
        return _out(f * (phi_zz + phi_z**2))

    def dw(z, w):
        z, w, dd, q, f = parts(z, w)
        phi_w = -1j * hbar * pi * (lam**2 + 2 * hbar * lam * z) / dd**2 + 1j * pi * sigma * hbar * z**2 * (
            2j * hbar * w - sigma
        ) / (w**2 * dd**2)
        return _out(f * (phi_w + 0.5j / q))

    return HoloJet(value, 2, grad=[dz, dw], hess={0: dzz}, name=f"wave_packet_f2({sigma}, {lam})")


def plane_wave_f2(k, hbar=1.0) -> HoloJet:
    """``exp(-i k z / w + k^2 / (4 pi i hbar w)) / sqrt(-i w)`` with analytic partials."""
    hbar = check_hbar(hbar)
    k = check_real(k, "k")
    c = k**2 / (4j * np.pi * hbar)

    def value(z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        return _out(safe_exp(-1j * k * z / w + c / w) / principal_sqrt(-1j * w))

    def dz(z, w):
        return _out(-1j * k / np.asarray(w, dtype=complex) * value(z, w))

    def dzz(z, w):
        return _out(-(k**2) / np.asarray(w, dtype=complex) ** 2 * value(z, w))

    def dw(z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        return _out((1j * k * z / w**2 - c / w**2 - 0.5 / w) * value(z, w))

    return HoloJet(value, 2, grad=[dz, dw], hess={0: dzz}, name=f"plane_wave_f2({k})")
