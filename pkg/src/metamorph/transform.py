"""Quadrature for the forward transform, its inverse, pairing and reproduction.

The forward integrand is a Gaussian envelope times a pure oscillation, so it
is integrated with composite Gauss-Legendre panels on a window sized from
the envelope. Panels are at most a quarter of the envelope width and a
quarter period of the local oscillation.

Pairing, reproduction and inversion integrate sampled fields over a fixed
``(b0, r0)`` sheet with the 2D trapezoid rule, which is spectrally accurate
for the rapidly decaying integrands involved; the decay is checked at the
grid boundary rather than assumed.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from ._validation import check_hbar, check_positive, check_real
from .core import GridSpec, PhasePoint, QuadratureSpec, ReferenceSheet, SampledField
from .closed_forms import reproducing_kernel
from .exceptions import BoundaryDecayError, QuadratureError

__all__ = [
    "SourceFunction",
    "ForwardResult",
    "thread_count",
    "forward",
    "forward_grid",
    "forward2",
    "inner_product",
    "pairing",
    "reproduce",
    "inverse",
    "calibration_constant",
    "sheet_grid",
]

DECAY_TOL = 1e-8


def thread_count() -> int:
    """Worker count from ``METAMORPH_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get("METAMORPH_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"METAMORPH_THREADS must be a non-negative integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"METAMORPH_THREADS must be a non-negative integer, got {raw!r}")
    return n or (os.cpu_count() or 1)


def _map_rows(fn, n_rows):
    """Apply ``fn`` to every row index; order of evaluation does not affect results."""
    workers = min(thread_count(), n_rows)
    if workers <= 1:
        return [fn(j) for j in range(n_rows)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_rows)))


def _poly_gauss_sup(j, a):
    # sup_u |u|^j exp(-a u^2)
    return 1.0 if j == 0 else (j / (2 * a * math.e)) ** (j / 2)


@dataclass(frozen=True)
class SourceFunction:
    """A function on the real line with an envelope bound used for truncation.

    ``|func(u)| <= bound * exp(-decay * u**2)`` must hold; local angular
    frequency is at most ``frequency + chirp * |u|``. The bound is
    spot-checked at every quadrature node.
    """

    func: Callable
    bound: float = 1.0
    decay: float = 0.0
    frequency: float = 0.0
    chirp: float = 0.0
    name: str = ""

    def __post_init__(self):
        if not callable(self.func):
            raise TypeError("func must be callable")
        object.__setattr__(self, "bound", check_positive(self.bound, "bound"))
        for name in ("decay", "frequency", "chirp"):
            v = check_real(getattr(self, name), name)
            if v < 0:
                raise ValueError(f"{name} must be non-negative, got {v!r}")
            object.__setattr__(self, name, v)

    def __call__(self, u):
        return np.asarray(self.func(np.asarray(u, dtype=float)), dtype=complex)

    @classmethod
    def wave_packet(cls, sigma=1.0, lam=0.0, shift=0.0):
        """``exp(-pi sigma (u - shift)^2 - 2 pi i lam u)``."""
        sigma = complex(sigma)
        if not sigma.real > 0:
            raise ValueError("wave packet needs Re(sigma) > 0")
        lam, shift = float(lam), float(shift)

        def f(u):
            return np.exp(-np.pi * sigma * (u - shift) ** 2 - 2j * np.pi * lam * u)

        if shift == 0:
            bound, decay = 1.0, np.pi * sigma.real
        else:
            bound, decay = math.exp(np.pi * sigma.real * shift**2), np.pi * sigma.real / 2
        return cls(
            f,
            bound=bound,
            decay=decay,
            frequency=2 * np.pi * (abs(lam) + abs(sigma.imag * shift)),
            chirp=2 * np.pi * abs(sigma.imag),
            name=f"wave_packet(sigma={sigma}, lam={lam}, shift={shift})",
        )

    @classmethod
    def gaussian(cls, sigma=1.0, shift=0.0):
        return cls.wave_packet(sigma, 0.0, shift)

    @classmethod
    def plane_wave(cls, k):
        k = float(k)
        return cls(lambda u: np.exp(-1j * k * u), frequency=abs(k), name=f"plane_wave(k={k})")

    @classmethod
    def gaussian_poly(cls, coeffs, sigma=1.0):
        """``(c0 + c1 u + c2 u^2 + ...) exp(-pi sigma u^2)``, coefficients ascending."""
        coeffs = np.asarray(coeffs, dtype=complex)
        sigma = check_positive(sigma, "sigma")
        half = np.pi * sigma / 2
        bound = sum(abs(c) * _poly_gauss_sup(j, half) for j, c in enumerate(coeffs)) or 1.0

        def f(u):
            return np.polynomial.polynomial.polyval(u, coeffs) * np.exp(-np.pi * sigma * u**2)

        return cls(f, bound=bound, decay=half, name=f"gaussian_poly({coeffs.tolist()}, sigma={sigma})")

    @classmethod
    def nascent_delta(cls, sigma=1e12, order=0):
        """Narrow Gaussian ``sqrt(s) exp(-pi s u^2)`` approximating the point mass.

        ``order=1`` gives minus its derivative, which approximates ``f -> f'(0)``.
        """
        s = check_positive(sigma, "sigma")
        if order == 0:
            return cls(lambda u: math.sqrt(s) * np.exp(-np.pi * s * u**2), bound=math.sqrt(s), decay=np.pi * s, name="nascent_delta")
        if order == 1:
            bound = 2 * math.sqrt(np.pi) * s * math.exp(-0.5)
            return cls(
                lambda u: 2 * np.pi * s * u * math.sqrt(s) * np.exp(-np.pi * s * u**2),
                bound=bound,
                decay=np.pi * s / 2,
                name="nascent_delta'",
            )
        raise ValueError(f"order must be 0 or 1, got {order!r}")


class ForwardResult(NamedTuple):
    value: complex
    abserr: float


@lru_cache(maxsize=64)
def _gl(n):
    return np.polynomial.legendre.leggauss(n)


@dataclass(frozen=True)
class _Layout:
    nodes: np.ndarray
    weights: np.ndarray
    half_weights: np.ndarray = field(repr=False)
    half_nodes: np.ndarray = field(repr=False)


def _window(f: SourceFunction, y_lo, y_hi, b, r, x_abs, hbar, q: QuadratureSpec):
    """Composite Gauss-Legendre nodes covering the envelope for every ``y`` in ``[y_lo, y_hi]``."""
    g = np.pi * hbar * r**2
    beta = f.decay + g
    c_lo, c_hi = g * y_lo / beta, g * y_hi / beta
    half = math.sqrt(math.log(max(f.bound, 1.0) / q.truncation_eps) / beta)
    if half > q.max_halfwidth:
        raise QuadratureError(
            f"truncation half-width {half:.3g} exceeds max_halfwidth {q.max_halfwidth:.3g}; "
            "the source decays too slowly for the requested tail tolerance"
        )
    lo, hi = c_lo - half, c_hi + half
    u_max = max(abs(lo), abs(hi))
    dy_max = max(abs(lo - y_lo), abs(hi - y_hi), abs(lo - y_hi), abs(hi - y_lo))
    omega = 2 * np.pi * hbar * (x_abs + abs(b) * dy_max) + f.frequency + f.chirp * u_max
    width = 0.25 / math.sqrt(beta)
    if omega > 0:
        width = min(width, np.pi / (2 * omega))
    n_panels = max(q.panels, math.ceil((hi - lo) / width))
    edges = np.linspace(lo, hi, n_panels + 1)
    mids, halves = (edges[1:] + edges[:-1]) / 2, (edges[1:] - edges[:-1]) / 2

    def rule(n):
        t, wt = _gl(n)
        return (mids[:, None] + halves[:, None] * t).ravel(), (halves[:, None] * wt).ravel()

    nodes, weights = rule(q.nodes_per_panel)
    hn, hw = rule(max(2, q.nodes_per_panel // 2))
    return _Layout(nodes, weights, hw, hn)


def _sample(f: SourceFunction, u):
    vals = f(u)
    if vals.shape != u.shape:
        vals = np.broadcast_to(vals, u.shape).astype(complex)
    if not np.all(np.isfinite(vals)):
        raise QuadratureError(f"non-finite sample of {f.name or 'source'}")
    envelope = f.bound * np.exp(-f.decay * u**2)
    if np.any(np.abs(vals) > envelope * (1 + 1e-9) + 1e-300):
        raise ValueError(f"decay bound of {f.name or 'source'} is violated at a quadrature node")
    return vals


def _kernel(u, x, y, b, r, hbar):
    d = u - y
    return np.exp(-np.pi * hbar * ((r**2 - 1j * b) * d**2 + 2j * d * x))


def forward(f: SourceFunction, p, hbar=1.0, q: QuadratureSpec | None = None) -> ForwardResult:
    """Transform of ``f`` at a single phase point, with an error estimate.

    The error estimate is the difference from the rule with half as many
    nodes per panel, so it bounds the coarse rule and overstates the error
    of the returned value.
    """
    hbar = check_hbar(hbar)
    q = q or QuadratureSpec()
    p = p if isinstance(p, PhasePoint) else PhasePoint(*p)
    x, y, b, r = p.astuple()
    lay = _window(f, y, y, b, r, abs(x), hbar, q)
    pref = math.sqrt(hbar * r)
    full = pref * np.sum(lay.weights * _sample(f, lay.nodes) * _kernel(lay.nodes, x, y, b, r, hbar))
    coarse = pref * np.sum(lay.half_weights * _sample(f, lay.half_nodes) * _kernel(lay.half_nodes, x, y, b, r, hbar))
    return ForwardResult(complex(full), float(abs(full - coarse)))


def sheet_grid(x_range=(-4.0, 4.0, 257), y_range=(-4.0, 4.0, 257)) -> GridSpec:
    return GridSpec.from_ranges(x=tuple(x_range), y=tuple(y_range))


def _check_xy(grid: GridSpec):
    if grid.labels != ("x", "y"):
        raise ValueError(f"expected a grid over axes ('x', 'y'), got {grid.labels}")


def forward_grid(f: SourceFunction, grid: GridSpec, sheet=None, hbar=1.0, q: QuadratureSpec | None = None) -> SampledField:
    """Transform of ``f`` on an ``(x, y)`` grid of the sheet ``(b0, r0)``.

    All nodes share one quadrature layout, so the kernel factorises into an
    ``x``-only oscillation and a ``y``-dependent envelope. Rows are computed
    independently (optionally in parallel) with identical arithmetic, so the
    result does not depend on the thread count.
    """
    hbar = check_hbar(hbar)
    q = q or QuadratureSpec()
    sheet = sheet or ReferenceSheet()
    _check_xy(grid)
    xs, ys = grid.coords("x"), grid.coords("y")
    b, r = sheet.b0, sheet.r0
    lay = _window(f, ys.min(), ys.max(), b, r, float(np.max(np.abs(xs))), hbar, q)
    u = lay.nodes
    wf = lay.weights * _sample(f, u)
    osc = np.exp(-2j * np.pi * hbar * np.outer(u, xs))
    pref = math.sqrt(hbar * r)

    def column(j):
        y = ys[j]
        env = wf * np.exp(-np.pi * hbar * (r**2 - 1j * b) * (u - y) ** 2)
        out = pref * np.exp(2j * np.pi * hbar * y * xs) * np.sum(env[:, None] * osc, axis=0)
        if not np.all(np.isfinite(out)):
            raise QuadratureError(f"non-finite transform value in grid column y[{j}]")
        return out

    cols = _map_rows(column, len(ys))
    values = np.stack(cols, axis=1)
    return SampledField(grid, values, kind="phase", hbar=hbar, sheet=sheet, meta={"source": f.name})


def forward2(func2, p1, p2, hbar=1.0, q: QuadratureSpec | None = None, *, bound=1.0, frequency=0.0) -> complex:
    """Transform in each of two variables of a bounded ``func2(u1, u2)``.

    ``frequency`` bounds the angular frequency of ``func2`` in either variable.
    """
    hbar = check_hbar(hbar)
    q = q or QuadratureSpec()
    src = SourceFunction(lambda u: np.ones_like(u, dtype=complex), bound=bound, frequency=frequency)
    p1 = p1 if isinstance(p1, PhasePoint) else PhasePoint(*p1)
    p2 = p2 if isinstance(p2, PhasePoint) else PhasePoint(*p2)
    lays, kers = [], []
    for p in (p1, p2):
        x, y, b, r = p.astuple()
        lay = _window(src, y, y, b, r, abs(x), hbar, q)
        lays.append(lay)
        kers.append(math.sqrt(hbar * r) * lay.weights * _kernel(lay.nodes, x, y, b, r, hbar))
    u2 = lays[1].nodes

    def row(i):
        vals = np.asarray(func2(np.full(u2.shape, lays[0].nodes[i]), u2), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise QuadratureError("non-finite sample of the two-variable source")
        if np.any(np.abs(vals) > bound * (1 + 1e-9)):
            raise ValueError("bound of the two-variable source is violated at a quadrature node")
        return np.sum(vals * kers[1])

    inner = np.array(_map_rows(row, len(lays[0].nodes)))
    return complex(np.sum(kers[0] * inner))


def inner_product(f1: SourceFunction, f2: SourceFunction, q: QuadratureSpec | None = None) -> complex:
    """``integral f1 conj(f2) du`` with the same panel rule as :func:`forward`."""
    q = q or QuadratureSpec()
    beta = f1.decay + f2.decay
    if beta <= 0:
        raise QuadratureError("inner product needs at least one decaying factor")
    prod = SourceFunction(
        lambda u: f1(u) * np.conj(f2(u)),
        bound=f1.bound * f2.bound,
        decay=beta,
        frequency=f1.frequency + f2.frequency,
        chirp=f1.chirp + f2.chirp,
    )
    # a window with a vanishing kernel envelope: hbar r^2 -> tiny
    lay = _window(prod, 0.0, 0.0, 0.0, 1e-9, 0.0, 1.0, q)
    return complex(np.sum(lay.weights * _sample(prod, lay.nodes)))


def _trapz_weights(grid: GridSpec):
    w = []
    for a in grid.axes:
        if a.count < 2:
            raise ValueError(f"axis {a.label!r} needs at least two nodes for integration")
        wa = np.full(a.count, a.step)
        wa[0] = wa[-1] = a.step / 2
        w.append(wa)
    return np.outer(w[0], w[1])


def _boundary_max(arr):
    return max(np.abs(arr[0]).max(), np.abs(arr[-1]).max(), np.abs(arr[:, 0]).max(), np.abs(arr[:, -1]).max())


def _check_decay(arr, what, tol=DECAY_TOL):
    peak = np.abs(arr).max()
    if peak > 0 and _boundary_max(arr) > tol * peak:
        raise BoundaryDecayError(
            f"{what} does not decay below {tol:g} (relative) at the grid boundary; enlarge the grid"
        )


def _resolve_sheet(F: SampledField, sheet):
    if sheet is None:
        sheet = F.sheet
    if sheet is None:
        raise ValueError("the field carries no sheet; pass sheet=ReferenceSheet(b0, r0)")
    if F.sheet is not None and F.sheet != sheet:
        raise ValueError(f"field sheet {F.sheet} does not match requested sheet {sheet}")
    return sheet


def pairing(F1: SampledField, F2: SampledField, sheet=None, hbar=1.0, *, decay_tol=DECAY_TOL) -> complex:
    """Phase-space inner product ``sqrt(2 hbar) * integral F1 conj(F2) dx dy`` on a sheet.

    For transforms of square-integrable ``f1, f2`` this equals
    ``integral f1 conj(f2) du``, independently of the sheet.
    """
    hbar = check_hbar(hbar)
    if F1.grid != F2.grid:
        raise ValueError("fields must share a grid")
    _check_xy(F1.grid)
    sheet = _resolve_sheet(F1, sheet)
    _resolve_sheet(F2, sheet)
    prod = F1.values * np.conj(F2.values)
    _check_decay(prod, "the pairing integrand", decay_tol)
    return complex(math.sqrt(2 * hbar) * np.sum(_trapz_weights(F1.grid) * prod))


def reproduce(F: SampledField, p, sheet=None, hbar=1.0, *, decay_tol=DECAY_TOL) -> complex:
    """Value at ``p`` (any ``b, r``) of the transform whose sheet slice is ``F``."""
    hbar = check_hbar(hbar)
    _check_xy(F.grid)
    sheet = _resolve_sheet(F, sheet)
    p = p if isinstance(p, PhasePoint) else PhasePoint(*p)
    X, Y = F.grid.mesh()
    kern = reproducing_kernel(p.astuple(), (X, Y, sheet.b0, sheet.r0), hbar)
    K = SampledField(F.grid, kern, hbar=hbar, sheet=sheet)
    return pairing(F, K, sheet, hbar, decay_tol=decay_tol)


def _raw_inverse(F: SampledField, u, sheet: ReferenceSheet, hbar, decay_tol):
    u = np.atleast_1d(np.asarray(u, dtype=float))
    X, Y = F.grid.mesh()
    W = _trapz_weights(F.grid)
    b0, r0 = sheet.b0, sheet.r0
    out = np.empty(u.shape, dtype=complex)
    for i, ui in enumerate(u):
        d = ui - Y
        env = np.exp(-np.pi * hbar * r0**2 * d**2)
        _check_decay(F.values * env, f"the inversion integrand at u={ui:g}", decay_tol)
        ker = env * np.exp(-np.pi * hbar * (1j * b0 * d**2 - 2j * d * X))
        out[i] = math.sqrt(r0) * np.sum(W * F.values * ker)
    return out


@lru_cache(maxsize=32)
def _calibration(hbar, b0, r0, grid: GridSpec, q: QuadratureSpec):
    sheet = ReferenceSheet(b0, r0)
    phi = SourceFunction.gaussian()
    F = forward_grid(phi, grid, sheet, hbar, q)
    return float(1.0 / _raw_inverse(F, [0.0], sheet, hbar, DECAY_TOL)[0].real)


def calibration_constant(sheet=None, hbar=1.0, grid: GridSpec | None = None, q: QuadratureSpec | None = None) -> float:
    """Normalisation ``c`` making the inversion exact for the unit Gaussian at ``u = 0``.

    Computed once per ``(hbar, sheet, grid, quadrature)`` and cached. The
    exact value is ``sqrt(2) * hbar``; the calibrated value differs from it
    only by discretisation error.
    """
    hbar = check_hbar(hbar)
    sheet = sheet or ReferenceSheet()
    grid = grid or sheet_grid()
    _check_xy(grid)
    return _calibration(hbar, sheet.b0, sheet.r0, grid, q or QuadratureSpec())


def inverse(F: SampledField, u, sheet=None, hbar=1.0, q: QuadratureSpec | None = None, *, calibration=None, decay_tol=DECAY_TOL):
    """Recover source values at ``u`` from a sheet slice ``F``.

    ``calibration`` overrides the cached constant from
    :func:`calibration_constant` (computed on ``F``'s grid).
    """
    hbar = check_hbar(hbar)
    _check_xy(F.grid)
    sheet = _resolve_sheet(F, sheet)
    c = calibration if calibration is not None else calibration_constant(sheet, hbar, F.grid, q)
    out = c * _raw_inverse(F, u, sheet, hbar, decay_tol)
    return complex(out[0]) if np.ndim(u) == 0 else out
