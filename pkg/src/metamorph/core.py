"""Domain types, the phase-space/complex chart, and branch conventions.

A phase point ``(x, y, b, r)`` with ``r > 0`` maps to holomorphic
coordinates ``w = b + i r**2`` and ``z = x + w y``. Every complex square
root in the package goes through :func:`principal_sqrt`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._validation import check_hbar, check_positive, check_real

__all__ = [
    "PhasePoint",
    "ComplexChart",
    "ReferenceSheet",
    "QuadratureSpec",
    "Axis",
    "GridSpec",
    "SampledField",
    "phase_to_complex",
    "complex_to_phase",
    "principal_sqrt",
    "chart",
    "as_coords",
]


@dataclass(frozen=True)
class PhasePoint:
    x: float
    y: float
    b: float
    r: float

    def __post_init__(self):
        for name in ("x", "y", "b"):
            object.__setattr__(self, name, check_real(getattr(self, name), name))
        object.__setattr__(self, "r", check_positive(self.r, "r"))

    def astuple(self):
        return (self.x, self.y, self.b, self.r)


@dataclass(frozen=True)
class ComplexChart:
    z: complex
    w: complex

    def __post_init__(self):
        z, w = complex(self.z), complex(self.w)
        if not (np.isfinite(z) and np.isfinite(w)):
            raise ValueError("chart coordinates must be finite")
        if not w.imag > 0:
            raise ValueError(f"degenerate sheet: Im(w) must be positive, got w={w!r}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "w", w)


@dataclass(frozen=True)
class ReferenceSheet:
    """A fixed ``(b0, r0)`` slice of phase space."""

    b0: float = 0.0
    r0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "b0", check_real(self.b0, "b0"))
        object.__setattr__(self, "r0", check_positive(self.r0, "r0"))


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre settings for the forward transform.

    ``panels`` is a lower bound; the panel rule in
    :mod:`metamorph.transform` refines further when the integrand demands it.
    """

    panels: int = 1
    nodes_per_panel: int = 8
    truncation_eps: float = 1e-16
    max_halfwidth: float = 1e4

    def __post_init__(self):
        if int(self.panels) != self.panels or self.panels < 1:
            raise ValueError(f"panels must be a positive integer, got {self.panels!r}")
        if int(self.nodes_per_panel) != self.nodes_per_panel or self.nodes_per_panel < 2:
            raise ValueError(f"nodes_per_panel must be an integer >= 2, got {self.nodes_per_panel!r}")
        if not 0 < self.truncation_eps < 1:
            raise ValueError(f"truncation_eps must lie in (0, 1), got {self.truncation_eps!r}")
        check_positive(self.max_halfwidth, "max_halfwidth")
        object.__setattr__(self, "panels", int(self.panels))
        object.__setattr__(self, "nodes_per_panel", int(self.nodes_per_panel))


@dataclass(frozen=True)
class Axis:
    label: str
    min: float
    max: float
    count: int

    def __post_init__(self):
        if not self.label or "," in self.label:
            raise ValueError(f"invalid axis label {self.label!r}")
        lo, hi = check_real(self.min, "min"), check_real(self.max, "max")
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"axis {self.label!r}: count must be a positive integer")
        if self.count == 1:
            if lo != hi:
                raise ValueError(f"axis {self.label!r}: a single-node axis needs min == max")
        elif not lo < hi:
            raise ValueError(f"axis {self.label!r}: min must be < max")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)
        object.__setattr__(self, "count", int(self.count))

    @property
    def coords(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)

    @property
    def step(self) -> float:
        return 0.0 if self.count == 1 else (self.max - self.min) / (self.count - 1)


@dataclass(frozen=True)
class GridSpec:
    axes: tuple

    def __post_init__(self):
        axes = tuple(a if isinstance(a, Axis) else Axis(*a) for a in self.axes)
        if not axes:
            raise ValueError("a grid needs at least one axis")
        labels = [a.label for a in axes]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate axis labels {labels}")
        object.__setattr__(self, "axes", axes)

    @classmethod
    def from_ranges(cls, **ranges):
        """``GridSpec.from_ranges(x=(-4, 4, 257), y=(-4, 4, 257))``."""
        return cls(tuple(Axis(k, *v) for k, v in ranges.items()))

    @property
    def labels(self):
        return tuple(a.label for a in self.axes)

    @property
    def shape(self):
        return tuple(a.count for a in self.axes)

    @property
    def size(self):
        return int(np.prod(self.shape))

    def coords(self, label) -> np.ndarray:
        return self.axes[self.labels.index(label)].coords

    def mesh(self):
        return np.meshgrid(*(a.coords for a in self.axes), indexing="ij")

    def interior(self) -> "GridSpec":
        """The grid with one boundary node stripped from each end of every axis."""
        new = []
        for a in self.axes:
            if a.count < 3:
                raise ValueError(f"axis {a.label!r} has no interior nodes")
            c = a.coords
            new.append(Axis(a.label, c[1], c[-2], a.count - 2))
        return GridSpec(tuple(new))


@dataclass(frozen=True)
class SampledField:
    """Complex field values on a rectangular grid.

    ``values`` has shape ``grid.shape`` (row-major in axis order). ``kind``
    is ``"phase"`` for transform-side fields over ``(x, y)`` on a fixed sheet
    and ``"physical"`` for source-side fields.
    """

    grid: GridSpec
    values: np.ndarray
    kind: str = "phase"
    hbar: float = 1.0
    sheet: Optional[ReferenceSheet] = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.size != self.grid.size:
            raise ValueError(f"expected {self.grid.size} values for grid {self.grid.shape}, got {values.size}")
        values = values.reshape(self.grid.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        if self.kind not in ("phase", "physical"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "hbar", check_hbar(self.hbar))


def principal_sqrt(a):
    """Principal square root, with ``sqrt(-1) = i`` regardless of the sign of zero.

    Returns a Python complex for scalar input, an array otherwise.
    """
    arr = np.asarray(a, dtype=complex)
    # a negative zero imaginary part would select the lower branch on the cut
    arr = np.where(arr.imag == 0, arr.real + 0j, arr)
    out = np.sqrt(arr)
    return complex(out) if out.ndim == 0 else out


def chart(x, y, b, r):
    """Array version of :func:`phase_to_complex`; returns ``(z, w)``."""
    w = np.asarray(b) + 1j * np.asarray(r) ** 2
    return np.asarray(x) + w * np.asarray(y), w


def phase_to_complex(p: PhasePoint) -> ComplexChart:
    z, w = chart(*p.astuple())
    return ComplexChart(complex(z), complex(w))


def complex_to_phase(c: ComplexChart) -> PhasePoint:
    z, w = complex(c.z), complex(c.w)
    if not w.imag > 0:
        raise ValueError(f"degenerate sheet: Im(w) must be positive, got w={w!r}")
    b = w.real
    y = z.imag / w.imag
    return PhasePoint(x=z.real - b * y, y=y, b=b, r=float(np.sqrt(w.imag)))


def as_coords(p) -> tuple:
    """Unpack a :class:`PhasePoint` or a 4-sequence of array-likes into coordinates."""
    if isinstance(p, PhasePoint):
        return p.astuple()
    if isinstance(p, np.ndarray) and p.ndim >= 1 and p.shape[-1] == 4:
        return tuple(p[..., i] for i in range(4))
    if isinstance(p, Sequence) and len(p) == 4:
        return tuple(p)
    raise TypeError("expected a PhasePoint or four coordinates (x, y, b, r)")
