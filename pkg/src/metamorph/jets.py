"""Holomorphic jets and the image-space differential calculus.

Two kinds of objects live here:

* :class:`HoloJet` bundles a holomorphic function of several complex
  arguments with evaluators for the partial derivatives the residual
  formulas need. Missing partials fall back to contour (Lyness-Moler)
  differentiation, which is the holomorphic analogue of the complex step.
* *field functions*: plain callables ``F(x, y, b, r)`` on phase space,
  vectorised over numpy arrays. The annihilators ``C1, C2, S1, S2`` and the
  order-reducing operator ``D0`` act on them through central differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from ._validation import check_hbar, check_phase_arrays
from .core import as_coords, chart, principal_sqrt
from .exceptions import BranchConsistencyError, StencilError

__all__ = [
    "HoloJet",
    "contour_derivative",
    "cauchy_riemann_residual",
    "jet_consistency",
    "FdScheme",
    "apply_annihilator",
    "lift_G",
    "structural_residual",
    "schrodinger_coords",
    "schrodinger_coords_inverse",
    "apply_D0",
    "apply_D",
    "D_operator",
    "ANNIHILATORS",
]

ANNIHILATORS = ("C1", "C2", "S1", "S2")


def contour_derivative(func, args, i, order=1, radius=1e-2, n_points=24):
    """Derivative of ``func`` in its ``i``-th argument by the Cauchy integral.

    Samples ``func`` on a circle of radius ``radius * (1 + |a_i|)`` and applies
    the trapezoid rule, which converges geometrically for holomorphic
    integrands. ``func`` must broadcast over numpy arrays.
    """
    args = [np.asarray(a, dtype=complex) for a in args]
    theta = 2 * np.pi * np.arange(n_points) / n_points
    rho = radius * (1 + np.abs(args[i]))
    shifted = []
    for j, a in enumerate(args):
        if j == i:
            shifted.append(a[..., None] + rho[..., None] * np.exp(1j * theta))
        else:
            shifted.append(a[..., None])
    vals = func(*shifted)
    coeff = np.mean(vals * np.exp(-1j * order * theta), axis=-1)
    out = factorial(order) * coeff / rho**order
    return complex(out) if out.ndim == 0 else out


def cauchy_riemann_residual(func, args, i, h=1e-5):
    """``|(d/dRe + i d/dIm) f|`` in argument ``i``, by central differences.

    Vanishes (to O(h**2)) for functions holomorphic in that argument.
    """
    args = [np.asarray(a, dtype=complex) for a in args]

    def at(delta):
        shifted = list(args)
        shifted[i] = args[i] + delta
        return np.asarray(func(*shifted))

    d_re = (at(h) - at(-h)) / (2 * h)
    d_im = (at(1j * h) - at(-1j * h)) / (2 * h)
    return np.abs(d_re + 1j * d_im)


class HoloJet:
    """A holomorphic function of ``arity`` complex arguments plus its partials.

    Parameters
    ----------
    func : callable
        ``func(*args)``; must broadcast over numpy arrays.
    arity : int
        Number of complex arguments.
    grad : sequence of callables or None, optional
        First partials, one per argument. ``None`` entries are computed by
        contour differentiation.
    hess : dict, optional
        Diagonal second partials keyed by argument index.
    radius : float
        Relative contour radius used for the fallback derivatives.
    """

    def __init__(self, func, arity, grad=None, hess=None, radius=1e-2, name=""):
        self.func = func
        self.arity = int(arity)
        grad = tuple(grad) if grad is not None else (None,) * self.arity
        if len(grad) != self.arity:
            raise ValueError(f"expected {self.arity} gradient entries, got {len(grad)}")
        self.grad = grad
        self.hess = dict(hess or {})
        self.radius = radius
        self.name = name

    def __repr__(self):
        return f"HoloJet({self.name or self.func!r}, arity={self.arity})"

    def __call__(self, *args):
        self._check_arity(args)
        return self.func(*args)

    def _check_arity(self, args):
        if len(args) != self.arity:
            raise TypeError(f"jet takes {self.arity} arguments, got {len(args)}")

    def d(self, i, *args):
        """First partial in argument ``i``."""
        self._check_arity(args)
        if self.grad[i] is not None:
            return self.grad[i](*args)
        return contour_derivative(self.func, args, i, 1, self.radius)

    def dd(self, i, *args):
        """Second partial in argument ``i``."""
        self._check_arity(args)
        if i in self.hess:
            return self.hess[i](*args)
        return contour_derivative(self.func, args, i, 2, self.radius)

    @classmethod
    def constant(cls, value, arity):
        value = complex(value)

        def const(*args):
            return value + 0 * np.add.reduce(np.broadcast_arrays(*[np.asarray(a, dtype=complex) for a in args]))

        def zero(*args):
            return 0 * const(*args)

        return cls(const, arity, grad=[zero] * arity, hess={i: zero for i in range(arity)}, name=f"const({value})")


def jet_consistency(jet: HoloJet, args, *, second=(), radius=1e-2):
    """Largest relative mismatch between stated partials and contour derivatives."""
    worst = 0.0
    checks = [(i, 1) for i in range(jet.arity) if jet.grad[i] is not None]
    checks += [(i, 2) for i in second if i in jet.hess]
    for i, order in checks:
        stated = jet.d(i, *args) if order == 1 else jet.dd(i, *args)
        ref = contour_derivative(jet.func, args, i, order, radius)
        scale = np.maximum(np.abs(ref), np.abs(jet.func(*args)))
        rel = np.max(np.abs(stated - ref) / np.where(scale > 0, scale, 1.0))
        worst = max(worst, float(rel))
    return worst


@dataclass(frozen=True)
class FdScheme:
    """Central-difference steps for phase-space derivatives.

    Steps are ``rel * (1 + |coordinate|)``. ``index_map`` assigns the
    numbered partials used by ``C1``, ``C2`` and ``D0`` to coordinates; the
    default is ``d0=dx, d1=dy, d2=db, d3=dr``.
    """

    first_rel: float = 1e-5
    second_rel: float = 1e-4
    index_map: tuple = ("x", "y", "b", "r")

    def __post_init__(self):
        if not (self.first_rel > 0 and self.second_rel > 0):
            raise ValueError("finite-difference steps must be positive")
        if sorted(self.index_map) != ["b", "r", "x", "y"]:
            raise ValueError(f"index_map must be a permutation of x, y, b, r, got {self.index_map!r}")


_AXIS = {"x": 0, "y": 1, "b": 2, "r": 3}


class _Stencil:
    """Evaluates ``F`` around ``coords`` and caches the derivatives it needs."""

    def __init__(self, F, coords, fd: FdScheme):
        self.F = F
        self.c = [np.asarray(c, dtype=float) for c in coords]
        self.fd = fd
        self.cache = {}
        self.f0 = self._eval(self.c)

    def _eval(self, c):
        out = np.asarray(self.F(*c), dtype=complex)
        if not np.all(np.isfinite(out)):
            raise StencilError("non-finite field value inside a finite-difference stencil")
        return out

    def _step(self, axis, rel):
        c = self.c[axis]
        h = rel * (1 + np.abs(c))
        if np.any(c + h == c):
            raise StencilError("finite-difference step underflows the coordinate")
        if axis == 3 and np.any(c - 2 * h <= 0):
            raise StencilError("point too close to r = 0 for the stencil")
        return h

    def _shift(self, moves):
        c = list(self.c)
        for axis, delta in moves:
            c[axis] = c[axis] + delta
        return self._eval(c)

    def first(self, name):
        key = ("d", name)
        if key not in self.cache:
            a = _AXIS[name]
            h = self._step(a, self.fd.first_rel)
            self.cache[key] = (self._shift([(a, h)]) - self._shift([(a, -h)])) / (2 * h)
        return self.cache[key]

    def indexed(self, k):
        return self.first(self.fd.index_map[k])

    def second(self, name):
        key = ("dd", name)
        if key not in self.cache:
            if len(name) == 1 or name[0] == name[1]:
                a = _AXIS[name[0]]
                h = self._step(a, self.fd.second_rel)
                val = (self._shift([(a, h)]) - 2 * self.f0 + self._shift([(a, -h)])) / h**2
            else:
                a1, a2 = _AXIS[name[0]], _AXIS[name[1]]
                h1 = self._step(a1, self.fd.second_rel)
                h2 = self._step(a2, self.fd.second_rel)
                val = (
                    self._shift([(a1, h1), (a2, h2)])
                    - self._shift([(a1, h1), (a2, -h2)])
                    - self._shift([(a1, -h1), (a2, h2)])
                    + self._shift([(a1, -h1), (a2, -h2)])
                ) / (4 * h1 * h2)
            self.cache[key] = val
        return self.cache[key]


def _annihilator_terms(which, st: _Stencil, hbar):
    x, y, b, r = st.c
    F = st.f0
    pi = np.pi
    if which == "C1":
        return [(r**2 - 1j * b) / r * st.indexed(0), 1j / r * st.indexed(1), 2 * pi * hbar * x / r * F]
    if which == "C2":
        return [2 * r**2 * st.indexed(2), 1j * r * st.indexed(3), -0.5j * F]
    if which == "S1":
        return [4j * pi * hbar * r**2 * st.first("b"), -(r**2) * st.second("xx")]
    if which == "S2":
        return [
            -2j * pi * hbar * r * st.first("r"),
            -b * st.second("xx"),
            st.second("xy"),
            -2j * pi * hbar * x * st.first("x"),
            -1j * pi * hbar * F,
        ]
    raise ValueError(f"unknown annihilator {which!r}; expected one of {ANNIHILATORS}")


def _finish(terms, with_scale):
    value = sum(terms)
    value = complex(value) if np.ndim(value) == 0 else value
    if not with_scale:
        return value
    scale = sum(np.abs(t) for t in terms)
    return value, (float(scale) if np.ndim(scale) == 0 else scale)


def apply_annihilator(which, F, p, hbar=1.0, fd=None, *, with_scale=False):
    """Apply ``C1``, ``C2``, ``S1`` or ``S2`` to the field ``F`` at ``p``.

    Derivatives are central differences of ``F`` re-evaluated at stencil
    points. With ``with_scale=True`` the sum of the magnitudes of the
    operator's individual terms is returned as well; the residual of an
    image-space field is small relative to it.
    """
    hbar = check_hbar(hbar)
    coords = check_phase_arrays(*as_coords(p))
    st = _Stencil(F, coords, fd or FdScheme())
    return _finish(_annihilator_terms(which, st, hbar), with_scale)


def apply_D0(F, p, hbar=1.0, fd=None, *, with_scale=False):
    """First-order operator ``D0`` that equals ``d^2/dy^2`` on the image space."""
    hbar = check_hbar(hbar)
    coords = check_phase_arrays(*as_coords(p))
    st = _Stencil(F, coords, fd or FdScheme())
    x, y, b, r = st.c
    w = b + 1j * r**2
    c = 2j * np.pi * hbar
    terms = [c * w * x * st.indexed(0), c * x * st.indexed(1), 2 * c * w**2 * st.indexed(2), c * w * st.f0]
    return _finish(terms, with_scale)


def lift_G(f2: HoloJet, hbar=1.0):
    """The field ``p -> sqrt(r) exp(-pi i hbar x^2 / w) f2(z, w)``.

    Returns a vectorised field function. The exponent is evaluated in both of
    its equivalent forms and a disagreement raises
    :class:`~metamorph.exceptions.BranchConsistencyError`.
    """
    hbar = check_hbar(hbar)

    def field(x, y, b, r):
        x, y, b, r = check_phase_arrays(x, y, b, r)
        z, w = chart(x, y, b, r)
        e_real_form = -np.pi * hbar * x**2 / (r**2 - 1j * b)
        e_chart_form = -1j * np.pi * hbar * x**2 / w
        if np.any(np.abs(e_real_form - e_chart_form) > 1e-12 * (1 + np.abs(e_real_form))):
            raise BranchConsistencyError("the two forms of the lift exponent disagree")
        out = np.sqrt(r) * np.exp(e_chart_form) * f2(z, w)
        return complex(out) if np.ndim(out) == 0 else out

    return field


def structural_residual(f2: HoloJet, z, w, hbar=1.0, *, with_scale=False):
    """``w f_zz - 4 pi i hbar (z f_z + w f_w) - 2 pi i hbar f``.

    Zero exactly when ``lift_G(f2)`` is also annihilated by ``S1``; in fact
    ``S1[G f2] = -(r^2 / w) G[residual]`` and ``S2[G f2] = -i S1[G f2]``.
    """
    hbar = check_hbar(hbar)
    c = 4j * np.pi * hbar
    terms = [w * f2.dd(0, z, w), -c * z * f2.d(0, z, w), -c * w * f2.d(1, z, w), -0.5 * c * f2(z, w)]
    return _finish(terms, with_scale)


def schrodinger_coords(z, w, f2val):
    """Map ``(z, w, f2) -> (z/w, 1/w, f2/sqrt(w))``."""
    w = complex(w) if np.ndim(w) == 0 else np.asarray(w, dtype=complex)
    if np.any(w == 0):
        raise ValueError("w must be nonzero")
    return z / w, 1 / w, f2val / principal_sqrt(w)


def schrodinger_coords_inverse(s, tau, g):
    """Inverse of :func:`schrodinger_coords` for ``w`` in the upper half plane."""
    if np.any(np.asarray(tau) == 0):
        raise ValueError("tau must be nonzero")
    w = 1 / tau
    return s * w, w, g * principal_sqrt(w)


def apply_D(f2: HoloJet, z, w, hbar=1.0, *, with_scale=False):
    """``2 pi i hbar w (2 z f_z + 2 w f_w + f)``, the holomorphic form of ``D0``."""
    hbar = check_hbar(hbar)
    c = 2j * np.pi * hbar * w
    terms = [2 * c * z * f2.d(0, z, w), 2 * c * w * f2.d(1, z, w), c * f2(z, w)]
    return _finish(terms, with_scale)


def D_operator(f2: HoloJet, hbar=1.0) -> HoloJet:
    """``D f2`` packaged as a jet (partials by contour differentiation)."""
    hbar = check_hbar(hbar)
    return HoloJet(lambda z, w: apply_D(f2, z, w, hbar), 2, name=f"D[{f2.name}]")
