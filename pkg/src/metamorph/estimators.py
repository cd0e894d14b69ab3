"""scikit-learn style wrappers around the functional API."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_complex_array, check_hbar
from .core import GridSpec, QuadratureSpec, ReferenceSheet, SampledField
from .helmholtz import BeamSpec, _converge, beam_nodes, gaussian_beam_f3, reconstruct_physical_field
from .transform import SourceFunction, calibration_constant, forward_grid, inverse, sheet_grid

__all__ = ["Metamorphism", "GaussianBeam"]


class Metamorphism(TransformerMixin, BaseEstimator):
    """Forward and inverse transform on a fixed ``(b0, r0)`` sheet.

    ``transform`` maps a list of :class:`~metamorph.transform.SourceFunction`
    to an array of shape ``(n_sources, nx * ny)`` holding the flattened
    sheet slices; ``inverse_transform`` maps such rows back to source values
    at ``u_eval``.

    Parameters
    ----------
    hbar : float
    b0, r0 : float
        The sheet.
    x_range, y_range : tuple
        ``(min, max, count)`` of the sheet grid.
    nodes_per_panel, truncation_eps, max_halfwidth
        Forward quadrature settings, see :class:`~metamorph.core.QuadratureSpec`.
    u_eval : array-like or None
        Points for ``inverse_transform``; defaults to 11 points on ``[-2, 2]``.

    Attributes
    ----------
    sheet_, grid_, quadrature_ : the validated settings
    calibration_ : float
        Inversion constant for this sheet and grid.
    """

    def __init__(
        self,
        hbar=1.0,
        b0=0.0,
        r0=1.0,
        x_range=(-4.0, 4.0, 257),
        y_range=(-4.0, 4.0, 257),
        nodes_per_panel=8,
        truncation_eps=1e-16,
        max_halfwidth=1e4,
        u_eval=None,
    ):
        self.hbar = hbar
        self.b0 = b0
        self.r0 = r0
        self.x_range = x_range
        self.y_range = y_range
        self.nodes_per_panel = nodes_per_panel
        self.truncation_eps = truncation_eps
        self.max_halfwidth = max_halfwidth
        self.u_eval = u_eval

    def fit(self, X=None, y=None):
        self.hbar_ = check_hbar(self.hbar)
        self.sheet_ = ReferenceSheet(self.b0, self.r0)
        self.grid_ = sheet_grid(self.x_range, self.y_range)
        self.quadrature_ = QuadratureSpec(
            nodes_per_panel=self.nodes_per_panel,
            truncation_eps=self.truncation_eps,
            max_halfwidth=self.max_halfwidth,
        )
        self.u_eval_ = np.linspace(-2, 2, 11) if self.u_eval is None else np.asarray(self.u_eval, dtype=float).ravel()
        self.calibration_ = calibration_constant(self.sheet_, self.hbar_, self.grid_, self.quadrature_)
        return self

    def field(self, f: SourceFunction) -> SampledField:
        check_is_fitted(self, "calibration_")
        return forward_grid(f, self.grid_, self.sheet_, self.hbar_, self.quadrature_)

    def transform(self, X):
        check_is_fitted(self, "calibration_")
        if isinstance(X, SourceFunction):
            X = [X]
        for f in X:
            if not isinstance(f, SourceFunction):
                raise TypeError(f"expected SourceFunction instances, got {type(f).__name__}")
        return np.stack([self.field(f).values.ravel() for f in X])

    def inverse_transform(self, Xt):
        check_is_fitted(self, "calibration_")
        Xt = check_complex_array(Xt, name="Xt")
        if Xt.ndim == 1:
            Xt = Xt[None, :]
        if Xt.ndim != 2 or Xt.shape[1] != self.grid_.size:
            raise ValueError(f"expected rows of length {self.grid_.size}, got shape {Xt.shape}")
        out = []
        for row in Xt:
            F = SampledField(self.grid_, row, hbar=self.hbar_, sheet=self.sheet_)
            out.append(inverse(F, self.u_eval_, self.sheet_, self.hbar_, calibration=self.calibration_))
        return np.stack(out)


class GaussianBeam(BaseEstimator):
    """Gaussian beam with a converged wave-number rule.

    ``fit`` settles the node count on a probe box ``[-extent, extent] x
    [0, 2 extent]``; ``predict`` evaluates the physical field at points of
    shape ``(n, 2)``.
    """

    def __init__(self, k=2 * np.pi, a=0.5, sign=-1, amplitude=1.0, nodes=512, rtol=1e-8, extent=6.0):
        self.k = k
        self.a = a
        self.sign = sign
        self.amplitude = amplitude
        self.nodes = nodes
        self.rtol = rtol
        self.extent = extent

    def fit(self, X=None, y=None):
        self.spec_ = BeamSpec(k=self.k, a=self.a, sign=self.sign, amplitude=self.amplitude, nodes=self.nodes, rtol=self.rtol)
        e = float(self.extent)
        probes = np.array([[-e, 0.0], [e, 0.0], [-e, 2 * e], [e, 2 * e], [0.0, e]])
        if self.spec_.amplitude == 0:
            self.n_nodes_ = 0
        else:
            _, self.n_nodes_ = _converge(self.spec_, lambda n: self._eval(probes, n), "beam field")
        return self

    def _eval(self, X, n):
        k1, kc, wts = beam_nodes(self.spec_, n)
        e = -1j * k1 * X[:, :1] + self.spec_.sign * 1j * kc * X[:, 1:2]
        return np.sum(wts * np.exp(e), axis=-1)

    def predict(self, X):
        check_is_fitted(self, "n_nodes_")
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != 2:
            raise ValueError(f"expected points of shape (n, 2), got {X.shape}")
        if not np.all(np.isfinite(X)):
            raise ValueError("points must be finite")
        if self.n_nodes_ == 0:
            return np.zeros(len(X), dtype=complex)
        return self._eval(X, self.n_nodes_)

    def field(self, grid: GridSpec) -> SampledField:
        check_is_fitted(self, "spec_")
        return reconstruct_physical_field(self.spec_, grid)

    def f3(self, t, s1, s2, hbar=1.0):
        check_is_fitted(self, "spec_")
        return gaussian_beam_f3(self.spec_, t, s1, s2, hbar)
