"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

import numbers

import numpy as np


def check_hbar(hbar) -> float:
    """Return ``hbar`` as a float, raising if it is not a positive finite real."""
    if isinstance(hbar, bool) or not isinstance(hbar, numbers.Real):
        raise TypeError(f"hbar must be a real number, got {type(hbar).__name__}")
    hbar = float(hbar)
    if not np.isfinite(hbar) or hbar <= 0:
        raise ValueError(f"hbar must be positive and finite, got {hbar!r}")
    return hbar


def check_positive(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be positive and finite, got {value!r}")
    return value


def check_real(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


def check_complex_array(values, *, ndim=None, name: str = "values") -> np.ndarray:
    """Like :func:`sklearn.utils.check_array` but keeps complex dtype.

    scikit-learn rejects complex input outright, and every field in this
    package is complex-valued.
    """
    arr = np.asarray(values)
    if arr.dtype == object:
        raise TypeError(f"{name} must be numeric, got an object array")
    arr = arr.astype(complex, copy=False)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_phase_arrays(x, y, b, r):
    """Broadcast phase-space coordinates to float arrays and enforce ``r > 0``."""
    x, y, b, r = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (x, y, b, r)))
    if np.any(~(r > 0)):
        raise ValueError("phase-space coordinate r must be positive")
    return x, y, b, r
