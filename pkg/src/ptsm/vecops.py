"""Elementwise vector operators shared by every surface and control law."""

from __future__ import annotations

import numpy as np

#: Boundary-layer half-width used by all shipped experiment presets.
DEFAULT_LAYER_WIDTH = 1e-3

SGN_MODES = ("exact", "boundary_layer")


def _as_vec(x) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def sig_pow(x, k: float) -> np.ndarray:
    """sgn(x_i)*|x_i|^k, the signed elementwise power.

    Odd in x for every k > 0; maps 0 to 0 without evaluating log(0).
    """
    if not k > 0:
        raise ValueError(f"sig_pow exponent must be positive, got {k}")
    v = _as_vec(x)
    return np.sign(v) * np.abs(v) ** k


def hadamard(x, y) -> np.ndarray:
    """Entrywise product of two equal-length vectors."""
    a, b = _as_vec(x), _as_vec(y)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return a * b


def elem_pow(x, k: float) -> np.ndarray:
    """Plain elementwise power x_i^k.

    Non-integer exponents require strictly positive entries (the only way
    the result stays real); integer exponents accept any finite input.
    """
    v = _as_vec(x)
    if float(k) != int(k) and np.any(v <= 0):
        raise ValueError("non-integer exponent requires strictly positive entries")
    return v ** k


def sgn_reg(s, mode: str = "boundary_layer", width: float = DEFAULT_LAYER_WIDTH) -> np.ndarray:
    """Regularized sign of a switching vector.

    ``exact`` is the entrywise sign with sgn(0) = 0.  ``boundary_layer``
    replaces the relay with sat(s_i/width), linear inside the layer and
    saturated outside, which keeps fixed-step integration from chattering
    at the step scale.
    """
    v = _as_vec(s)
    if mode == "exact":
        return np.sign(v)
    if mode == "boundary_layer":
        if not width > 0:
            raise ValueError(f"boundary layer width must be positive, got {width}")
        return np.clip(v / width, -1.0, 1.0)
    raise ValueError(f"unknown sgn mode {mode!r}; expected one of {SGN_MODES}")
