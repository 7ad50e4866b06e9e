"""Sliding-surface families, their reduced on-surface flows, and settling bounds.

Four families are supported.  ``finite_basic`` and ``finite_fast`` settle in
a finite time that grows with the initial condition; ``fixed_time`` has an
initial-condition-independent bound set implicitly by its gains; ``ptsm``
settles no later than the explicit user-chosen parameter ``Ts``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ptsm import _kernels
from ptsm.vecops import _as_vec, sig_pow

KINDS = ("finite_basic", "finite_fast", "fixed_time", "ptsm")


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def _odd_positive(kname: str, v) -> int:
    _require(v is not None, f"{kname} is required for this surface kind")
    iv = int(v)
    _require(iv == v and iv > 0 and iv % 2 == 1, f"{kname} must be a positive odd integer, got {v}")
    return iv


@dataclass(frozen=True)
class SurfaceConfig:
    """Parameters of one sliding-surface family.

    Only the fields of the active ``kind`` are validated and used:

    - ``finite_basic``:  s = xdot + b1*sig(x)^nu
    - ``finite_fast``:   s = xdot + a1*x + b1*sig(x)^nu
    - ``fixed_time``:    s = xdot + a2*sig(x)^(m1/n1) + b2*sig(x)^(m2/n2)
    - ``ptsm``:          s = xdot + (1+x^2)^(3/2)/(Ts*(1-gamma)) * sig(x/sqrt(1+x^2))^gamma

    applied componentwise for vector states.
    """

    kind: str
    b1: float | None = None
    a1: float | None = None
    nu: float | None = None
    a2: float | None = None
    b2: float | None = None
    m1: int | None = None
    n1: int | None = None
    m2: int | None = None
    n2: int | None = None
    Ts: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        _require(self.kind in KINDS, f"unknown surface kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "finite_basic":
            _require(self.b1 is not None and self.b1 > 0, "finite_basic needs b1 > 0")
            _require(self.nu is not None and 0 < self.nu < 1, "finite_basic needs nu in (0,1)")
        elif self.kind == "finite_fast":
            _require(self.a1 is not None and self.a1 > 0, "finite_fast needs a1 > 0")
            _require(self.b1 is not None and self.b1 > 0, "finite_fast needs b1 > 0")
            _require(self.nu is not None and 0 < self.nu < 1, "finite_fast needs nu in (0,1)")
        elif self.kind == "fixed_time":
            _require(self.a2 is not None and self.a2 > 0, "fixed_time needs a2 > 0")
            _require(self.b2 is not None and self.b2 > 0, "fixed_time needs b2 > 0")
            m1 = _odd_positive("m1", self.m1)
            n1 = _odd_positive("n1", self.n1)
            m2 = _odd_positive("m2", self.m2)
            n2 = _odd_positive("n2", self.n2)
            _require(m1 > n1, f"fixed_time needs m1 > n1, got {m1} <= {n1}")
            _require(m2 < n2, f"fixed_time needs m2 < n2, got {m2} >= {n2}")
        else:  # ptsm
            _require(self.Ts is not None and self.Ts > 0, "ptsm needs Ts > 0")
            _require(self.gamma is not None and 0 < self.gamma < 1, "ptsm needs gamma in (0,1)")


def _drift(cfg: SurfaceConfig, x: np.ndarray) -> np.ndarray:
    """The position-dependent part of the surface: s = xdot + drift(x)."""
    if cfg.kind == "finite_basic":
        return cfg.b1 * sig_pow(x, cfg.nu)
    if cfg.kind == "finite_fast":
        return cfg.a1 * x + cfg.b1 * sig_pow(x, cfg.nu)
    if cfg.kind == "fixed_time":
        return cfg.a2 * sig_pow(x, cfg.m1 / cfg.n1) + cfg.b2 * sig_pow(x, cfg.m2 / cfg.n2)
    w = np.sqrt(1.0 + x * x)
    return w ** 3 / (cfg.Ts * (1.0 - cfg.gamma)) * sig_pow(x / w, cfg.gamma)


def surface_value(cfg: SurfaceConfig, x, xdot) -> np.ndarray:
    """s(x, xdot), componentwise."""
    xv, xdv = _as_vec(x), _as_vec(xdot)
    if xv.shape != xdv.shape:
        raise ValueError(f"dimension mismatch: {xv.shape} vs {xdv.shape}")
    return xdv + _drift(cfg, xv)


def on_surface_rhs(cfg: SurfaceConfig, x) -> np.ndarray:
    """xdot such that surface_value(cfg, x, xdot) = 0, the sliding-phase flow."""
    return -_drift(cfg, _as_vec(x))


def ptsm_lyapunov(x, gamma: float):
    """(|x|/sqrt(1+x^2))^(1-gamma): zero only at x = 0 and strictly below 1.

    Decays at the constant rate 1/Ts along the ptsm sliding flow, which is
    what pins the settling time at Ts regardless of the initial condition.
    """
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0,1), got {gamma}")
    xa = np.abs(np.asarray(x, dtype=float))
    v = (xa / np.sqrt(1.0 + xa * xa)) ** (1.0 - gamma)
    # the exact value is strictly below 1 for every finite x, but beyond
    # |x| ~ 1e8 it rounds up to 1.0 in double precision; cap one ulp under
    # 1 so the strictness (and settling_bound < Ts) survives rounding
    return np.minimum(v, np.nextafter(1.0, 0.0))


def settling_bound(cfg: SurfaceConfig, x0) -> float:
    """Upper bound on the sliding-phase settling time from x0.

    Vector states settle componentwise, so the bound is evaluated at the
    largest-magnitude component.  For the ptsm family the bound is
    ``V(x0)*Ts`` which is strictly below Ts for every finite x0.
    """
    a = float(np.max(np.abs(_as_vec(x0)))) if cfg.kind != "fixed_time" else 0.0
    if cfg.kind == "finite_basic":
        return a ** (1.0 - cfg.nu) / (cfg.b1 * (1.0 - cfg.nu))
    if cfg.kind == "finite_fast":
        return math.log((cfg.a1 * a ** (1.0 - cfg.nu) + cfg.b1) / cfg.b1) / (cfg.a1 * (1.0 - cfg.nu))
    if cfg.kind == "fixed_time":
        return cfg.n1 / (cfg.a2 * (cfg.m1 - cfg.n1)) + cfg.n2 / (cfg.b2 * (cfg.n2 - cfg.m2))
    return float(ptsm_lyapunov(a, cfg.gamma)) * cfg.Ts


def integrate_on_surface(
    cfg: SurfaceConfig,
    x0,
    dt: float = 1e-4,
    horizon: float | None = None,
    log_decimation: int = 10,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the sliding flow xdot = on_surface_rhs(x) from x0.

    Fixed-step classical Runge-Kutta, componentwise.  The ptsm flow grows
    cubically in x, so it is stepped in the bounded coordinate
    u = x/sqrt(1+x^2) (an exact change of variables with |udot| bounded by
    1/(Ts*(1-gamma))), then mapped back; the raw form is explicit-unstable
    at this step size for |x| beyond roughly a hundred.  All families are
    non-Lipschitz at the origin: a component is snapped to exactly 0 once
    it falls below 1e-9 or a step would carry it across 0.

    Returns (t, X) with X of shape (n_logs, len(x0)).
    """
    xv = _as_vec(x0)
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if log_decimation < 1:
        raise ValueError("log_decimation must be >= 1")
    if horizon is None:
        horizon = max(settling_bound(cfg, xv) * 1.05, 10 * dt)
    n_steps = int(round(horizon / dt))

    cols = []
    for xi in xv:
        if cfg.kind == "ptsm":
            cols.append(
                _kernels.flow_ptsm(float(xi), cfg.Ts, cfg.gamma, dt, n_steps, log_decimation)
            )
        elif cfg.kind == "finite_basic":
            cols.append(
                _kernels.flow_power(float(xi), 0.0, cfg.b1, cfg.nu, dt, n_steps, log_decimation)
            )
        elif cfg.kind == "finite_fast":
            cols.append(
                _kernels.flow_power(float(xi), cfg.a1, cfg.b1, cfg.nu, dt, n_steps, log_decimation)
            )
        else:
            cols.append(
                _kernels.flow_fixed(
                    float(xi), cfg.a2, cfg.b2,
                    cfg.m1 / cfg.n1, cfg.m2 / cfg.n2, dt, n_steps, log_decimation,
                )
            )
    X = np.column_stack(cols)
    t = np.arange(X.shape[0]) * dt * log_decimation
    return t, X
