"""Control laws with user-chosen settling deadlines, and their gain checks.

Each law is tau = tau_eq + tau_s: the equivalent part cancels the model
terms and the sliding surface's drift, the hitting part forces the state
onto the surface despite bounded disturbances and model mismatch.  All
laws are pure maps from (t, measured state, reference) to torque.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ptsm._kernels import NORM_GUARD, POW_CLAMP
from ptsm.plants import ManipulatorParams, ManipulatorState, manip_matrices
from ptsm.tbg import TbgPoly, tbg_gain
from ptsm.vecops import DEFAULT_LAYER_WIDTH, _as_vec, sgn_reg, sig_pow

CHECK_KINDS = ("theorem2", "theorem3", "corollary1", "corollary2")


def _diag(entries) -> np.ndarray:
    v = np.atleast_1d(np.asarray(entries, dtype=float))
    if v.ndim != 1:
        raise ValueError("gain matrix must be given by its diagonal entries")
    if np.any(v <= 0):
        raise ValueError("diagonal gain entries must be strictly positive")
    return v


def _in_unit(name: str, v: float) -> None:
    if not 0 < v < 1:
        raise ValueError(f"{name} must lie in (0,1), got {v}")


def _positive(name: str, v: float) -> None:
    if not v > 0:
        raise ValueError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class SecondOrderGains:
    """Gains of the double-integrator stabilizer.

    ``Ts`` bounds the sliding phase, ``Tc`` the reaching phase; the state
    reaches the origin no later than Ts + Tc.  ``Kf`` (diagonal entries)
    must dominate the disturbance bound.
    """

    Ts: float
    Tc: float
    gamma: float
    rho: float
    Kf: np.ndarray

    def __post_init__(self):
        _positive("Ts", self.Ts)
        _positive("Tc", self.Tc)
        _in_unit("gamma", self.gamma)
        _in_unit("rho", self.rho)
        object.__setattr__(self, "Kf", _diag(self.Kf))


@dataclass(frozen=True)
class ManipGains:
    """Gains of the manipulator tracking laws.

    ``sigma1..sigma3`` scale the state-dependent robust gain that covers
    the lumped model-mismatch torque; ``sigma_m0_hat`` is half the assumed
    bound on the nominal inertia norm.  ``eps_tbg`` is only read by the
    time-base-generator variant, the ``alpha/beta/m*/n*`` block only by
    the fixed-time variant.
    """

    Ts: float
    Tc: float
    gamma: float
    rho: float
    Kd: np.ndarray
    sigma1: float = 0.0
    sigma2: float = 0.0
    sigma3: float = 0.0
    sigma_m0_hat: float = 1.0
    eps_tbg: float | None = None
    alpha: float | None = None
    beta: float | None = None
    m1: int | None = None
    n1: int | None = None
    m2: int | None = None
    n2: int | None = None

    def __post_init__(self):
        _positive("Ts", self.Ts)
        _positive("Tc", self.Tc)
        _in_unit("gamma", self.gamma)
        _in_unit("rho", self.rho)
        _positive("sigma_m0_hat", self.sigma_m0_hat)
        for name in ("sigma1", "sigma2", "sigma3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        object.__setattr__(self, "Kd", _diag(self.Kd))
        if self.eps_tbg is not None:
            _positive("eps_tbg", self.eps_tbg)
        fx = ("alpha", "beta", "m1", "n1", "m2", "n2")
        if any(getattr(self, name) is not None for name in fx):
            missing = [name for name in fx if getattr(self, name) is None]
            if missing:
                raise ValueError(f"incomplete fixed-time block: missing {', '.join(missing)}")
            _positive("alpha", self.alpha)
            _positive("beta", self.beta)
            for name in ("m1", "n1", "m2", "n2"):
                v = getattr(self, name)
                if int(v) != v or v <= 0 or v % 2 == 0:
                    raise ValueError(f"{name} must be a positive odd integer, got {v}")
            if not self.m1 > self.n1:
                raise ValueError("fixed-time exponents need m1 > n1")
            if not self.m2 < self.n2:
                raise ValueError("fixed-time exponents need m2 < n2")


# ---------------------------------------------------------------------------
# shared surface pieces
# ---------------------------------------------------------------------------


def _surface_terms(x, xdot, Ts: float, gamma: float):
    """Surface s and the drift-derivative bracket d/dt[drift(x)], componentwise.

    The bracket's second term carries the exponent gamma - 1 < 0 and blows
    up when a component of x crosses 0 with nonzero velocity; its base is
    clamped below at POW_CLAMP, which caps the equivalent control at a
    large but finite value and leaves the hitting law in charge there.
    """
    x = _as_vec(x)
    xdot = _as_vec(xdot)
    if x.shape != xdot.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {xdot.shape}")
    c = 1.0 / (Ts * (1.0 - gamma))
    w = np.sqrt(1.0 + x * x)
    u = x / w
    sg = sig_pow(u, gamma)
    s = xdot + w ** 3 * c * sg
    base = np.maximum(np.abs(u), POW_CLAMP)
    bracket = 3.0 * x * w * xdot * c * sg + gamma * xdot * c * base ** (gamma - 1.0)
    return s, bracket


def so_surface(g: SecondOrderGains, xi, eta) -> np.ndarray:
    """The sliding vector of the double-integrator law."""
    s, _ = _surface_terms(xi, eta, g.Ts, g.gamma)
    return s


def so_tau(g: SecondOrderGains, xi, eta, sgn_mode: str = "boundary_layer",
           width: float = DEFAULT_LAYER_WIDTH) -> np.ndarray:
    """Torque of the double-integrator stabilizer (equivalent + hitting)."""
    s, bracket = _surface_terms(xi, eta, g.Ts, g.gamma)
    tau = -bracket - g.Kf * sgn_reg(s, sgn_mode, width)
    sn = np.linalg.norm(s)
    if sn >= NORM_GUARD:
        coef = (np.pi / (g.rho * g.Tc)) * (1.0 + sn ** (2.0 * g.rho)) / sn ** g.rho
        tau = tau - coef * s
    return tau


def manip_surface(g: ManipGains, e, edot) -> np.ndarray:
    """The sliding vector built from tracking errors."""
    s, _ = _surface_terms(e, edot, g.Ts, g.gamma)
    return s


def manip_tau_eq(g: ManipGains, e, edot, M0, C0, g0, qdot) -> np.ndarray:
    """Equivalent control: -M0 * d/dt[surface drift] + C0 qdot + g0.

    All matrices must come from the NOMINAL parameter set; the true plant
    is not available to the controller.
    """
    _, bracket = _surface_terms(e, edot, g.Ts, g.gamma)
    return -np.asarray(M0) @ bracket + np.asarray(C0) @ _as_vec(qdot) + _as_vec(g0)


def _robust_gain(g: ManipGains, q, qdot) -> float:
    return g.sigma1 + g.sigma2 * float(np.linalg.norm(q)) \
        + g.sigma3 * float(np.linalg.norm(qdot)) ** 2


def manip_tau_s_ptsm(g: ManipGains, s, q, qdot, C0, sgn_mode: str = "boundary_layer",
                     width: float = DEFAULT_LAYER_WIDTH) -> np.ndarray:
    """Predefined-time hitting law for the manipulator."""
    s = _as_vec(s)
    rob = _robust_gain(g, q, qdot)
    tau = -(rob + g.Kd) * sgn_reg(s, sgn_mode, width) - np.asarray(C0) @ s
    sn = np.linalg.norm(s)
    if sn >= NORM_GUARD:
        sh = g.sigma_m0_hat
        coef = (np.pi / (g.rho * g.Tc)) * (
            sh ** (1.0 - g.rho / 2.0) + sh ** (1.0 + g.rho / 2.0) * sn ** (2.0 * g.rho)
        ) / sn ** g.rho
        tau = tau - coef * s
    return tau


def manip_tau_s_tbg(g: ManipGains, tbg: TbgPoly, t: float, s, q, qdot, C0,
                    sgn_mode: str = "boundary_layer", width: float = DEFAULT_LAYER_WIDTH) -> np.ndarray:
    """Time-base-generator hitting law: robust terms plus a vanishing gain on s."""
    if g.eps_tbg is None:
        raise ValueError("gains carry no eps_tbg; required by the TBG law")
    s = _as_vec(s)
    rob = _robust_gain(g, q, qdot)
    tau = -(rob + g.Kd) * sgn_reg(s, sgn_mode, width) - np.asarray(C0) @ s
    return tau - g.sigma_m0_hat * tbg_gain(tbg, t, g.eps_tbg) * s


def manip_tau_s_fixed(g: ManipGains, s, q, qdot, C0, sgn_mode: str = "boundary_layer",
                      width: float = DEFAULT_LAYER_WIDTH) -> np.ndarray:
    """Fixed-time hitting law with odd-ratio signed powers of s."""
    if g.alpha is None:
        raise ValueError("gains carry no fixed-time block (alpha/beta/m*/n*)")
    s = _as_vec(s)
    rob = _robust_gain(g, q, qdot)
    tau = -(rob + g.Kd) * sgn_reg(s, sgn_mode, width) - np.asarray(C0) @ s
    sh = g.sigma_m0_hat
    ka = g.alpha * sh ** ((g.m1 + g.n1) / (2.0 * g.n1))
    kb = g.beta * sh ** ((g.m2 + g.n2) / (2.0 * g.n2))
    return tau - ka * sig_pow(s, g.m1 / g.n1) - kb * sig_pow(s, g.m2 / g.n2)


def fixed_time_settling_bound(g: ManipGains) -> float:
    """Settling bound Ts + 2 n1/(alpha (m1-n1)) + (n2+m2)/(beta (n2-m2))."""
    if g.alpha is None:
        raise ValueError("gains carry no fixed-time block")
    return g.Ts + 2.0 * g.n1 / (g.alpha * (g.m1 - g.n1)) \
        + (g.n2 + g.m2) / (g.beta * (g.n2 - g.m2))


# ---------------------------------------------------------------------------
# gain-condition checker
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GainCheck:
    """Verdict of a sufficient-condition check, with the slack that remains."""

    kind: str
    passed: bool
    lam_min: float
    threshold: float
    notes: str = ""

    @property
    def margin(self) -> float:
        return self.lam_min - self.threshold


def check_gains(kind: str, gains, bounds: dict) -> GainCheck:
    """Check the sufficient gain conditions of the stability results.

    ``bounds`` carries the assumed problem constants: ``sigma_f`` for the
    second-order case, else ``sigma_d``, ``sigma_m0``, ``sigma_alpha``.
    The verdict reports lam_min(K) minus the required threshold; a FAIL is
    informational (the run proceeds, nothing about the closed loop is
    clamped to the verdict).
    """
    if kind not in CHECK_KINDS:
        raise ValueError(f"unknown check kind {kind!r}; expected one of {CHECK_KINDS}")
    for k, v in bounds.items():
        if v < 0:
            raise ValueError(f"bound {k} must be nonnegative, got {v}")
    notes = []
    if kind == "theorem2":
        lam = float(np.min(gains.Kf))
        threshold = float(bounds.get("sigma_f", 0.0))
        ok = lam >= threshold
    else:
        lam = float(np.min(gains.Kd))
        threshold = float(bounds.get("sigma_d", 0.0)) \
            + float(bounds.get("sigma_m0", 0.0)) * float(bounds.get("sigma_alpha", 0.0))
        ok = lam >= threshold
        if kind == "corollary1":
            if gains.eps_tbg is None or not gains.eps_tbg > 0:
                ok = False
                notes.append("eps_tbg must be positive for the TBG law")
        if kind == "corollary2":
            if gains.alpha is None:
                ok = False
                notes.append("fixed-time block (alpha/beta/m*/n*) missing")
    if not ok and not notes:
        notes.append(f"lam_min = {lam:g} below threshold {threshold:g}")
    return GainCheck(kind, ok, lam, threshold, "; ".join(notes))


# ---------------------------------------------------------------------------
# law objects consumed by sim.integrate
# ---------------------------------------------------------------------------


class SecondOrderPtsmLaw:
    """Stabilizing law for the double integrator (reference must be zero)."""

    variant = "ptsm"

    def __init__(self, gains: SecondOrderGains):
        self.gains = gains

    def torque_and_surface(self, t, q, qd, ref, sgn_mode, width):
        e = q - ref[0]
        ed = qd - ref[1]
        s = so_surface(self.gains, e, ed)
        return so_tau(self.gains, e, ed, sgn_mode, width), s

    def lyapunov(self, q, s) -> float:
        return 0.5 * float(s @ s)

    def gain_check(self, bounds: dict) -> GainCheck:
        return check_gains("theorem2", self.gains, bounds)


_MANIP_CHECKS = {"ptsm": "theorem3", "tbg": "corollary1", "fixed": "corollary2"}


class ManipulatorLaw:
    """Tracking law for the manipulator; ``variant`` picks the hitting law."""

    def __init__(self, gains: ManipGains, nominal: ManipulatorParams,
                 variant: str = "ptsm", tbg: TbgPoly | None = None):
        if variant not in _MANIP_CHECKS:
            raise ValueError(f"unknown variant {variant!r}; expected one of {sorted(_MANIP_CHECKS)}")
        self.gains = gains
        self.nominal = nominal
        self.variant = variant
        self.tbg = tbg if tbg is not None else TbgPoly(gains.Tc)

    def torque_and_surface(self, t, q, qd, ref, sgn_mode, width):
        qr, wr, _ = ref
        e = q - qr
        ed = qd - wr
        s = manip_surface(self.gains, e, ed)
        M0, C0, g0 = manip_matrices(self.nominal, ManipulatorState(q, qd))
        tau = manip_tau_eq(self.gains, e, ed, M0, C0, g0, qd)
        if self.variant == "ptsm":
            tau = tau + manip_tau_s_ptsm(self.gains, s, q, qd, C0, sgn_mode, width)
        elif self.variant == "tbg":
            tau = tau + manip_tau_s_tbg(self.gains, self.tbg, t, s, q, qd, C0, sgn_mode, width)
        else:
            tau = tau + manip_tau_s_fixed(self.gains, s, q, qd, C0, sgn_mode, width)
        return tau, s

    def lyapunov(self, q, s) -> float:
        M0, _, _ = manip_matrices(self.nominal, ManipulatorState(q, np.zeros_like(q)))
        return 0.5 * float(s @ M0 @ s)

    def gain_check(self, bounds: dict) -> GainCheck:
        return check_gains(_MANIP_CHECKS[self.variant], self.gains, bounds)
