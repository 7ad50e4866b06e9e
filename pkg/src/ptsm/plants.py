"""Simulated systems: uncertain double integrator and 2-DOF rigid arm.

Also houses the deterministic disturbance generator and the tracking
reference.  The manipulator carries two parameter sets: the plant always
integrates with the true values while controllers are only ever handed
the nominal ones, so the model mismatch enters the loop exactly as an
unknown torque.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ptsm.vecops import _as_vec

# splitmix64 constants; disturbance values are keyed on (seed, step, component)
_PHI64 = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_COMP = np.uint64(0xD1B54A32D192ED03)

DISTURBANCE_KINDS = ("piecewise_constant_uniform", "zero")


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass
class SecondOrderState:
    """Position-like and velocity-like state of the double integrator."""

    xi: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        self.xi = _as_vec(self.xi)
        self.eta = _as_vec(self.eta)
        if self.xi.shape != self.eta.shape:
            raise ValueError(f"xi/eta length mismatch: {self.xi.shape} vs {self.eta.shape}")


@dataclass
class ManipulatorState:
    """Joint coordinates (rad) and velocities (rad/s)."""

    q: np.ndarray
    qdot: np.ndarray

    def __post_init__(self):
        self.q = _as_vec(self.q)
        self.qdot = _as_vec(self.qdot)
        if self.q.shape != self.qdot.shape:
            raise ValueError(f"q/qdot length mismatch: {self.q.shape} vs {self.qdot.shape}")


def second_order_rhs(state: SecondOrderState, tau, f) -> tuple[np.ndarray, np.ndarray]:
    """xidot = eta, etadot = tau + f."""
    tau = _as_vec(tau)
    f = _as_vec(f)
    if tau.shape != state.eta.shape or f.shape != state.eta.shape:
        raise ValueError("input dimensions do not match the state")
    return state.eta.copy(), tau + f


# ---------------------------------------------------------------------------
# 2-DOF manipulator model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ManipulatorParams:
    """Physical parameters of the two-link arm.

    ``m`` are link masses (kg), ``l`` link lengths (m), ``r`` center-of-mass
    distances (m).  Link inertias are thin-rod values I_i = m_i l_i^2 / 3.
    """

    m: np.ndarray
    l: np.ndarray
    r: np.ndarray
    g_const: float = 9.8

    def __post_init__(self):
        object.__setattr__(self, "m", _as_vec(self.m))
        object.__setattr__(self, "l", _as_vec(self.l))
        object.__setattr__(self, "r", _as_vec(self.r))
        if not (self.m.size == self.l.size == self.r.size == 2):
            raise ValueError("the closed-form model is 2-DOF: m, l, r must have length 2")
        if np.any(self.m <= 0) or np.any(self.l <= 0) or np.any(self.r <= 0):
            raise ValueError("masses and lengths must be strictly positive")

    @property
    def inertias(self) -> np.ndarray:
        return self.m * self.l ** 2 / 3.0

    @property
    def p(self) -> np.ndarray:
        """The five lumped constants the closed-form matrices are built from."""
        m1, m2 = self.m
        l1, _ = self.l
        r1, r2 = self.r
        I1, I2 = self.inertias
        return np.array([
            m1 * r1 ** 2 + m2 * (l1 ** 2 + r2 ** 2) + I1 + I2,
            m2 * l1 * r2,
            m2 * r2 ** 2 + I2,
            m1 * r1 + m2 * l1,
            m2 * r2,
        ])


def manip_matrices(params: ManipulatorParams, state: ManipulatorState):
    """Inertia matrix M(q), Coriolis matrix C(q, qdot), gravity vector g(q)."""
    if state.q.size != 2:
        raise ValueError("closed-form matrices are defined for the 2-DOF preset")
    p1, p2, p3, p4, p5 = params.p
    q1, q2 = state.q
    qd1, qd2 = state.qdot
    c2, s2 = np.cos(q2), np.sin(q2)
    M = np.array([[p1 + 2.0 * p2 * c2, p3 + p2 * c2],
                  [p3 + p2 * c2, p3]])
    C = np.array([[-p2 * s2 * qd2, -p2 * s2 * (qd1 + qd2)],
                  [p2 * s2 * qd1, 0.0]])
    g = params.g_const * np.array([p4 * np.cos(q1) + p5 * np.cos(q1 + q2),
                                   p5 * np.cos(q1 + q2)])
    return M, C, g


def manip_mdot(params: ManipulatorParams, state: ManipulatorState) -> np.ndarray:
    """Analytic dM/dt = (dM/dq2) * qdot2, used by the skew-symmetry checks."""
    p2 = params.p[1]
    s2 = np.sin(state.q[1])
    qd2 = state.qdot[1]
    return np.array([[-2.0 * p2 * s2 * qd2, -p2 * s2 * qd2],
                     [-p2 * s2 * qd2, 0.0]])


def manip_rhs(params_true: ManipulatorParams, state: ManipulatorState, tau, d) -> np.ndarray:
    """Joint accelerations under the TRUE parameters: qddot = M^-1 (tau + d - C qdot - g)."""
    tau = _as_vec(tau)
    d = _as_vec(d)
    M, C, g = manip_matrices(params_true, state)
    try:
        return np.linalg.solve(M, tau + d - C @ state.qdot - g)
    except np.linalg.LinAlgError as exc:  # not reachable for valid parameters
        raise ValueError(f"singular inertia matrix at q = {state.q}") from exc


def reference_eval(t: float):
    """The shipped tracking reference and its first two derivatives."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    st, ct = np.sin(t), np.cos(t)
    q_r = np.array([7.0 + 5.0 * st, -7.0 - 5.0 * ct])
    w_r = np.array([5.0 * ct, 5.0 * st])
    a_r = np.array([-5.0 * st, 5.0 * ct])
    return q_r, w_r, a_r


# acceleration bound of the shipped reference (||a_r||_2 is identically 5)
SIGMA_ALPHA = 5.0


# ---------------------------------------------------------------------------
# references (for the generic simulation path)
# ---------------------------------------------------------------------------


class ZeroReference:
    """Stabilization target: q_r = w_r = a_r = 0."""

    def __init__(self, n: int):
        self.n = n
        self._z = np.zeros(n)

    def eval(self, t: float):
        return self._z, self._z, self._z


class TrackingReference:
    """The shipped closed-form 2-DOF reference."""

    n = 2

    def eval(self, t: float):
        return reference_eval(t)


class CallbackReference:
    """Adapter for a user-supplied map t -> (q_r, w_r, a_r)."""

    def __init__(self, n: int, fn):
        self.n = n
        self._fn = fn

    def eval(self, t: float):
        return self._fn(t)


# ---------------------------------------------------------------------------
# disturbance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DisturbanceModel:
    """Bounded piecewise-constant disturbance, constant within each step.

    Every emitted value is drawn uniformly from [-bound, bound] by a
    counter-based generator keyed on (seed, step index, component), so a
    given (seed, dt) always reproduces the identical sequence and samples
    never depend on how many were drawn before.
    """

    bound: float = 0.0
    seed: int = 0
    kind: str = "piecewise_constant_uniform"

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError(f"bound must be nonnegative, got {self.bound}")
        if self.kind not in DISTURBANCE_KINDS:
            raise ValueError(f"unknown disturbance kind {self.kind!r}")


def _mix_to_unit(seed: int, steps: np.ndarray, n: int) -> np.ndarray:
    """splitmix64 of (seed, step, component), mapped to [0, 1)."""
    step = steps.astype(np.uint64)[:, None]
    comp = np.arange(n, dtype=np.uint64)[None, :]
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + step * _PHI64 + comp * _COMP
    z = z + _PHI64
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return (z >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def disturbance_series(dm: DisturbanceModel, n_steps: int, dt: float, n: int) -> np.ndarray:
    """All per-step samples for a run, shape (n_steps + 1, n)."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if dm.kind == "zero" or dm.bound == 0.0:
        return np.zeros((n_steps + 1, n))
    u = _mix_to_unit(dm.seed, np.arange(n_steps + 1), n)
    return dm.bound * (2.0 * u - 1.0)


def disturbance_sample(dm: DisturbanceModel, t: float, dt: float, n: int) -> np.ndarray:
    """The sample held over the step containing time t."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if dm.kind == "zero" or dm.bound == 0.0:
        return np.zeros(n)
    step = int(np.floor(t / dt + 1e-12))
    u = _mix_to_unit(dm.seed, np.array([step]), n)[0]
    return dm.bound * (2.0 * u - 1.0)


# ---------------------------------------------------------------------------
# plant objects consumed by sim.integrate
# ---------------------------------------------------------------------------


class SecondOrderPlant:
    """Double integrator: accel(q, qd, u) = u."""

    def __init__(self, n: int = 2):
        self.n = n

    def accel(self, q: np.ndarray, qd: np.ndarray, u: np.ndarray) -> np.ndarray:
        return u


class ManipulatorPlant:
    """Rigid 2-DOF arm integrating with its (true) parameter set."""

    def __init__(self, params: ManipulatorParams):
        self.params = params
        self.n = 2

    def accel(self, q: np.ndarray, qd: np.ndarray, u: np.ndarray) -> np.ndarray:
        return manip_rhs(self.params, ManipulatorState(q, qd), u, np.zeros(self.n))


class CallbackPlant:
    """n-DOF Euler-Lagrange plant from a user (M, C, g) callback.

    ``mcg(q, qd) -> (M, C, g)`` with M symmetric positive definite.
    """

    def __init__(self, n: int, mcg):
        self.n = n
        self._mcg = mcg

    def accel(self, q: np.ndarray, qd: np.ndarray, u: np.ndarray) -> np.ndarray:
        M, C, g = self._mcg(q, qd)
        return np.linalg.solve(M, u - C @ qd - g)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

MANIP_TRUE = ManipulatorParams(
    m=np.array([2.8, 1.8]), l=np.array([3.8, 2.8]), r=np.array([1.9, 1.4]))
MANIP_NOMINAL = ManipulatorParams(
    m=np.array([2.75, 1.85]), l=np.array([3.86, 2.74]), r=np.array([1.93, 1.37]))

_PRESETS = {
    "example1": lambda: SecondOrderPlant(2),
    "manip2dof-true": lambda: MANIP_TRUE,
    "manip2dof-nominal": lambda: MANIP_NOMINAL,
}


def get_preset(name: str):
    """Registry of shipped plants/parameter sets, keyed by name."""
    try:
        return _PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {sorted(_PRESETS)}") from None


def fit_operator_bounds(params: ManipulatorParams, n_grid: int = 50, n_vel: int = 200,
                        seed: int = 0) -> dict:
    """Empirical operator bounds of (M, C, g) over the configuration space.

    Returns the fitted constants sigma_m = sup ||M||, sigma_c with
    ||C|| <= sigma_c ||qdot||, and sigma_g = sup ||g||, plus the smallest
    inertia eigenvalue seen (positive definiteness margin).
    """
    rng = np.random.default_rng(seed)
    qs = np.linspace(-np.pi, np.pi, n_grid)
    sigma_m = 0.0
    lam_min = np.inf
    sigma_g = 0.0
    for q1 in qs:
        for q2 in qs:
            st = ManipulatorState(np.array([q1, q2]), np.zeros(2))
            M, _, g = manip_matrices(params, st)
            ev = np.linalg.eigvalsh(M)
            lam_min = min(lam_min, ev[0])
            sigma_m = max(sigma_m, ev[-1])
            sigma_g = max(sigma_g, float(np.linalg.norm(g)))
    sigma_c = 0.0
    for _ in range(n_vel):
        q = rng.uniform(-np.pi, np.pi, 2)
        qd = rng.uniform(-10, 10, 2)
        st = ManipulatorState(q, qd)
        _, C, _ = manip_matrices(params, st)
        nqd = np.linalg.norm(qd)
        if nqd > 0:
            sigma_c = max(sigma_c, float(np.linalg.norm(C, 2)) / nqd)
    return {"sigma_m": sigma_m, "sigma_c": sigma_c, "sigma_g": sigma_g, "lambda_min_M": lam_min}
