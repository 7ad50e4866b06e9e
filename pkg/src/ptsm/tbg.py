"""Time base generator: a smooth 0-to-1 profile with a chosen arrival time.

The generator drives time-varying convergence gains: feeding
``gain(t) = deps/(1 - eps + eps_reg)`` into ``xdot = -gain(t) x`` contracts
x to ``x0 * eps_reg/(1 + eps_reg)`` exactly at ``Tc`` regardless of x0.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class TbgPoly:
    """Polynomial time base generator with arrival instant ``Tc``.

    In normalized time tau = t/Tc the profile is
    ``eps(tau) = 10 tau^6 - 24 tau^5 + 15 tau^4`` which rises
    monotonically from 0 to 1 with zero slope at both ends, and is held
    at 1 afterwards.
    """

    Tc: float = 6.0

    def __post_init__(self):
        if not self.Tc > 0:
            raise ValueError(f"Tc must be positive, got {self.Tc}")


def tbg_eval(g: TbgPoly, t: float) -> tuple[float, float]:
    """Evaluate (eps, deps/dt) at time t >= 0."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if t >= g.Tc:
        return 1.0, 0.0
    tau = t / g.Tc
    eps = ((10.0 * tau - 24.0) * tau + 15.0) * tau ** 4
    deps = 60.0 / g.Tc * tau ** 3 * (tau - 1.0) ** 2
    return eps, deps


def tbg_gain(g: TbgPoly, t: float, eps_reg: float) -> float:
    """Time-varying gain deps/(1 - eps + eps_reg).

    The regularizer eps_reg > 0 keeps the denominator >= eps_reg, so the
    gain is finite for all t; it is 0 at t = 0 and for t > Tc.
    """
    if not eps_reg > 0:
        raise ValueError(f"eps_reg must be positive, got {eps_reg}")
    eps, deps = tbg_eval(g, t)
    return deps / (1.0 - eps + eps_reg)


@dataclass
class TbgReport:
    """Pass/fail record for the generator's defining properties."""

    endpoints_ok: bool
    monotone_ok: bool
    derivative_continuous_ok: bool
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.endpoints_ok and self.monotone_ok and self.derivative_continuous_ok


def tbg_validate(g: TbgPoly, samples: int = 1000, eval_fn=None) -> TbgReport:
    """Check endpoint values, monotonicity, and slope continuity at Tc.

    ``eval_fn(t) -> (eps, deps)`` overrides the polynomial, which lets
    tests feed a deliberately corrupted profile and watch the checks fire.
    """
    if samples < 100:
        raise ValueError(f"need at least 100 samples, got {samples}")
    if eval_fn is None:
        eval_fn = lambda t: tbg_eval(g, t)

    failures = []
    e0, d0 = eval_fn(0.0)
    eT, dT = eval_fn(g.Tc)
    endpoints_ok = True
    for label, value, target in [
        ("eps(0)", e0, 0.0),
        ("deps(0)", d0, 0.0),
        ("eps(Tc)", eT, 1.0),
        ("deps(Tc)", dT, 0.0),
    ]:
        if abs(value - target) > 1e-12:
            endpoints_ok = False
            failures.append(f"{label} = {value!r}, expected {target}")

    monotone_ok = True
    prev = e0
    for i in range(1, samples + 1):
        t = g.Tc * i / samples
        eps, _ = eval_fn(t)
        if eps < prev - 1e-12:
            monotone_ok = False
            failures.append(f"eps decreases at t = {t:.6g} ({eps!r} < {prev!r})")
            break
        prev = eps

    # slope continuity across the hold at Tc
    h = g.Tc * 1e-7
    _, d_before = eval_fn(g.Tc - h)
    _, d_after = eval_fn(g.Tc + h)
    derivative_continuous_ok = abs(d_after - d_before) < 1e-9
    if not derivative_continuous_ok:
        failures.append(f"deps jumps across Tc: {d_before!r} -> {d_after!r}")

    return TbgReport(endpoints_ok, monotone_ok, derivative_continuous_ok, failures)
