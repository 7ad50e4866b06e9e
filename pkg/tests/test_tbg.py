import numpy as np
import pytest

from ptsm.experiments import lemma2_relative_errors
from ptsm.tbg import TbgPoly, tbg_eval, tbg_gain, tbg_validate


def test_endpoints():
    g = TbgPoly(6.0)
    assert tbg_eval(g, 0.0) == (0.0, 0.0)
    assert tbg_eval(g, 6.0) == (1.0, 0.0)
    assert tbg_eval(g, 100.0) == (1.0, 0.0)


def test_midpoint_values():
    g = TbgPoly(6.0)
    eps, deps = tbg_eval(g, 3.0)
    assert eps == pytest.approx(0.34375, abs=1e-15)
    assert deps == pytest.approx(0.3125, abs=1e-15)


def test_gain_values():
    g = TbgPoly(6.0)
    assert tbg_gain(g, 0.0, 0.1) == 0.0
    assert tbg_gain(g, 7.0, 0.1) == 0.0
    # 0.3125 / (1 - 0.34375 + 0.1) = 50/121
    assert tbg_gain(g, 3.0, 0.1) == pytest.approx(50.0 / 121.0, rel=1e-14)


def test_rejects_bad_inputs():
    g = TbgPoly(6.0)
    with pytest.raises(ValueError):
        tbg_eval(g, -1.0)
    with pytest.raises(ValueError):
        tbg_gain(g, 1.0, 0.0)
    with pytest.raises(ValueError):
        TbgPoly(0.0)


def test_validate_passes_at_any_scale():
    for Tc in (1.0, 6.0, 100.0):
        rep = tbg_validate(TbgPoly(Tc), samples=1000)
        assert rep.passed, rep.failures


def test_validate_flags_corrupted_profile():
    # same endpoints, but the middle coefficients make eps dip after tau ~ 0.88
    g = TbgPoly(6.0)

    def corrupted(t):
        if t >= g.Tc:
            return 1.0, 0.0
        tau = t / g.Tc
        eps = ((10.0 * tau - 26.0) * tau + 17.0) * tau ** 4
        deps = (60.0 * tau ** 2 - 130.0 * tau + 68.0) * tau ** 3 / g.Tc
        return eps, deps

    rep = tbg_validate(g, samples=1000, eval_fn=corrupted)
    assert not rep.passed
    assert not rep.monotone_ok
    assert any("eps decreases at t" in f for f in rep.failures)


def test_validate_needs_enough_samples():
    with pytest.raises(ValueError):
        tbg_validate(TbgPoly(6.0), samples=10)


def test_derivative_nonnegative_with_single_interior_peak():
    g = TbgPoly(6.0)
    t = np.linspace(0.0, 6.0, 2001)
    deps = np.array([tbg_eval(g, ti)[1] for ti in t])
    assert np.all(deps >= 0)
    peaks = 0
    for i in range(1, len(t) - 1):
        if deps[i] > deps[i - 1] and deps[i] >= deps[i + 1]:
            peaks += 1
    assert peaks == 1
    # the peak of 60 tau^3 (tau-1)^2 sits at tau = 3/5
    assert abs(t[np.argmax(deps)] / 6.0 - 0.6) < 1e-3


def test_contraction_closed_form():
    # integrating xdot = -gain(t) x lands on x0*eps/(1+eps) at Tc
    errs = lemma2_relative_errors()
    assert max(errs.values()) < 1e-3
