import numpy as np
import pytest

from ptsm.surfaces import (
    SurfaceConfig,
    integrate_on_surface,
    on_surface_rhs,
    ptsm_lyapunov,
    settling_bound,
    surface_value,
)

ROOT2_4TH = 1.189207115002721  # 2**0.25, hand-checked at high precision


def _ptsm(Ts=4.0, gamma=0.5):
    return SurfaceConfig(kind="ptsm", Ts=Ts, gamma=gamma)


def test_config_validation():
    with pytest.raises(ValueError):
        SurfaceConfig(kind="nope")
    with pytest.raises(ValueError):
        SurfaceConfig(kind="ptsm", Ts=0.0, gamma=0.5)
    with pytest.raises(ValueError):
        SurfaceConfig(kind="ptsm", Ts=4.0, gamma=1.0)
    with pytest.raises(ValueError):
        SurfaceConfig(kind="finite_basic", b1=-1.0, nu=0.5)
    with pytest.raises(ValueError):
        SurfaceConfig(kind="fixed_time", a2=1.0, b2=1.0, m1=4, n1=3, m2=3, n2=5)
    with pytest.raises(ValueError):
        SurfaceConfig(kind="fixed_time", a2=1.0, b2=1.0, m1=3, n1=5, m2=3, n2=5)


def test_surface_value_ptsm():
    # drift vanishes at the origin regardless of (Ts, gamma)
    assert np.allclose(surface_value(_ptsm(7.7, 0.3), [0.0], [2.0]), [2.0])
    # (1+1)^1.5/(4*0.5) * (1/sqrt(2))^0.5 = 2^(1/4)
    s = surface_value(_ptsm(4.0, 0.5), [1.0], [0.0])
    assert s[0] == pytest.approx(ROOT2_4TH, rel=1e-12)


def test_surface_value_finite_basic():
    cfg = SurfaceConfig(kind="finite_basic", b1=1.0, nu=0.5)
    assert np.allclose(surface_value(cfg, [4.0], [-1.0]), [1.0])


def test_surface_value_dimension_mismatch():
    with pytest.raises(ValueError):
        surface_value(_ptsm(), [1.0, 2.0], [0.0])


def test_on_surface_rhs():
    cfg = _ptsm(4.0, 0.5)
    assert np.array_equal(on_surface_rhs(cfg, [0.0]), [0.0])
    assert on_surface_rhs(cfg, [1.0])[0] == pytest.approx(-ROOT2_4TH, rel=1e-12)
    for c in (0.3, 2.0, 50.0):
        assert np.allclose(on_surface_rhs(cfg, [-c]), -on_surface_rhs(cfg, [c]))
    # definition: plugging the reduced flow back in gives s = 0
    x = np.array([-3.0, 0.2, 40.0])
    assert np.allclose(surface_value(cfg, x, on_surface_rhs(cfg, x)), 0.0, atol=1e-12)


def test_settling_bounds():
    basic = SurfaceConfig(kind="finite_basic", b1=1.0, nu=0.5)
    assert settling_bound(basic, [4.0]) == pytest.approx(4.0)
    fast = SurfaceConfig(kind="finite_fast", a1=1.0, b1=1.0, nu=0.5)
    assert settling_bound(fast, [4.0]) == pytest.approx(2.0 * np.log(3.0), rel=1e-12)
    fixed = SurfaceConfig(kind="fixed_time", a2=1.0, b2=1.0, m1=5, n1=3, m2=3, n2=5)
    assert settling_bound(fixed, [123.0]) == pytest.approx(4.0)
    assert settling_bound(_ptsm(4.0, 0.5), [1.0]) == pytest.approx(4.0 / ROOT2_4TH, rel=1e-12)


def test_ptsm_settling_bound_strictly_below_Ts():
    cfg = _ptsm(4.0, 0.5)
    for x0 in (1e-3, 1.0, 1e4, 1e9):
        assert settling_bound(cfg, [x0]) < 4.0


def test_ptsm_lyapunov():
    assert ptsm_lyapunov(0.0, 0.5) == 0.0
    assert float(ptsm_lyapunov(1.0, 0.5)) == pytest.approx(1.0 / ROOT2_4TH, rel=1e-12)
    assert float(ptsm_lyapunov(1e9, 0.5)) < 1.0
    assert float(ptsm_lyapunov(-1e9, 0.5)) < 1.0
    with pytest.raises(ValueError):
        ptsm_lyapunov(1.0, 1.5)


def test_flow_decrement_rate_up_to_huge_starts():
    # dV/dt = -1/Ts along the sliding flow, from starts up to 1e6
    cfg = _ptsm(4.0, 0.5)
    for x0 in (0.5, -300.0, 1e6):
        t, X = integrate_on_surface(cfg, [x0], horizon=4.0)
        x = X[:, 0]
        V = ptsm_lyapunov(x, 0.5)
        Vdot = np.gradient(V, t)
        mask = np.abs(x) > 1e-3
        mask[[0, -1]] = False
        assert mask.any()
        assert np.max(np.abs(Vdot[mask] + 0.25) * 4.0) < 0.01


def test_flow_reaches_origin_within_Ts():
    rng = np.random.default_rng(7)
    for Ts in (1.0, 4.0, 10.0):
        for gamma in (0.3, 0.5, 0.7):
            cfg = _ptsm(Ts, gamma)
            for _ in range(5):
                x0 = rng.uniform(-1e4, 1e4)
                _, X = integrate_on_surface(cfg, [x0], horizon=Ts)
                assert abs(X[-1, 0]) < 1e-3


def test_flow_monotone_magnitude():
    for x0 in (9.0, -2.0, 1e3):
        _, X = integrate_on_surface(_ptsm(4.0, 0.7), [x0], horizon=4.0)
        mag = np.abs(X[:, 0])
        assert np.all(np.diff(mag) <= 1e-12)


def test_finite_basic_flow_respects_its_bound():
    cfg = SurfaceConfig(kind="finite_basic", b1=1.0, nu=0.5)
    rng = np.random.default_rng(3)
    for _ in range(10):
        x0 = rng.uniform(0.1, 50.0) * rng.choice([-1.0, 1.0])
        bound = settling_bound(cfg, [x0])
        t, X = integrate_on_surface(cfg, [x0], horizon=bound * 1.05 + 1e-3,
                                    log_decimation=1)
        below = np.nonzero(np.abs(X[:, 0]) < 1e-6)[0]
        assert below.size > 0
        assert t[below[0]] <= bound


def test_vector_flow_is_componentwise():
    cfg = _ptsm(2.0, 0.5)
    t, X = integrate_on_surface(cfg, [3.0, -11.0], horizon=2.0)
    _, Xa = integrate_on_surface(cfg, [3.0], horizon=2.0)
    _, Xb = integrate_on_surface(cfg, [-11.0], horizon=2.0)
    assert np.array_equal(X[:, 0], Xa[:, 0])
    assert np.array_equal(X[:, 1], Xb[:, 0])
