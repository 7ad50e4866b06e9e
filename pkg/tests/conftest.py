import numpy as np
import pytest

from ptsm.controllers import ManipGains, SecondOrderGains


@pytest.fixture(scope="session")
def so_gains():
    return SecondOrderGains(Ts=4.0, Tc=6.0, gamma=0.5, rho=0.4, Kf=np.array([10.0, 10.0]))


@pytest.fixture(scope="session")
def manip_gains():
    return ManipGains(Ts=4.0, Tc=6.0, gamma=0.5, rho=0.5, Kd=np.array([25.0, 25.0]),
                      sigma1=14.0, sigma2=12.0, sigma3=10.0, sigma_m0_hat=2.5)


@pytest.fixture(scope="session")
def ex2a_run():
    """One full manipulator tracking run, shared by analysis tests."""
    from ptsm.experiments import build_objects, example_config
    from ptsm.sim import integrate

    cfg = example_config("example2a")
    objs = build_objects(cfg, seed=1)
    return integrate(*objs)
