"""Predefined-time terminal sliding mode (PTSM) control toolkit.

Sliding surfaces with user-defined settling times, the matching
controllers for uncertain second-order systems and rigid manipulators,
a fixed-step closed-loop simulator, and the analysis/reporting layer
used by the ``ptsm`` command line tool.
"""

from ptsm.surfaces import SurfaceConfig, surface_value, on_surface_rhs, settling_bound, ptsm_lyapunov
from ptsm.tbg import TbgPoly, tbg_eval, tbg_gain, tbg_validate
from ptsm.plants import (
    ManipulatorParams,
    ManipulatorState,
    SecondOrderState,
    DisturbanceModel,
    SecondOrderPlant,
    ManipulatorPlant,
    reference_eval,
)
from ptsm.controllers import SecondOrderGains, ManipGains, check_gains
from ptsm.sim import SimConfig, SimLog, integrate, settling_time, energy, lyapunov_trace

__all__ = [
    "SurfaceConfig",
    "surface_value",
    "on_surface_rhs",
    "settling_bound",
    "ptsm_lyapunov",
    "TbgPoly",
    "tbg_eval",
    "tbg_gain",
    "tbg_validate",
    "ManipulatorParams",
    "ManipulatorState",
    "SecondOrderState",
    "DisturbanceModel",
    "SecondOrderPlant",
    "ManipulatorPlant",
    "reference_eval",
    "SecondOrderGains",
    "ManipGains",
    "check_gains",
    "SimConfig",
    "SimLog",
    "integrate",
    "settling_time",
    "energy",
    "lyapunov_trace",
]

__version__ = "0.1.0"
