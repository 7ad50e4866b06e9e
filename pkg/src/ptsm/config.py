"""Experiment configuration: sectioned key = value files.

The grammar is INI-like with four fixed sections; every key is validated
and unknown keys are rejected with their location.  A config parses,
serializes, and re-parses to the identical value, which is what makes a
run directory's ``config.ini`` echo re-runnable.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, fields, replace

PLANTS = ("second_order", "manipulator")
CONTROLLERS = ("ptsm", "tbg", "fixed")
SGN_NAMES = {"layer": "boundary_layer", "exact": "exact"}


class ConfigError(ValueError):
    """Malformed experiment config; the message carries the location."""


# section -> key -> (attribute, parser)
def _float(s: str) -> float:
    return float(s)


def _int(s: str) -> int:
    v = float(s)
    if v != int(v):
        raise ValueError(f"expected an integer, got {s}")
    return int(v)


def _floats(s: str) -> tuple:
    return tuple(float(p) for p in s.split(","))


def _ints(s: str) -> tuple:
    return tuple(_int(p) for p in s.split(","))


def _word(allowed):
    def parse(s: str) -> str:
        if s not in allowed:
            raise ValueError(f"expected one of {allowed}, got {s!r}")
        return s
    return parse


_SCHEMA = {
    "experiment": {
        "name": ("name", str),
        "plant": ("plant", _word(PLANTS)),
        "controller": ("controller", _word(CONTROLLERS)),
    },
    "sim": {
        "dt": ("dt", _float),
        "horizon": ("horizon", _float),
        "seeds": ("seeds", _ints),
        "decimation": ("decimation", _int),
        "sgn": ("sgn", _word(tuple(SGN_NAMES))),
        "layer_width": ("layer_width", _float),
    },
    "gains": {
        "ts": ("Ts", _float),
        "tc": ("Tc", _float),
        "gamma": ("gamma", _float),
        "rho": ("rho", _float),
        "kf": ("Kf", _floats),
        "kd": ("Kd", _floats),
        "sigma1": ("sigma1", _float),
        "sigma2": ("sigma2", _float),
        "sigma3": ("sigma3", _float),
        "sigma_m0_hat": ("sigma_m0_hat", _float),
        "eps": ("eps", _float),
        "alpha": ("alpha", _float),
        "beta": ("beta", _float),
        "m1": ("m1", _int),
        "n1": ("n1", _int),
        "m2": ("m2", _int),
        "n2": ("n2", _int),
    },
    "disturbance": {
        "kind": ("dist_kind", _word(("uniform", "zero"))),
        "bound": ("dist_bound", _float),
    },
    "init": {
        "low": ("init_low", _float),
        "high": ("init_high", _float),
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: plant, controller, gains, noise, and run settings."""

    name: str
    plant: str
    controller: str = "ptsm"
    dt: float = 1e-4
    horizon: float = 15.0
    seeds: tuple = (1,)
    decimation: int = 10
    sgn: str = "layer"
    layer_width: float = 1e-3
    Ts: float = 4.0
    Tc: float = 6.0
    gamma: float = 0.5
    rho: float = 0.5
    Kf: tuple | None = None
    Kd: tuple | None = None
    sigma1: float = 0.0
    sigma2: float = 0.0
    sigma3: float = 0.0
    sigma_m0_hat: float = 1.0
    eps: float | None = None
    alpha: float | None = None
    beta: float | None = None
    m1: int | None = None
    n1: int | None = None
    m2: int | None = None
    n2: int | None = None
    dist_kind: str = "uniform"
    dist_bound: float = 0.0
    init_low: float = -1.0
    init_high: float = 1.0

    def __post_init__(self):
        if self.plant not in PLANTS:
            raise ConfigError(f"[experiment] plant: expected one of {PLANTS}, got {self.plant!r}")
        if self.controller not in CONTROLLERS:
            raise ConfigError(f"[experiment] controller: expected one of {CONTROLLERS}")
        if self.plant == "second_order" and self.Kf is None:
            raise ConfigError("[gains] kf is required for the second_order plant")
        if self.plant == "manipulator" and self.Kd is None:
            raise ConfigError("[gains] kd is required for the manipulator plant")
        if self.controller == "tbg" and self.eps is None:
            raise ConfigError("[gains] eps is required by the tbg controller")
        if self.controller == "fixed" and self.alpha is None:
            raise ConfigError("[gains] alpha/beta/m1/n1/m2/n2 are required by the fixed controller")
        if not self.init_low <= self.init_high:
            raise ConfigError("[init] low must not exceed high")
        if len(self.seeds) == 0:
            raise ConfigError("[sim] seeds must list at least one seed")

    @property
    def sgn_mode(self) -> str:
        return SGN_NAMES[self.sgn]

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self

    # -- serialization ------------------------------------------------------

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        for section, keys in _SCHEMA.items():
            body = {}
            for key, (attr, _) in keys.items():
                v = values[attr]
                if v is None:
                    continue
                if isinstance(v, tuple):
                    body[key] = ",".join(repr(x) if isinstance(x, float) else str(x) for x in v)
                elif isinstance(v, float):
                    body[key] = repr(v)
                else:
                    body[key] = str(v)
            if body:
                cp[section] = body
        out = io.StringIO()
        cp.write(out)
        return out.getvalue()

    def to_file(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_ini())

    @classmethod
    def from_ini(cls, text: str) -> "ExperimentConfig":
        cp = configparser.ConfigParser()
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"config parse error: {exc}") from exc
        kw = {}
        for section in cp.sections():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown section [{section}]")
            for key, raw in cp[section].items():
                if key not in _SCHEMA[section]:
                    raise ConfigError(f"unknown key [{section}] {key}")
                attr, parse = _SCHEMA[section][key]
                try:
                    kw[attr] = parse(raw)
                except ValueError as exc:
                    raise ConfigError(f"bad value for [{section}] {key}: {exc}") from exc
        missing = [k for k in ("name", "plant") if k not in kw]
        if missing:
            raise ConfigError(f"missing required [experiment] keys: {', '.join(missing)}")
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_ini(fh.read())
