"""Flat ``key = value`` run configuration.

Example::

    model = rubber
    body.mu = 1
    body.I1 = 1
    body.I2 = 2
    body.I3 = 3
    body.b = 0.5
    scene.a = 1          # or: plane
    init.gamma = 0.58, 0.56, 0.59
    init.L = 0.3, -0.2, 0.5
    stepper.dt = 1e-3
    t_end = 10

Blank lines and ``#`` comments are ignored. Vector values are comma separated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .dynamics import BodyParams, SceneParams, kappa
from .so3 import StepperSpec

MODELS = ("rubber", "marble", "skiding", "reduced", "darboux")

KEYS = {
    "model": "str",
    "body.mu": "float",
    "body.I1": "float",
    "body.I2": "float",
    "body.I3": "float",
    "body.b": "float",
    "scene.a": "scene",
    "init.gamma": "vec",
    "init.L": "vec",
    "init.q": "vec",
    "init.qdot": "vec",
    "init.M": "vec",
    "marble.r": "float",
    "darboux.normalization": "str",
    "stepper.method": "str",
    "stepper.dt": "float",
    "stepper.atol": "float",
    "stepper.rtol": "float",
    "stepper.project": "bool",
    "t_end": "float",
    "output": "str",
    "output.sample_every": "int",
    "seed": "int",
}
REQUIRED = ("model", "body.mu", "body.I1", "body.I2", "body.I3", "body.b", "scene.a", "t_end")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""

    def __init__(self, key: str, reason: str):
        super().__init__(f"{key}: {reason}")
        self.key = key
        self.reason = reason


@dataclass(frozen=True)
class RunConfig:
    body: BodyParams
    scene: SceneParams
    model: str
    t_end: float
    stepper: StepperSpec = StepperSpec()
    gamma0: Optional[tuple] = None
    L0: Optional[tuple] = None
    q0: Optional[tuple] = None
    qdot0: Optional[tuple] = None
    M0: Optional[tuple] = None
    marble_r: Optional[float] = None
    normalization: str = "product"
    output: Optional[str] = None
    sample_every: int = 10
    seed: int = 42
    raw: dict = field(default_factory=dict, compare=False)


def _convert(key: str, kind: str, text: str):
    try:
        if kind == "float":
            v = float(text)
            if not math.isfinite(v):
                raise ValueError
            return v
        if kind == "int":
            return int(text)
        if kind == "bool":
            low = text.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError
        if kind == "vec":
            v = tuple(float(c) for c in text.split(","))
            if len(v) != 3:
                raise ValueError
            return v
        if kind == "scene":
            if text.lower() in ("plane", "inf"):
                return math.inf
            return float(text)
        return text
    except ValueError:
        raise ConfigError(key, f"cannot read {text!r} as {kind}") from None


def parse_pairs(text: str, strict: bool = True) -> dict:
    """Read ``key = value`` lines into a dict of raw strings."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}", "expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if strict and key not in KEYS:
            raise ConfigError(key, "unknown key")
        out[key] = value
    return out


def config_from_pairs(pairs: dict, strict: bool = True) -> RunConfig:
    """Validate raw pairs into a :class:`RunConfig`."""
    if strict:
        for key in pairs:
            if key not in KEYS:
                raise ConfigError(key, "unknown key")
    for key in REQUIRED:
        if key not in pairs:
            raise ConfigError(key, "missing required key")
    v = {k: _convert(k, KEYS[k], str(s)) for k, s in pairs.items() if k in KEYS}

    model = v["model"]
    if model not in MODELS:
        raise ConfigError("model", f"must be one of {', '.join(MODELS)}")
    inertia = (v["body.I1"], v["body.I2"], v["body.I3"])
    for i, name in enumerate(("body.I1", "body.I2", "body.I3")):
        if inertia[i] <= 0:
            raise ConfigError(name, "principal moments must be positive")
    if not inertia[0] <= inertia[1] <= inertia[2]:
        raise ConfigError("body.I2", "principal moments must be ordered I1 <= I2 <= I3")
    if v["body.mu"] <= 0:
        raise ConfigError("body.mu", "mass must be positive")
    if v["body.b"] == 0:
        raise ConfigError("body.b", "radius must be non-zero")
    if not v["scene.a"] > 0:
        raise ConfigError("scene.a", "radius must be positive or 'plane'")
    body = BodyParams(v["body.mu"], inertia, v["body.b"])
    scene = SceneParams(v["scene.a"], v["body.b"])
    try:
        kappa(scene)
    except ValueError:
        raise ConfigError("body.b", "kappa undefined for b = -a") from None
    if v["t_end"] <= 0:
        raise ConfigError("t_end", "must be positive")
    if model == "darboux":
        if not (inertia[1] - inertia[0] > 1e-9 and inertia[2] - inertia[1] > 1e-9):
            raise ConfigError("body.I2", "darboux model needs strictly distinct principal moments")
    try:
        stepper = StepperSpec(
            method=v.get("stepper.method", "rk4"),
            dt=v.get("stepper.dt", StepperSpec.dt),
            atol=v.get("stepper.atol", StepperSpec.atol),
            rtol=v.get("stepper.rtol", StepperSpec.rtol),
            project=v.get("stepper.project", True),
        )
    except ValueError as exc:
        raise ConfigError("stepper", str(exc)) from None
    norm = v.get("darboux.normalization", "product")
    if norm not in ("product", "full"):
        raise ConfigError("darboux.normalization", "must be 'product' or 'full'")
    r = v.get("marble.r")
    if r is not None and r <= 0:
        raise ConfigError("marble.r", "must be positive")
    every = v.get("output.sample_every", 10)
    if every < 1:
        raise ConfigError("output.sample_every", "must be at least 1")
    for key in ("init.gamma", "init.q"):
        if key in v and np.linalg.norm(v[key]) == 0:
            raise ConfigError(key, "must be non-zero")
    return RunConfig(
        body=body,
        scene=scene,
        model=model,
        t_end=v["t_end"],
        stepper=stepper,
        gamma0=v.get("init.gamma"),
        L0=v.get("init.L"),
        q0=v.get("init.q"),
        qdot0=v.get("init.qdot"),
        M0=v.get("init.M"),
        marble_r=r,
        normalization=norm,
        output=v.get("output"),
        sample_every=every,
        seed=v.get("seed", 42),
        raw=dict(pairs),
    )


def parse_config(text: str, strict: bool = True) -> RunConfig:
    """Parse and validate configuration text."""
    return config_from_pairs(parse_pairs(text, strict), strict)


def with_overrides(config: RunConfig, overrides: dict) -> RunConfig:
    """Re-validate ``config`` with some raw keys replaced."""
    pairs = dict(config.raw)
    pairs.update({k: str(val) for k, val in overrides.items()})
    cfg = config_from_pairs(pairs)
    return replace(cfg, raw=pairs)
