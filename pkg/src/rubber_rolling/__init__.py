"""Rubber rolling of a dynamically asymmetric ball over a fixed sphere."""

from .config import ConfigError, RunConfig, parse_config
from .dynamics import BodyParams, SceneParams, kappa
from .so3 import IntegrationError, StepperSpec, integrate

__all__ = [
    "BodyParams",
    "ConfigError",
    "IntegrationError",
    "RunConfig",
    "SceneParams",
    "StepperSpec",
    "integrate",
    "kappa",
    "parse_config",
]
__version__ = "0.1.0"
