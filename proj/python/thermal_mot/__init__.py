"""Thermal-aware multi-object tracking (compiled core in ``_core``)."""

from ._core import *  # noqa: F401,F403
from ._core import (
    ConfigError,
    DataError,
    Error,
    GeometryError,
    IoError,
    SequenceError,
    Tracker,
    TrackerConfig,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Error",
    "GeometryError",
    "IoError",
    "SequenceError",
    "Tracker",
    "TrackerConfig",
]
