"""Spectral curves of finite-type CMC planes: pencils, winding invariants, Whitham flows."""

from ._core import *  # noqa: F401,F403
from ._core import InvariantViolation, ResolutionError, ValidationError

__all__ = [name for name in dir() if not name.startswith("_")]
