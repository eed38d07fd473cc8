"""Decoherence-free entanglement distribution simulator."""

from ._dfsim import *  # noqa: F401,F403
from ._dfsim import __version__

__all__ = [name for name in dir() if not name.startswith("_")]
