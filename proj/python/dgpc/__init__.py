"""Dynamical generalized polynomial chaos (C++ core)."""

from ._dgpc import *  # noqa: F401,F403
from ._dgpc import __version__  # noqa: F401
