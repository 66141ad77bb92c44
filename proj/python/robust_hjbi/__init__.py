"""Robust HJBI solver for power utility under drift and volatility uncertainty."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
