"""Quadratic boson forms: classification, normal modes and evolution."""

from ._qbf import *  # noqa: F401,F403
from ._qbf import QbfError, Stability, classify, build_form  # noqa: F401

__version__ = "0.1.0"
