"""Isoperimetric quantities of unbounded convex bodies.

Intrinsic-ball volumes, the growth function b(r) and its reciprocal, solid
angles, two-sided isoperimetric-profile brackets, mollified smoothing and
isoperimetric-dimension fits, with a property-test harness and a CLI.
"""
from .errors import *  # noqa: F401,F403

__version__ = "0.1.0"
