"""Closed-form apex quantities for bodies of revolution in R^3."""
from __future__ import annotations

import numpy as np
from scipy.integrate import quad


def apex_cos(profile, s):
    """``cos`` of the meridian angle on the sphere of radius ``s`` about the apex."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    x = profile.meridian_x(s)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.where(s > 0, profile.f(x) / np.where(s > 0, s, 1.0), 0.0)
    return np.clip(c, 0.0, 1.0)


def apex_volume(profile, r, epsrel=1e-10):
    """``|B(apex, r) ∩ C| = 2 pi int_0^r s^2 (1 - cos a(s)) ds`` for a unit-placed body."""
    if r <= 0:
        return 0.0
    val, _ = quad(lambda s: s * s * (1.0 - apex_cos(profile, s)[0]), 0.0, r,
                  epsabs=0.0, epsrel=epsrel, limit=200)
    return 2.0 * np.pi * val


def apex_perimeter(profile, r):
    """Area of the sphere of radius ``r`` about the apex inside the body."""
    if r <= 0:
        return 0.0
    return float(2.0 * np.pi * r * r * (1.0 - apex_cos(profile, r)[0]))
