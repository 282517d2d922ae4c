"""Isoperimetric-dimension estimates from log-log fits of growth tables and profile brackets.

Under the power-law model ``b(r) ~ r^beta`` the reciprocal behaves like
``v^(1/beta)``, so the profile ``v / phi(v)`` scales like ``v^((beta-1)/beta)``
and the dimension is ``m = beta``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from .errors import RangeError

MIN_POINTS = 6


@dataclass(frozen=True)
class DimensionFit:
    beta: float          # fitted log-log slope
    m: float             # dimension estimate
    window: tuple
    residual: float      # RMS residual of the log-log fit
    stderr: float
    points: int


def _fit(x, y, window, min_points):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if window is None:
        window = (float(x.max()) / 10.0, float(x.max()))
    lo, hi = window
    sel = (x >= lo * (1 - 1e-12)) & (x <= hi * (1 + 1e-12))
    if np.count_nonzero(sel) < min_points:
        raise RangeError(f"{np.count_nonzero(sel)} points in window [{lo}, {hi}]; need {min_points}")
    if np.any(y[sel] <= 0):
        raise RangeError("values must be positive in the fit window")
    lx, ly = np.log(x[sel]), np.log(y[sel])
    res = linregress(lx, ly)
    resid = ly - (res.intercept + res.slope * lx)
    return float(res.slope), (float(lo), float(hi)), float(np.sqrt(np.mean(resid ** 2))), float(res.stderr), int(sel.sum())


def fit_dimension(table, window=None, min_points: int = MIN_POINTS) -> DimensionFit:
    """Slope of ``log b`` against ``log r`` on ``window`` (default: the top decade of radii)."""
    b, s = table.b, table.sigma
    if np.any(np.diff(b) < -3.0 * np.hypot(s[1:], s[:-1]) - 1e-12):
        raise RangeError("growth table is not monotone")
    beta, win, resid, err, n = _fit(table.radii, b, window, min_points)
    return DimensionFit(beta, beta, win, resid, err, n)


def power_body_dimension(a: float) -> float:
    """``(a + 2) / a`` for ``t >= |z|^a``, ``1 < a <= 2``."""
    a = float(a)
    if not 1.0 < a <= 2.0:
        raise RangeError(f"exponent a={a} outside (1, 2]")
    return (a + 2.0) / a


def W_closed_form(a: float, r0: float, r: float) -> float:
    """``int_{r0}^r s^(2/a) ds = (a/(a+2)) (r^((a+2)/a) - r0^((a+2)/a))``."""
    p = power_body_dimension(a)
    if not 0.0 <= r0 <= r:
        raise RangeError("need 0 <= r0 <= r")
    return (r ** p - r0 ** p) / p


def profile_exponent_fit(bracket, window=None, min_points: int = 3):
    """Log-log slopes of the lower and upper bracket columns against volume.

    Each slope estimates ``(m-1)/m``; the returned fits carry ``m = 1/(1-slope)``.
    """
    out = []
    for col in (bracket.lower, bracket.upper):
        slope, win, resid, err, n = _fit(bracket.volumes, col, window, min_points)
        m = 1.0 / (1.0 - slope) if slope < 1.0 else np.inf
        out.append(DimensionFit(slope, m, win, resid, err, n))
    return tuple(out)
