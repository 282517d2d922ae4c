"""Convex profile functions f with f(0) = 0 used for bodies of revolution.

A profile describes the meridian of ``{(z, t) : t >= f(|z|)}``.  All
evaluators are vectorised over numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from ..errors import BodySpecError

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ConvexProfile:
    """A convex function on ``[0, inf)`` with ``f(0) = 0``.

    ``h`` is the inverse of ``f`` when available.  ``params`` is a JSON-ready
    description used for hashing and round-tripping body files.
    """

    f: ArrayFn
    df: ArrayFn
    h: Optional[ArrayFn] = None
    strictly_convex: bool = False
    f_triple_prime_nonpositive: bool = False
    superlinear: bool = False
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        _validate(self)

    def __call__(self, s):
        return self.f(np.asarray(s, dtype=float))

    @property
    def slope_at_zero(self) -> float:
        return float(self.df(np.array(0.0)))

    @property
    def asymptotic_slope(self) -> float:
        """``lim f(s)/s``; ``inf`` for superlinear profiles."""
        if self.superlinear:
            return np.inf
        return float(self.params.get("asymptotic_slope", np.nan))

    def inverse(self, t):
        """Inverse of f, by bracketing root-finding when no closed form is known."""
        t = np.asarray(t, dtype=float)
        if self.h is not None:
            return self.h(t)
        out = np.empty_like(t)
        for i, ti in np.ndenumerate(t):
            if ti <= 0.0:
                out[i] = 0.0
                continue
            hi = 1.0
            while float(self.f(np.array(hi))) < ti:
                hi *= 2.0
                if hi > 1e300:
                    raise ValueError("profile does not reach the requested level")
            out[i] = brentq(lambda s: float(self.f(np.array(s))) - ti, 0.0, hi, xtol=1e-14)
        return out

    def meridian_x(self, s):
        """Radial coordinate x(s) > 0 solving ``x**2 + f(x)**2 = s**2``."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        lo = np.zeros_like(s)
        hi = s.copy()
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            g = mid * mid + self.f(mid) ** 2 - s * s
            below = g < 0
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= 1e-15 * np.maximum(1.0, s)):
                break
        return 0.5 * (lo + hi)

    def to_json(self) -> dict:
        return dict(self.params)


def _validate(p: ConvexProfile) -> None:
    if abs(float(p.f(np.array(0.0)))) > 1e-12:
        raise BodySpecError("/profile", "profile must satisfy f(0) = 0")
    s = np.linspace(0.0, 10.0, 257)
    fs = p.f(s)
    d = p.df(s)
    if np.any(np.diff(d) < -1e-9 * (1 + np.abs(d[1:]))):
        raise BodySpecError("/profile", "derivative must be non-decreasing")
    # midpoint test on sampled triples
    a, b = s[:-2], s[2:]
    mid = p.f(0.5 * (a + b))
    if np.any(mid > 0.5 * (fs[:-2] + fs[2:]) + 1e-9 * (1 + np.abs(mid))):
        raise BodySpecError("/profile", "profile is not convex")
    if p.h is not None:
        back = p.h(fs)
        if np.max(np.abs(back - s)) > 1e-9 * max(1.0, s[-1]):
            raise BodySpecError("/profile", "inverse h does not invert f")
    if p.superlinear:
        big = np.array([1e3, 1e6])
        ratio = p.f(big) / big
        if not ratio[1] > ratio[0]:
            raise BodySpecError("/profile", "superlinear flag inconsistent with f(s)/s")


def power(a: float) -> ConvexProfile:
    """``f(s) = s**a`` for ``a >= 1``."""
    a = float(a)
    if a < 1.0:
        raise BodySpecError("/profile/power", f"exponent must be >= 1, got {a}")

    def f(s):
        return np.abs(s) ** a

    def df(s):
        s = np.abs(s)
        if a == 1.0:
            return np.ones_like(s)
        return a * s ** (a - 1.0)

    def h(t):
        return np.maximum(t, 0.0) ** (1.0 / a)

    return ConvexProfile(
        f=f,
        df=df,
        h=h,
        strictly_convex=a > 1.0,
        f_triple_prime_nonpositive=(a == 1.0) or (1.0 < a <= 2.0),
        superlinear=a > 1.0,
        params={"power": a, "asymptotic_slope": np.inf if a > 1 else 1.0},
    )


def linear(k: float) -> ConvexProfile:
    """``f(s) = k s``; the meridian of a round cone."""
    k = float(k)
    if k < 0:
        raise BodySpecError("/profile/linear", "slope must be non-negative")
    return ConvexProfile(
        f=lambda s: k * np.abs(s),
        df=lambda s: np.full_like(np.asarray(s, dtype=float), k),
        h=(lambda t: np.maximum(t, 0.0) / k) if k > 0 else None,
        params={"linear": k, "asymptotic_slope": k},
    )


def tabulated(s_values, f_values) -> ConvexProfile:
    """Piecewise-linear convex profile through ``(s_i, f_i)``.

    Extended linearly past the last node, so it is never superlinear.
    """
    s = np.asarray(s_values, dtype=float)
    fv = np.asarray(f_values, dtype=float)
    if s.ndim != 1 or s.shape != fv.shape or s.size < 2:
        raise BodySpecError("/profile", "tabulated profile needs equal-length s and f lists (>= 2 nodes)")
    if s[0] != 0.0 or fv[0] != 0.0:
        raise BodySpecError("/profile/s", "tabulated profile must start at (0, 0)")
    if np.any(np.diff(s) <= 0):
        raise BodySpecError("/profile/s", "s values must be strictly increasing")
    slopes = np.diff(fv) / np.diff(s)
    if np.any(np.diff(slopes) < -1e-12):
        raise BodySpecError("/profile/f", "tabulated profile is not convex")
    if np.any(fv < 0) or slopes[0] < 0:
        raise BodySpecError("/profile/f", "tabulated profile must be non-decreasing from 0")

    def f(x):
        x = np.abs(np.asarray(x, dtype=float))
        inner = np.interp(x, s, fv)
        return np.where(x > s[-1], fv[-1] + slopes[-1] * (x - s[-1]), inner)

    def df(x):
        x = np.abs(np.asarray(x, dtype=float))
        idx = np.clip(np.searchsorted(s, x, side="right") - 1, 0, slopes.size - 1)
        return slopes[idx]

    h = None
    if slopes[0] > 0:
        def h(t):
            t = np.maximum(np.asarray(t, dtype=float), 0.0)
            inner = np.interp(t, fv, s)
            return np.where(t > fv[-1], s[-1] + (t - fv[-1]) / slopes[-1], inner)

    return ConvexProfile(
        f=f,
        df=df,
        h=h,
        strictly_convex=False,
        params={"s": s.tolist(), "f": fv.tolist(), "asymptotic_slope": float(slopes[-1])},
    )


def from_json(obj, path="/profile") -> ConvexProfile:
    if not isinstance(obj, dict):
        raise BodySpecError(path, "profile must be an object")
    if "power" in obj:
        try:
            return power(float(obj["power"]))
        except (TypeError, ValueError) as exc:
            if isinstance(exc, BodySpecError):
                raise
            raise BodySpecError(path + "/power", "power must be a number") from exc
    if "linear" in obj:
        return linear(float(obj["linear"]))
    if "s" in obj or "f" in obj:
        for key in ("s", "f"):
            if not isinstance(obj.get(key), list):
                raise BodySpecError(f"{path}/{key}", "expected a list of numbers")
        return tabulated(obj["s"], obj["f"])
    raise BodySpecError(path, "profile needs one of 'power', 'linear', or tabulated 's'/'f'")
