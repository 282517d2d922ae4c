"""The uniform-geometry growth function ``b(r) = inf_x |B_C(x, r)|`` and its reciprocal.

Also the apex volume ``V(r)`` of bodies of revolution in R^3 and the
constants derived from ``b(r0)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.stats import qmc

from . import _revolution
from ._sampling import parallel_map
from .bodies.families import BallCut, Body, RevolutionBody
from .bodies.structure import asymptotic_cylinders, cylinder_points
from .errors import DimensionError, IsoprofError, NoClosedFormError, RangeError
from .measure import (MCConfig, MCEstimate, exact, inradius, make_probe, sphere_area,
                      unit_ball_volume)

PHI_TOL = 1e-10


@dataclass(frozen=True)
class CenterConfig:
    """Candidate centres for the infimum over ``x in C``.

    ``count`` boundary points come from a scrambled Sobol cloud in a box of
    half-width ``extent`` (default: twice the largest radius, at least 4)
    about an interior point, pushed to the boundary.
    """

    count: int = 64
    extent: float | None = None
    structural: bool = True
    cylinders: bool = True
    seed: int = 0x5EED


def boundary_cloud(body: Body, count: int, extent: float, seed: int) -> np.ndarray:
    """Boundary points obtained from a low-discrepancy cloud around an interior point."""
    if count <= 0:
        return np.empty((0, body.dim))
    x0 = body.interior_point()
    m = 1 << max(1, math.ceil(math.log2(count)))
    pts = qmc.Sobol(body.dim, scramble=True, seed=seed).random(m)[:count]
    pts = x0 + extent * (2.0 * pts - 1.0)
    inside = body.contains(pts)
    out = np.empty_like(pts)
    if (~inside).any():
        out[~inside] = body.project(pts[~inside])
    if inside.any():
        U = pts[inside] - x0
        n = np.linalg.norm(U, axis=1)
        n[n == 0] = 1.0
        U = U / n[:, None]
        t = body.raycast(x0, U)
        # recession directions never exit; cast the opposite ray instead
        flip = ~np.isfinite(t)
        if flip.any():
            U[flip] = -U[flip]
            t[flip] = body.raycast(x0, U[flip])
        t = np.where(np.isfinite(t), t, 0.0)
        out[inside] = x0 + t[:, None] * U
    return out


@dataclass
class GrowthTable:
    """Sampled ``b(r)``; values are upper bounds on b except on certified paths."""

    radii: np.ndarray
    values: list
    dim: int
    fast_path_used: bool = False
    concavity_enforced: bool = True
    certified: bool = False
    centers: np.ndarray | None = None
    cross_check: dict | None = None
    note: str = ""
    _root: np.ndarray | None = field(default=None, repr=False)

    @property
    def b(self) -> np.ndarray:
        return np.array([v.value for v in self.values])

    @property
    def sigma(self) -> np.ndarray:
        return np.array([v.std_error for v in self.values])

    def root(self) -> np.ndarray:
        """``b^(1/d)`` on the grid, replaced by its least concave majorant through the origin."""
        if self._root is None:
            y = self.b ** (1.0 / self.dim)
            self._root = _concave_majorant(self.radii, y) if self.concavity_enforced else y
        return self._root

    def concavity_adjustment(self) -> float:
        """Largest relative change made by the concavity enforcement."""
        y = self.b ** (1.0 / self.dim)
        return float(np.max(np.abs(self.root() - y) / np.maximum(y, 1e-300)))

    def tail_slope(self) -> float:
        r = np.concatenate([[0.0], self.radii])
        y = np.concatenate([[0.0], self.root()])
        return float((y[-1] - y[-2]) / (r[-1] - r[-2]))

    def V(self, r):
        """Piecewise-linear interpolant of ``b^(1/d)`` (linear tail), raised to ``d``."""
        r = np.asarray(r, dtype=float)
        rr = np.concatenate([[0.0], self.radii])
        yy = np.concatenate([[0.0], self.root()])
        inner = np.interp(r, rr, yy)
        tail = yy[-1] + self.tail_slope() * (r - rr[-1])
        y = np.where(r > rr[-1], tail, inner)
        return np.maximum(y, 0.0) ** self.dim


def _concave_majorant(x, y):
    """Least concave majorant of the points ``(0, 0), (x_i, y_i)`` evaluated at ``x``."""
    xs = np.concatenate([[0.0], x])
    ys = np.concatenate([[0.0], y])
    hull = []
    for i in range(len(xs)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.interp(x, xs[hull], ys[hull])


def _candidates(body, radii, ccfg):
    """List of ``(body, centre, label)`` pairs whose ball volumes bound b from above."""
    extent = ccfg.extent if ccfg.extent is not None else max(4.0, 2.0 * float(np.max(radii)))
    out = []
    if ccfg.structural:
        for p in body.structural_points():
            out.append((body, p, "structural"))
    for p in boundary_cloud(body, ccfg.count, extent, ccfg.seed):
        out.append((body, p, "boundary"))
    if ccfg.cylinders and not getattr(body, "bounded", False):
        try:
            report = asymptotic_cylinders(body)
        except (NoClosedFormError, IsoprofError):
            report = None
        if report is not None:
            for cyl in report.cylinders:
                for p in cylinder_points(cyl):
                    out.append((cyl, p, "cylinder"))
    return out


def b_table(body: Body, radii, centers: CenterConfig = CenterConfig(),
            cfg: MCConfig = MCConfig(), cross_check: int = 32) -> GrowthTable:
    """Tabulate ``b(r)`` on ``radii``.

    Bodies of revolution with a strictly convex, superlinear profile whose
    third derivative is non-positive take the apex fast path
    ``b(r) = |B_C(apex, r)|``; the fast path is cross-checked against
    ``cross_check`` random boundary centres.  Otherwise ``b`` is the minimum
    of intrinsic-ball volumes over a candidate-centre set (an upper bound).
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0:
        raise ValueError("radius grid is empty")
    if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ValueError("radii must be positive and strictly increasing")
    d = body.dim
    if getattr(body, "bounded", False):
        warnings.warn(f"b_table on a bounded {body.family}: b(r) saturates at |C|", stacklevel=2)

    if isinstance(body, RevolutionBody) and body.fast_path_ok:
        apex = np.array(body.apex)
        probe = make_probe(body, apex, cfg)
        values = [probe.volume(r) for r in radii]
        report = None
        if cross_check > 0:
            report = _cross_check(body, apex, radii, values, cross_check, centers, cfg)
        return GrowthTable(radii, values, d, fast_path_used=True, certified=True,
                           centers=np.tile(apex, (radii.size, 1)), cross_check=report,
                           note="apex fast path")

    sampler = GrowthSampler(body, centers, cfg, _extent(centers, radii))
    return sampler.table(radii)


def _extent(centers, radii):
    return centers.extent if centers.extent is not None else max(4.0, 2.0 * float(np.max(radii)))


class GrowthSampler:
    """Probes at a fixed candidate-centre set; tables at any radius grid reuse them."""

    def __init__(self, body: Body, centers: CenterConfig = CenterConfig(),
                 cfg: MCConfig = MCConfig(), extent: float = 4.0):
        self.body = body
        self.cfg = cfg
        self.candidates = _candidates(body, [extent / 2.0], CenterConfig(
            centers.count, extent, centers.structural, centers.cylinders, centers.seed))
        self.probes = parallel_map(lambda c: _warm(make_probe(c[0], c[1], cfg)), self.candidates)

    def table(self, radii) -> GrowthTable:
        radii = np.asarray(radii, dtype=float)
        if radii.size == 0:
            raise ValueError("radius grid is empty")
        rows = [[pr.volume(r) for r in radii] for pr in self.probes]
        vals = np.array([[e.value for e in row] for row in rows])
        best = np.argmin(vals, axis=0)
        values = [rows[k][j] for j, k in enumerate(best)]
        certified = all(v.exact for v in values) and _exact_minimizer_known(self.body)
        return GrowthTable(radii, values, self.body.dim, fast_path_used=False, certified=certified,
                           centers=np.array([self.candidates[k][1] for k in best]),
                           note="exact" if certified else "upper bound on b (finite candidate set)")


def _warm(probe):
    if type(probe).__name__ == "BallProbe":
        probe._ball_data()
    return probe


def _exact_minimizer_known(body):
    from .bodies.families import FullSpace, HalfSpace, Slab

    return isinstance(body, (HalfSpace, Slab, FullSpace))


def _probe_row(cand, radii, cfg):
    cbody, x, _ = cand
    probe = make_probe(cbody, x, cfg)
    return [probe.volume(r) for r in radii]


def _cross_check(body, apex, radii, values, count, centers, cfg):
    extent = centers.extent if centers.extent is not None else max(4.0, 2.0 * float(np.max(radii)))
    pts = boundary_cloud(body, count, extent, centers.seed + 1)
    rows = parallel_map(lambda p: _probe_row((body, p, ""), radii, MCConfig(cfg.samples, cfg.seed, False)), pts)
    violations, worst = 0, -np.inf
    for row in rows:
        for apex_est, est in zip(values, row):
            margin = apex_est.value - est.value - 3.0 * math.hypot(apex_est.std_error, est.std_error)
            worst = max(worst, margin)
            violations += margin > 1e-9
    return {"centers": int(len(pts)), "violations": int(violations), "worst_margin": float(worst),
            "points": pts}


# ---------------------------------------------------------------------------
# Reciprocal functions
# ---------------------------------------------------------------------------

class ReciprocalFn:
    """``phi(v) = inf{r > 0 : V(r) >= v}`` for a non-decreasing ``V``."""

    def __init__(self, V, label="closed form", max_radius=np.inf, source=None):
        self.V = V
        self.label = label
        self.max_radius = float(max_radius)
        self.source = source

    @classmethod
    def from_table(cls, table: GrowthTable, extrapolation=1e3):
        if table.tail_slope() <= 0:
            max_r = float(table.radii[-1])
        else:
            max_r = float(table.radii[-1]) * extrapolation
        return cls(table.V, "growth table", max_r, table)

    @classmethod
    def half_space(cls, dim):
        c = 0.5 * unit_ball_volume(dim)
        return cls(lambda r: c * np.asarray(r, dtype=float) ** dim, "half-space")

    def _one(self, v):
        if not v > 0:
            raise ValueError("volume must be positive")
        hi = 1.0
        while float(self.V(hi)) < v:
            hi *= 2.0
            if hi > min(self.max_radius * 2.0, 1e15):
                raise RangeError(f"volume {v} exceeds the certified range of {self.label}")
        lo = hi / 2.0 if hi > 1.0 else 0.0
        while hi - lo > max(PHI_TOL, 1e-15 * hi):
            mid = 0.5 * (lo + hi)
            if float(self.V(mid)) >= v:
                hi = mid
            else:
                lo = mid
        if hi > self.max_radius:
            raise RangeError(f"volume {v} exceeds the certified range of {self.label}")
        return hi

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        if v.ndim == 0:
            return self._one(float(v))
        return np.array([self._one(float(x)) for x in v.ravel()]).reshape(v.shape)


def phi(source, v):
    """Reciprocal of a growth table, a ``ReciprocalFn`` or a callable ``V``."""
    if isinstance(source, GrowthTable):
        source = ReciprocalFn.from_table(source)
    elif not isinstance(source, ReciprocalFn):
        source = ReciprocalFn(source)
    return source(v)


# ---------------------------------------------------------------------------
# Bodies of revolution in R^3
# ---------------------------------------------------------------------------

def _revolution_3d(body):
    if not isinstance(body, RevolutionBody):
        raise TypeError("expected a body of revolution")
    if body.dim != 3:
        raise DimensionError("the apex volume formula is implemented in R^3 only")


def V_revolution(body: RevolutionBody, r: float) -> float:
    """``|B_C(apex, r)| = 2 pi int_0^r s^2 (1 - f(x(s))/s) ds`` by adaptive quadrature."""
    _revolution_3d(body)
    lam = body.factor
    return lam ** 3 * _revolution.apex_volume(body.profile, float(r) / lam, epsrel=1e-10)


def g_weight(t):
    """``g(t) = 2 (1 - (1 + t)**-0.5) / t`` with ``g(0) = 1``; decreasing on ``(0, inf)``."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < 1e-6
    ts = np.where(small, 1.0, t)
    val = 2.0 * (1.0 - 1.0 / np.sqrt(1.0 + ts)) / ts
    series = 1.0 - 0.75 * t + 0.625 * t * t
    return np.where(small, series, val)


def revolution_r0(body: RevolutionBody) -> float:
    """Smallest radius beyond which ``s / f(x(s)) < 3/2`` (ratio decreases to 1)."""
    _revolution_3d(body)
    prof = body.profile
    if not prof.superlinear:
        raise ValueError("profile must be superlinear")

    def ratio(s):
        x = prof.meridian_x(np.array([s]))[0]
        return s / float(prof.f(np.array(x))) - 1.5

    hi = 1.0
    while ratio(hi) > 0:
        hi *= 2.0
    lo = hi / 2.0
    while ratio(lo) <= 0 and lo > 1e-12:
        lo /= 2.0
    return body.factor * brentq(ratio, lo, hi, xtol=1e-13)


def W_quadrature(body: RevolutionBody, r0: float, r: float) -> float:
    """``int_{r0}^{r} h(s)^2 ds`` with ``h`` the inverse profile (unit placement)."""
    prof = body.profile
    if r <= r0:
        return 0.0
    val, _ = quad(lambda s: float(prof.inverse(np.array(s))) ** 2, r0, r,
                  epsabs=0.0, epsrel=1e-12, limit=200)
    return val


@dataclass(frozen=True)
class SandwichReport:
    r: float
    r0: float
    lower: float
    middle: float
    upper: float

    @property
    def holds(self) -> bool:
        return self.lower < self.middle < self.upper


def revolution_sandwich(body: RevolutionBody, r: float, r0: float | None = None,
                        D=math.pi / 9, E=18 * math.pi) -> SandwichReport:
    """``D W(r) < V(r) - V(r0) < E W(r)`` for ``r > r0``."""
    _revolution_3d(body)
    if body.factor != 1.0:
        raise ValueError("sandwich is stated for the unit-placed body")
    r0 = revolution_r0(body) if r0 is None else float(r0)
    W = W_quadrature(body, r0, r)
    mid = V_revolution(body, r) - V_revolution(body, r0)
    return SandwichReport(r, r0, D * W, mid, E * W)


def g_range_on(body: RevolutionBody, r0: float, r: float, points=257):
    """Range of ``g(x(s)^2 / f(x(s))^2)`` for ``s`` in ``[r0, r]``."""
    prof = body.profile
    s = np.linspace(r0, r, points)
    x = prof.meridian_x(s)
    t = (x / prof.f(x)) ** 2
    g = g_weight(t)
    return float(g.min()), float(g.max())


# ---------------------------------------------------------------------------
# Uniform-geometry constants
# ---------------------------------------------------------------------------

@dataclass
class GrowthConstants:
    b_r0: MCEstimate
    r0: float
    inradius_lb: float
    delta: float
    ell1: float
    ell2: float
    Lambda: float | None = None
    b_1: MCEstimate | None = None


def constants(body: Body, r0: float, cfg: MCConfig = MCConfig(), c1: float | None = None,
              centers: CenterConfig = CenterConfig(count=8)) -> GrowthConstants:
    """``b(r0)``, the inradius lower bound and the density constants ``l1, l2`` (and ``Lambda``)."""
    r0 = float(r0)
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    d = body.dim
    w = unit_ball_volume(d)
    radii = sorted({r0, 1.0}) if c1 is not None else [r0]
    table = b_table(body, radii, centers, cfg)
    b_r0 = table.values[list(table.radii).index(r0)]
    inr_lb = b_r0.value / (sphere_area(d) * r0 ** (d - 1))
    pts = [p for _, p, _ in _candidates(body, [r0], centers) if body.contains(p)]
    deltas = [inradius(BallCut(body, p, r0), cfg).value for p in pts]
    delta = float(min(deltas))
    out = GrowthConstants(b_r0, r0, inr_lb, delta, w * (delta / r0) ** d, w)
    if c1 is not None:
        b1 = table.values[list(table.radii).index(1.0)]
        out.b_1 = b1
        out.Lambda = float(c1) * b1.value / w ** ((d + 1) / d)
    return out
