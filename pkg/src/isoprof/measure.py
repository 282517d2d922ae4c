"""Seeded Monte-Carlo and closed-form estimators.

Intrinsic-ball volume ``|B_C(x, r)|``, the relative perimeter of intrinsic
balls, solid angles of cones, inradius and Hausdorff distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, gammaln

from . import _revolution
from ._sampling import ball_samples, cube_samples, rng_for, sphere_samples
from .bodies.families import (Ball, BallCut, Body, Flat, FullSpace, HalfSpace, PolyCone,
                              Polytope, Ray, RevolutionBody, Slab, _max_depth_point)
from .bodies.structure import cone_apex, is_cone
from .errors import EmptyWindowError, NotAConeError, RangeError, UnboundedBodyError

DEFAULT_SAMPLES = 100_000
DEFAULT_SEED = 0x5EED


@dataclass(frozen=True)
class MCEstimate:
    """A Monte-Carlo value with its standard error; ``samples == 0`` marks a closed form."""

    value: float
    std_error: float
    samples: int
    seed: int

    @property
    def exact(self) -> bool:
        return self.samples == 0

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class MCConfig:
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    shortcuts: bool = True

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def exact(value, seed=DEFAULT_SEED) -> MCEstimate:
    return MCEstimate(float(value), 0.0, 0, seed)


def unit_ball_volume(d: int) -> float:
    """``omega_d``, the volume of the unit ball of ``R^d``."""
    return float(np.exp(0.5 * d * np.log(np.pi) - gammaln(0.5 * d + 1.0)))


def sphere_area(d: int) -> float:
    """``d * omega_d``, the area of the unit sphere in ``R^d``."""
    return d * unit_ball_volume(d)


def _check_radius(r):
    r = float(r)
    if not r > 0 or not np.isfinite(r):
        raise ValueError(f"radius must be positive, got {r}")
    return r


# ---------------------------------------------------------------------------
# Closed forms for caps, slabs, orthants and revolution apexes
# ---------------------------------------------------------------------------

def cap_volume(d, r, c):
    """Volume of ``{u in B(0, r) : u_1 >= c}``."""
    c = float(np.clip(c, -r, r))
    w = unit_ball_volume(d) * r ** d
    half = 0.5 * w * betainc(0.5 * (d + 1), 0.5, max(0.0, 1.0 - (c / r) ** 2))
    return half if c >= 0 else w - half


def cap_area(d, r, c):
    """Area of ``{u in S(0, r) : u_1 > c}``."""
    c = float(np.clip(c, -r, r))
    w = sphere_area(d) * r ** (d - 1)
    half = 0.5 * w * betainc(0.5 * (d - 1), 0.5, max(0.0, 1.0 - (c / r) ** 2))
    return half if c >= 0 else w - half


def _orthant_axes(cone):
    if isinstance(cone, PolyCone) and cone.is_orthant:
        return len(cone.normals)
    return None


def _shortcut(body, x, r, kind):
    """Closed-form value of the ball volume (``kind='volume'``) or perimeter, or ``None``."""
    d = body.dim
    vol = kind == "volume"
    if isinstance(body, FullSpace):
        return unit_ball_volume(d) * r ** d if vol else sphere_area(d) * r ** (d - 1)
    if body.degenerate and isinstance(body, (Ray, Flat)):
        return 0.0
    if isinstance(body, HalfSpace):
        c = body.offset - float(body.normal @ x)
        return cap_volume(d, r, c) if vol else cap_area(d, r, c)
    if isinstance(body, Slab):
        s = float(body.normal @ x)
        lo, hi = body.lo - s, body.hi - s
        if vol:
            return max(0.0, cap_volume(d, r, lo) - cap_volume(d, r, hi))
        return max(0.0, cap_area(d, r, lo) - cap_area(d, r, hi))
    k = _orthant_axes(body)
    if k is not None and np.allclose(x, body.apex, atol=1e-12):
        w = unit_ball_volume(d) * r ** d if vol else sphere_area(d) * r ** (d - 1)
        return w / 2 ** k
    if isinstance(body, RevolutionBody) and d == 3 and np.allclose(x, body.apex, atol=1e-12):
        lam = body.factor
        if vol:
            return lam ** 3 * _revolution.apex_volume(body.profile, r / lam)
        return lam ** 2 * _revolution.apex_perimeter(body.profile, r / lam)
    return None


# ---------------------------------------------------------------------------
# Intrinsic balls
# ---------------------------------------------------------------------------

def _binomial(total, hits, n, seed):
    p = hits / n
    return MCEstimate(float(total * p), float(total * math.sqrt(p * (1.0 - p) / n)), int(n), int(seed))


def _count_inside(body, pts, batch=200_000):
    hits = 0
    for i in range(0, len(pts), batch):
        hits += int(np.count_nonzero(body._contains(pts[i:i + batch])))
    return hits


BOX_GAIN = 0.125


def _clipped_box(body, x, r):
    """The box ``[x - r, x + r]`` cut by the body's bounding box, if it is much smaller than the ball.

    Returns ``(lo, hi, volume)`` or ``None`` when plain ball sampling is as good.
    """
    blo, bhi = body.bounding_box()
    lo, hi = np.maximum(x - r, blo), np.minimum(x + r, bhi)
    vol = float(np.prod(np.maximum(hi - lo, 0.0)))
    if vol >= BOX_GAIN * unit_ball_volume(body.dim) * r ** body.dim:
        return None
    return lo, hi, vol


def _box_volume(body, x, r, box, cfg):
    lo, hi, vol = box
    if vol == 0.0:
        return exact(0.0, cfg.seed)
    pts = lo + (hi - lo) * cube_samples(body.dim, cfg.samples, cfg.seed)
    near = np.einsum("ij,ij->i", pts - x, pts - x) <= r * r
    hits = _count_inside(body, pts[near]) if near.any() else 0
    return _binomial(vol, hits, cfg.samples, cfg.seed)


def ball_volume(body: Body, x, r, cfg: MCConfig = MCConfig()) -> MCEstimate:
    """``|B_C(x, r)|`` by hit-or-miss sampling (or a closed form).

    Samples fill the ball, or the ball's bounding box clipped to the body's
    when that box is at most 1/8 of the ball (thin bodies at large radii).
    """
    r = _check_radius(r)
    x = np.asarray(x, dtype=float)
    if cfg.shortcuts:
        val = _shortcut(body, x, r, "volume")
        if val is not None:
            return exact(val, cfg.seed)
    box = _clipped_box(body, x, r)
    if box is not None:
        return _box_volume(body, x, r, box, cfg)
    d = body.dim
    pts = x + r * ball_samples(d, cfg.samples, cfg.seed)
    return _binomial(unit_ball_volume(d) * r ** d, _count_inside(body, pts), cfg.samples, cfg.seed)


def ball_relative_perimeter(body: Body, x, r, cfg: MCConfig = MCConfig()) -> MCEstimate:
    """``H^n(dB(x, r) ∩ int C)``, the relative perimeter of the intrinsic ball."""
    r = _check_radius(r)
    x = np.asarray(x, dtype=float)
    if cfg.shortcuts:
        val = _shortcut(body, x, r, "perimeter")
        if val is not None:
            return exact(val, cfg.seed)
    d = body.dim
    pts = x + r * sphere_samples(d, cfg.samples, cfg.seed)
    return _binomial(sphere_area(d) * r ** (d - 1), _count_inside(body, pts), cfg.samples, cfg.seed)


class BallProbe:
    """All intrinsic balls about one centre ``x in C`` from a single raycast.

    Each ball sample ``u`` is inside ``B_C(x, r)`` iff ``r |u|`` does not exceed
    the exit distance of the ray from ``x`` along ``u``.  The same samples
    serve every radius, so volume is exactly monotone in ``r`` (common random
    numbers).
    """

    def __init__(self, body: Body, x, cfg: MCConfig = MCConfig()):
        self.body = body
        self.x = np.asarray(x, dtype=float)
        self.cfg = cfg
        self.d = body.dim
        self._ball = None
        self._sphere = None
        self._boxed = {}

    def _ball_data(self):
        if self._ball is None:
            U = ball_samples(self.d, self.cfg.samples, self.cfg.seed)
            norm = np.linalg.norm(U, axis=1)
            reach = self.body.raycast(self.x, U / norm[:, None])
            # ratio reach/|u|: sample is inside B_C(x, r) iff r <= ratio
            self._ball = np.sort(reach / norm)
        return self._ball

    def _sphere_data(self):
        if self._sphere is None:
            U = sphere_samples(self.d, self.cfg.samples, self.cfg.seed)
            self._sphere = np.sort(self.body.raycast(self.x, U))
        return self._sphere

    def _fraction(self, sorted_reach, r, strict):
        side = "right" if strict else "left"
        n = sorted_reach.size
        return (n - np.searchsorted(sorted_reach, r, side=side)) / n

    def volume(self, r) -> MCEstimate:
        r = _check_radius(r)
        if _clipped_box(self.body, self.x, r) is not None:
            return self._box_level_volume(r)
        p = self._fraction(self._ball_data(), r, strict=False)
        return _binomial(unit_ball_volume(self.d) * r ** self.d, p * self.cfg.samples,
                         self.cfg.samples, self.cfg.seed)

    def _box_level_volume(self, r):
        # one clipped-box sample per dyadic level R = 2^k >= r, shared by all r in (R/2, R]
        k = math.ceil(math.log2(r))
        data = self._boxed.get(k)
        if data is None:
            R = 2.0 ** k
            blo, bhi = self.body.bounding_box()
            lo, hi = np.maximum(self.x - R, blo), np.minimum(self.x + R, bhi)
            vol = float(np.prod(np.maximum(hi - lo, 0.0)))
            dist = np.empty(0)
            if vol > 0:
                pts = lo + (hi - lo) * cube_samples(self.d, self.cfg.samples, self.cfg.seed)
                keep = self.body._contains(pts)
                dist = np.sort(np.linalg.norm(pts[keep] - self.x, axis=1))
            data = self._boxed[k] = (vol, dist)
        vol, dist = data
        hits = np.searchsorted(dist, r, side="right")
        return _binomial(vol, hits, self.cfg.samples, self.cfg.seed)

    def perimeter(self, r) -> MCEstimate:
        r = _check_radius(r)
        p = self._fraction(self._sphere_data(), r, strict=True)
        return _binomial(sphere_area(self.d) * r ** (self.d - 1), p * self.cfg.samples,
                         self.cfg.samples, self.cfg.seed)

    def max_volume(self) -> float:
        """``|C ∩ B(x, inf)|``, finite only for bounded bodies."""
        reach = self._ball_data()
        if np.isinf(reach).any():
            return np.inf
        return self.volume(float(reach.max()) * (1 + 1e-12)).value

    def radius_for_volume(self, v, tol=1e-10) -> float:
        """Smallest ``r`` with ``volume(r) >= v`` (monotone bisection)."""
        v = float(v)
        if not v > 0:
            raise ValueError("volume must be positive")
        hi = 1.0
        for _ in range(200):
            if self.volume(hi).value >= v:
                break
            hi *= 2.0
        else:
            raise RangeError(f"volume {v} exceeds the intrinsic volume available at this centre")
        lo = 0.0
        while hi - lo > tol * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if self.volume(mid).value >= v:
                hi = mid
            else:
                lo = mid
        return hi


class ExactProbe(BallProbe):
    """Probe backed by the closed-form registry."""

    def volume(self, r):
        return exact(_shortcut(self.body, self.x, _check_radius(r), "volume"), self.cfg.seed)

    def perimeter(self, r):
        return exact(_shortcut(self.body, self.x, _check_radius(r), "perimeter"), self.cfg.seed)

    def max_volume(self):
        return np.inf

    def radius_for_volume(self, v, tol=1e-12):
        v = float(v)
        if not v > 0:
            raise ValueError("volume must be positive")
        hi = 1.0
        while self.volume(hi).value < v:
            hi *= 2.0
        lo = 0.0
        while hi - lo > tol * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if self.volume(mid).value >= v:
                hi = mid
            else:
                lo = mid
        return hi


def make_probe(body: Body, x, cfg: MCConfig = MCConfig()) -> BallProbe:
    x = np.asarray(x, dtype=float)
    if cfg.shortcuts and not getattr(body, "bounded", False) and _shortcut(body, x, 1.0, "volume") is not None:
        return ExactProbe(body, x, cfg)
    return BallProbe(body, x, cfg)


# ---------------------------------------------------------------------------
# Solid angles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolidAngle:
    """``alpha(K)``: the area of the unit-sphere trace of the cone K at its apex."""

    value: float
    std_error: float
    ambient_dim: int
    exact: bool
    estimate: MCEstimate | None = None

    @property
    def full(self) -> float:
        return sphere_area(self.ambient_dim)

    def __float__(self):
        return float(self.value)


def _exact_solid_angle(cone):
    d = cone.dim
    full = sphere_area(d)
    if isinstance(cone, FullSpace):
        return full
    if isinstance(cone, HalfSpace):
        return full / 2
    if isinstance(cone, PolyCone):
        k = _orthant_axes(cone)
        if k is not None:
            return full / 2 ** k
        if len(cone.normals) == 2:
            cos = float(np.clip(cone.normals[0] @ cone.normals[1], -1.0, 1.0))
            theta = np.pi - np.arccos(cos)
            return full * theta / (2 * np.pi)
    if isinstance(cone, RevolutionBody) and d == 3 and "linear" in cone.profile.params:
        k = cone.profile.params["linear"]
        return 2 * np.pi * (1 - k / math.sqrt(1 + k * k))
    return None


def solid_angle(cone: Body, cfg: MCConfig = MCConfig()) -> SolidAngle:
    """Solid angle of a cone; closed forms for half-spaces, orthants, wedges and round cones."""
    is_round = isinstance(cone, RevolutionBody) and "linear" in cone.profile.params
    if not (is_cone(cone) or is_round):
        raise NotAConeError(f"{cone.family} is not a cone")
    if cfg.shortcuts:
        val = _exact_solid_angle(cone)
        if val is not None:
            return SolidAngle(float(val), 0.0, cone.dim, True)
    apex = np.array(cone.apex) if is_round else cone_apex(cone)
    est = ball_relative_perimeter(cone, apex, 1.0, MCConfig(cfg.samples, cfg.seed, shortcuts=False))
    return SolidAngle(est.value, est.std_error, cone.dim, False, est)


# ---------------------------------------------------------------------------
# Inradius and Hausdorff distance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InradiusEstimate:
    value: float
    gap: float
    center: np.ndarray


def inradius(body: Body, cfg: MCConfig = MCConfig(), starts: int = 16) -> InradiusEstimate:
    """Largest ball inside a bounded body.

    Exact (linear programming) for H-polytopes and trivial for balls; otherwise
    the depth function is maximized from sampled starts (it is concave, so the
    local maximum is global) and the result is a lower-bound-biased estimate.
    """
    if not getattr(body, "bounded", False):
        raise UnboundedBodyError(f"{body.family} is unbounded; inradius is infinite")
    if isinstance(body, Ball):
        return InradiusEstimate(body.radius, 0.0, np.array(body.center))
    if isinstance(body, Polytope):
        c, r = body.chebyshev()
        return InradiusEstimate(r, 0.0, c)
    rng = rng_for(cfg.seed, 7)
    x0 = body.interior_point()
    span = body.radius if isinstance(body, BallCut) else 1.0
    cands = x0 + span * rng.standard_normal((256, body.dim)) * 0.5
    cands = body.project(cands)
    depth = body.depth(cands)
    order = np.argsort(depth)[::-1][:starts]
    sampled = float(max(depth.max(), body.depth(x0)))
    best = _max_depth_point(body, [x0] + list(cands[order[:3]]))
    val = float(body.depth(best))
    # depth is concave and 1-Lipschitz: the optimizer tolerance bounds the gap
    gap = 1e-8 * max(1.0, abs(val))
    return InradiusEstimate(max(val, sampled), gap, best)


@dataclass(frozen=True)
class HausdorffEstimate:
    value: float
    resolution: float


def _direction_grid(d, n):
    if d == 2:
        th = 2 * np.pi * np.arange(n) / n
        return np.column_stack([np.cos(th), np.sin(th)]), 2 * np.pi / n
    if d == 3:
        i = np.arange(n) + 0.5
        phi = np.arccos(1 - 2 * i / n)
        th = np.pi * (1 + 5 ** 0.5) * i
        U = np.column_stack([np.cos(th) * np.sin(phi), np.sin(th) * np.sin(phi), np.cos(phi)])
        return U, math.sqrt(4 * np.pi / n)
    U = np.random.default_rng(0).standard_normal((n, d))
    U /= np.linalg.norm(U, axis=1)[:, None]
    return U, (sphere_area(d) / n) ** (1.0 / (d - 1))


def _window(body, R):
    if float(body.distance(np.zeros(body.dim))) > R:
        raise EmptyWindowError(f"{body.family} does not meet the window of radius {R}")
    return BallCut(body, np.zeros(body.dim), R)


def _directed(Aw, Bw, origin, U, rng, rounds=3):
    def score(dirs):
        t = Aw.raycast(origin, dirs)
        pts = origin + t[:, None] * dirs
        return Bw.distance(pts)

    vals = score(U)
    best = float(vals.max())
    top = U[np.argsort(vals)[::-1][:8]]
    step = 0.05
    for _ in range(rounds):
        trial = top[:, None, :] + step * rng.standard_normal((len(top), 16, U.shape[1]))
        trial = trial.reshape(-1, U.shape[1])
        trial /= np.linalg.norm(trial, axis=1)[:, None]
        tv = score(trial)
        best = max(best, float(tv.max()))
        top = trial[np.argsort(tv)[::-1][:8]]
        step *= 0.3
    return best


def hausdorff(A: Body, B: Body, R: float, cfg: MCConfig = MCConfig(), directions: int = 720) -> HausdorffEstimate:
    """Hausdorff distance of ``A ∩ B(0, R)`` and ``B ∩ B(0, R)``.

    The distance to a convex set is convex, so each directed distance is
    attained at an extreme point; the boundary is sampled by rays from an
    interior point along a deterministic direction grid, then refined by
    random perturbation of the best directions.  ``resolution = R * dtheta``.
    """
    R = _check_radius(R)
    Aw, Bw = _window(A, R), _window(B, R)
    d = A.dim
    if d == 3 and directions == 720:
        directions = 2000
    U, dtheta = _direction_grid(d, directions)
    rng = rng_for(cfg.seed, 11)
    oa, ob = Aw.interior_point(), Bw.interior_point()
    val = max(_directed(Aw, Bw, oa, U, rng), _directed(Bw, Aw, ob, U, rng))
    return HausdorffEstimate(val, R * dtheta)
