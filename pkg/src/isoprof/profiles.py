"""Isoperimetric-profile bounds.

Exact profiles of cones, the lower bounds obtained from a reciprocal growth
function, candidate-set upper bounds (intrinsic balls, tangent cones, slabs
of cylindrically bounded bodies) and per-volume brackets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._sampling import parallel_map
from .bodies.families import Body, CylBounded, ExEnvelope, FullSpace, RevolutionBody
from .bodies.structure import (asymptotic_cone, asymptotic_cylinders, ex_wedge, is_cone,
                               tangent_cone)
from .errors import (BoundedBodyError, BracketError, DegenerateError, IsoprofError,
                     NoClosedFormError, NotAConeError, NotBoundaryError, RangeError)
from .growth import (CenterConfig, GrowthSampler, GrowthTable, ReciprocalFn, _extent, b_table,
                     boundary_cloud)
from .measure import MCConfig, SolidAngle, make_probe, solid_angle, sphere_area, unit_ball_volume

RIGIDITY_TOL = 1e-2


def _alpha_value(alpha):
    return float(alpha.value) if isinstance(alpha, SolidAngle) else float(alpha)


def cone_profile(alpha, dim: int, v):
    """``I_K(v) = alpha^(1/d) d^(n/d) v^(n/d)`` for a cone of solid angle ``alpha`` in ``R^d``."""
    a = _alpha_value(alpha)
    d = int(dim)
    full = sphere_area(d)
    if not (0.0 < a <= full * (1 + 1e-12)):
        raise ValueError(f"solid angle {a} outside (0, {full}]")
    v = np.asarray(v, dtype=float)
    if np.any(v <= 0):
        raise ValueError("volume must be positive")
    n = d - 1
    return a ** (1.0 / d) * d ** (n / d) * v ** (n / d)


def half_space_profile(dim: int, v):
    return cone_profile(0.5 * sphere_area(dim), dim, v)


# ---------------------------------------------------------------------------
# Lower bounds
# ---------------------------------------------------------------------------

LOWER_DOUBLE = "phi(2v)"
LOWER_SINGLE = "phi(v)/3"


def lower_bound(rec: ReciprocalFn, dim: int, v):
    """``max(8^-d v / phi(2v), 3^-1 8^-d v / phi(v))`` and the tag of the winning branch.

    Returns ``(values, tags)``; scalars in, scalars out.
    """
    scalar = np.ndim(v) == 0
    vv = np.atleast_1d(np.asarray(v, dtype=float))
    c = 8.0 ** (-int(dim))
    a = c * vv / rec(2.0 * vv)
    b = c * vv / (3.0 * rec(vv))
    val = np.maximum(a, b)
    tags = np.where(a >= b, LOWER_DOUBLE, LOWER_SINGLE)
    if scalar:
        return float(val[0]), str(tags[0])
    return val, list(tags)


# ---------------------------------------------------------------------------
# Upper bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    kind: str          # "ball", "cone", "wedge" or "slab"
    center: tuple
    param: float       # ball radius, solid angle, or slab height


@dataclass(frozen=True)
class UpperConfig:
    """Candidate set for the upper bound (64 boundary points by default)."""

    count: int = 64
    extent: float | None = None
    structural: bool = True
    tangent_cones: bool = True
    cylinders: bool = True
    seed: int = 0x5EED


@dataclass
class UpperBound:
    volumes: np.ndarray
    values: np.ndarray
    sigma: np.ndarray
    witnesses: list


def _conservative(est_value, sigma):
    return est_value + 3.0 * sigma


def _ball_candidates(body, probe, volumes, center):
    """Perimeters of intrinsic balls of the given volumes about ``center``."""
    d = body.dim
    n = d - 1
    out = []
    vmax = probe.max_volume()
    for v in volumes:
        if v >= vmax:
            out.append(None)
            continue
        try:
            r = probe.radius_for_volume(v)
        except RangeError:
            out.append(None)
            continue
        P = probe.perimeter(r)
        V = probe.volume(r)
        rel = V.std_error / V.value if V.value > 0 else 0.0
        sig = math.hypot(P.std_error, (n / d) * P.value * rel)
        out.append((_conservative(P.value, sig), sig, Witness("ball", tuple(map(float, center)), float(r))))
    return out


def _cone_candidates(cone, dim, volumes, cfg, kind, center):
    try:
        alpha = solid_angle(cone, cfg)
    except NotAConeError:
        return [None] * len(volumes)
    a = min(alpha.value + 3.0 * alpha.std_error, sphere_area(dim))
    vals = cone_profile(a, dim, volumes)
    sig = np.abs(cone_profile(a, dim, volumes) - cone_profile(max(alpha.value, 1e-300), dim, volumes)) / 3.0
    return [(float(vals[i]), float(sig[i]), Witness(kind, tuple(map(float, center)), float(alpha.value)))
            for i in range(len(volumes))]


def _tangent_cone_points(body, ucfg, extent):
    pts = list(body.structural_points()) if ucfg.structural else []
    pts += list(boundary_cloud(body, min(ucfg.count, 16), extent, ucfg.seed + 3))
    return pts


def _slab_candidates(body: CylBounded, volumes, grid=None):
    """Slabs ``{x in C : t <= tau}`` of a cylindrically bounded body.

    ``tau`` solves ``int_K (tau - f)_+ = v`` by bisection on a midpoint grid
    over K; the relative perimeter is the area of ``{z in K : f(z) < tau}``,
    which equals ``H^n(K)`` once ``tau`` exceeds ``max_K f``.
    """
    K = body.section
    n = K.dim
    lam = body.factor
    if grid is None:
        grid = {1: 200000, 2: 1000, 3: 100}.get(n, 20)
    V = K.face_points()
    lo, hi = V.min(axis=0), V.max(axis=0)
    axes = [lo[i] + (hi[i] - lo[i]) * (np.arange(grid) + 0.5) / grid for i in range(n)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    cell = float(np.prod((hi - lo) / grid))
    inside = K.contains(mesh)
    fz = body.height.f(np.linalg.norm(mesh[inside], axis=1))
    fmax = float(fz.max())
    area_K = K.volume()
    int_f = float(fz.sum() * cell)
    out = []
    for v in volumes:
        vl = v / lam ** (n + 1)

        def sub_volume(tau):
            if tau >= fmax:
                return area_K * tau - int_f
            return float(np.clip(tau - fz, 0.0, None).sum() * cell)

        a, b = 0.0, max(1.0, fmax)
        while sub_volume(b) < vl:
            b *= 2.0
        for _ in range(200):
            m = 0.5 * (a + b)
            if sub_volume(m) >= vl:
                b = m
            else:
                a = m
            if b - a <= 1e-13 * max(1.0, b):
                break
        tau = b
        area = area_K if tau >= fmax else float(np.count_nonzero(fz < tau) * cell)
        # grid error in the partial area: one boundary layer of cells
        err = 0.0 if tau >= fmax else float(np.count_nonzero(np.abs(fz - tau) < 2 * np.sqrt(n) * (hi - lo).max() / grid * (1 + fmax)) * cell)
        perim = lam ** n * area
        sig = lam ** n * err / 3.0
        t_global = float(body.shift[-1] + lam * tau)
        out.append((perim + 3.0 * sig, sig, Witness("slab", tuple(map(float, np.append(body.shift[:-1], t_global))), t_global)))
    return out


def upper_bound(body: Body, volumes, ucfg: UpperConfig = UpperConfig(), cfg: MCConfig = MCConfig()) -> UpperBound:
    """Minimum over candidate regions of a conservative (+3 sigma) perimeter estimate."""
    vols = np.atleast_1d(np.asarray(volumes, dtype=float))
    if np.any(vols <= 0):
        raise ValueError("volumes must be positive")
    d = body.dim
    extent = ucfg.extent if ucfg.extent is not None else max(4.0, 2.0 * (float(vols.max()) / unit_ball_volume(d)) ** (1.0 / d))
    columns = []

    centers = []
    if ucfg.structural:
        centers += [p for p in body.structural_points() if body.contains(p)]
    centers += list(boundary_cloud(body, ucfg.count, extent, ucfg.seed))

    def ball_column(p):
        return _ball_candidates(body, make_probe(body, p, cfg), vols, p)

    columns += parallel_map(ball_column, centers)

    if ucfg.tangent_cones:
        for p in _tangent_cone_points(body, ucfg, extent):
            try:
                cone = tangent_cone(body, p)
            except (NoClosedFormError, NotBoundaryError):
                continue
            columns.append(_cone_candidates(cone, d, vols, cfg, "cone", p))
    if isinstance(body, ExEnvelope):
        for x in body.grid:
            W = ex_wedge(x)
            if body.factor != 1.0 or np.any(body.shift != 0):
                W = W.scale(body.factor).translate(body.shift)
            columns.append(_cone_candidates(W, d, vols, cfg, "wedge", W.apex))
    if ucfg.cylinders and not getattr(body, "bounded", False):
        try:
            report = asymptotic_cylinders(body)
        except (NoClosedFormError, BoundedBodyError):
            report = None
        if report is not None and not report.degenerate:
            for cyl in report.cylinders:
                if isinstance(cyl, FullSpace):
                    continue
                for p in cyl.structural_points():
                    try:
                        cone = tangent_cone(cyl, p)
                    except (NoClosedFormError, NotBoundaryError):
                        continue
                    columns.append(_cone_candidates(cone, d, vols, cfg, "cone", p))
    if isinstance(body, CylBounded):
        columns.append(_slab_candidates(body, vols))

    values = np.full(vols.size, np.inf)
    sigma = np.zeros(vols.size)
    witnesses = [None] * vols.size
    for col in columns:
        for i, cand in enumerate(col):
            if cand is not None and cand[0] < values[i]:
                values[i], sigma[i], witnesses[i] = cand
    if not np.all(np.isfinite(values)):
        raise RangeError("no upper-bound candidate reached the requested volume")
    return UpperBound(vols, values, sigma, witnesses)


def upper_bound_at(body: Body, point, volumes, cfg: MCConfig = MCConfig(), cone: Body | None = None) -> UpperBound:
    """Upper bound from regions anchored at one boundary point.

    Candidates are the intrinsic balls about ``point`` and, when available,
    the tangent cone there (``cone`` overrides it, e.g. an envelope wedge).
    """
    vols = np.atleast_1d(np.asarray(volumes, dtype=float))
    p = np.asarray(point, dtype=float)
    d = body.dim
    columns = [_ball_candidates(body, make_probe(body, p, cfg), vols, p)]
    if cone is None:
        try:
            cone = tangent_cone(body, p)
        except (NoClosedFormError, NotBoundaryError):
            cone = None
    if cone is not None:
        columns.append(_cone_candidates(cone, d, vols, cfg, "cone", p))
    values = np.full(vols.size, np.inf)
    sigma = np.zeros(vols.size)
    witnesses = [None] * vols.size
    for col in columns:
        for i, cand in enumerate(col):
            if cand is not None and cand[0] < values[i]:
                values[i], sigma[i], witnesses[i] = cand
    return UpperBound(vols, values, sigma, witnesses)


# ---------------------------------------------------------------------------
# Minimal tangent-cone profile
# ---------------------------------------------------------------------------

@dataclass
class IcminResult:
    values: np.ndarray
    alpha: SolidAngle
    point: tuple
    source: str


def icmin_profile(body: Body, v, cfg: MCConfig = MCConfig(), samples: int = 16, seed: int = 0x5EED) -> IcminResult:
    """``cone_profile(alpha_min, v)``, the minimum over tangent cones of C and its asymptotic cylinders."""
    d = body.dim
    sources = [(body, "body")]
    if not getattr(body, "bounded", False):
        report = asymptotic_cylinders(body)
        if report.degenerate:
            raise DegenerateError("an asymptotic cylinder has empty interior; I_C vanishes", report)
        sources += [(c, "cylinder") for c in report.cylinders]
    best = None
    for src, label in sources:
        if isinstance(src, FullSpace):
            alpha = SolidAngle(sphere_area(d), 0.0, d, True)
            cand = [(alpha, tuple(np.zeros(d)))]
        else:
            pts = list(src.structural_points()) + list(boundary_cloud(src, samples, 4.0, seed))
            cand = []
            for p in pts:
                try:
                    cone = tangent_cone(src, p)
                except (NoClosedFormError, NotBoundaryError):
                    continue
                cand.append((solid_angle(cone, cfg), tuple(map(float, p))))
        for alpha, p in cand:
            if best is None or alpha.value < best[0].value:
                best = (alpha, p, label)
    if best is None:
        raise NoClosedFormError(f"no closed-form tangent cone found for {body.family}")
    alpha, p, label = best
    return IcminResult(np.asarray(cone_profile(alpha, d, v)), alpha, p, label)


# ---------------------------------------------------------------------------
# Brackets
# ---------------------------------------------------------------------------

@dataclass
class ProfileBracket:
    volumes: np.ndarray
    lower: np.ndarray
    lower_source: list
    upper: np.ndarray
    upper_sigma: np.ndarray
    witnesses: list
    dim: int
    table: GrowthTable | None = None
    rigidity: list = field(default_factory=list)
    asymptotic_alpha: SolidAngle | None = None


def growth_for_volumes(body: Body, volumes, cfg: MCConfig = MCConfig(),
                       centers: CenterConfig = CenterConfig(), points: int = 40) -> GrowthTable:
    """A b-table whose range covers ``2 max(volumes)``, widening the radius grid as needed."""
    d = body.dim
    vols = np.atleast_1d(np.asarray(volumes, dtype=float))
    w = unit_ball_volume(d)
    r_lo = 0.25 * (float(vols.min()) / w) ** (1.0 / d)
    r_hi = 4.0 * (2.0 ** (d + 1) * float(vols.max()) / w) ** (1.0 / d)
    if isinstance(body, RevolutionBody) and body.fast_path_ok:
        def build(radii):
            return b_table(body, radii, centers, cfg, cross_check=0)
    else:
        sampler = GrowthSampler(body, centers, cfg, _extent(centers, [r_hi]))
        build = sampler.table
    for _ in range(12):
        table = build(np.geomspace(r_lo, r_hi, points))
        if table.b[-1] >= 2.0 * vols.max():
            return table
        r_hi *= 4.0
    raise RangeError("growth table could not reach the requested volumes")


def profile_bracket(body: Body, volumes, cfg: MCConfig = MCConfig(), table: GrowthTable | None = None,
                    ucfg: UpperConfig = UpperConfig(), centers: CenterConfig = CenterConfig()) -> ProfileBracket:
    """Lower and upper bounds on ``I_C(v)`` at each volume, with witnesses and diagnostics."""
    vols = np.atleast_1d(np.asarray(volumes, dtype=float))
    d = body.dim
    if table is None:
        table = growth_for_volumes(body, vols, cfg, centers)
    rec = ReciprocalFn.from_table(table, extrapolation=1.0)
    lower, tags = lower_bound(rec, d, vols)
    up = upper_bound(body, vols, ucfg, cfg)
    bad = lower > up.values + 3.0 * up.sigma + 1e-9
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise BracketError(f"lower bound {lower[i]} exceeds upper bound {up.values[i]} at v={vols[i]}")
    bracket = ProfileBracket(vols, np.asarray(lower), tags, up.values, up.sigma, up.witnesses, d, table)
    try:
        cone = asymptotic_cone(body)
    except (IsoprofError, NotImplementedError):
        cone = None
    if cone is not None and not cone.degenerate and is_cone(cone):
        alpha = solid_angle(cone, cfg)
        bracket.asymptotic_alpha = alpha
        ref = cone_profile(alpha, d, vols)
        bracket.rigidity = [
            "rigidity candidate: body may be isometric to its asymptotic cone"
            if abs(u - c) / c < RIGIDITY_TOL else ""
            for u, c in zip(up.values, ref)
        ]
    return bracket
