"""Property checks: each quantitative inequality as a runnable test with violation counts.

An inequality ``A <= B`` between estimates is violated iff
``A - B > 3 sqrt(sigma_A^2 + sigma_B^2) + 1e-9``; the reported margin is the
left side minus the right side of that rule, so margins <= 0 pass.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from ._sampling import parallel_map, rng_for
from .bodies import profile as prof
from .bodies.families import (Ball, Body, CylBounded, ExEnvelope, HalfSpace, PolyCone,
                              Polytope, PowerBody, Product, Slab)
from .bodies.structure import ex_wedge
from .errors import DegenerateError
from .growth import CenterConfig, boundary_cloud
from .measure import MCConfig, ball_volume, hausdorff, inradius, solid_angle
from .profiles import (UpperConfig, cone_profile, half_space_profile, icmin_profile,
                       profile_bracket, upper_bound_at)

ABS_TOL = 1e-9
SIGMAS = 3.0


@dataclass
class CheckReport:
    name: str
    body: str
    trials: int
    violations: int
    worst_margin: float
    tolerance: str
    seed: int
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violations == 0


def margin(a, b, sigma_a=0.0, sigma_b=0.0):
    """Signed excess of ``a <= b`` over the 3-sigma rule; positive means violated."""
    return a - b - SIGMAS * math.hypot(sigma_a, sigma_b) - ABS_TOL


def _report(name, body, margins, seed, tolerance="3 sigma + 1e-9", notes=None):
    m = np.asarray(margins, dtype=float)
    worst = float(m.max()) if m.size else -np.inf
    return CheckReport(name, body, int(m.size), int(np.count_nonzero(m > 0)), worst, tolerance, seed,
                       list(notes or []))


def _label(body):
    return body.family if isinstance(body, Body) else str(body)


def sample_points(body: Body, n: int, seed: int, extent: float = 2.0) -> np.ndarray:
    """Points of C: boundary points and interior points from a box about an interior point, in equal shares."""
    rng = rng_for(seed, 41)
    x0 = body.interior_point()
    half = n // 2
    bnd = boundary_cloud(body, half, extent, seed)
    box = x0 + extent * (2.0 * rng.random((n - half, body.dim)) - 1.0)
    box = body.project(box)
    t = rng.random(n - half)[:, None]
    inner = x0 + t * (box - x0)
    return np.vstack([bnd, inner])


def _trial_cfg(cfg, seed, k):
    return MCConfig(cfg.samples, int(np.random.SeedSequence([seed, 7, k]).generate_state(1)[0]), cfg.shortcuts)


# ---------------------------------------------------------------------------
# Volume inequalities
# ---------------------------------------------------------------------------

def check_doubling(body: Body, trials: int = 100, cfg: MCConfig = MCConfig(), seed: int = 7) -> CheckReport:
    """``|B_C(x, lr)| <= l^d |B_C(x, r)|`` for random ``x in C``, ``r`` and ``l > 1``."""
    rng = rng_for(seed, 1)
    pts = sample_points(body, trials, seed)
    radii = np.exp(rng.uniform(np.log(0.1), np.log(2.0), trials))
    lams = rng.uniform(1.0, 3.0, trials)
    d = body.dim

    def one(k):
        c = _trial_cfg(cfg, seed, k)
        big = ball_volume(body, pts[k], lams[k] * radii[k], c)
        small = ball_volume(body, pts[k], radii[k], c)
        f = lams[k] ** d
        return margin(big.value, f * small.value, big.std_error, f * small.std_error)

    return _report("doubling", _label(body), parallel_map(one, range(trials)), seed)


def check_bm_concavity(body: Body, trials: int = 100, cfg: MCConfig = MCConfig(), seed: int = 7) -> CheckReport:
    """Midpoint concavity of ``F(x, r) = |B_C(x, r)|^(1/d)`` on ``C x (0, inf)``."""
    rng = rng_for(seed, 2)
    P = sample_points(body, 2 * trials, seed)
    idx = rng.permutation(2 * trials)
    X, Y = P[idx[:trials]], P[idx[trials:]]
    R = rng.uniform(0.2, 2.0, (trials, 2))
    d = body.dim

    def F(x, r, c):
        est = ball_volume(body, x, r, c)
        v = max(est.value, 0.0)
        if v == 0.0:
            return 0.0, est.std_error ** (1.0 / d)
        return v ** (1.0 / d), est.std_error * v ** (1.0 / d - 1.0) / d

    def one(k):
        fx, sx = F(X[k], R[k, 0], _trial_cfg(cfg, seed, 3 * k))
        fy, sy = F(Y[k], R[k, 1], _trial_cfg(cfg, seed, 3 * k + 1))
        fm, sm = F(0.5 * (X[k] + Y[k]), R[k].mean(), _trial_cfg(cfg, seed, 3 * k + 2))
        return margin(0.5 * (fx + fy), fm, 0.5 * math.hypot(sx, sy), sm)

    return _report("bm_concavity", _label(body), parallel_map(one, range(trials)), seed)


# ---------------------------------------------------------------------------
# Hausdorff distance and inradius
# ---------------------------------------------------------------------------

def random_polytope(rng, dim: int = 2, points: int = 8, spread: float = 2.0, core: float = 0.3) -> Polytope:
    """Convex hull of random points together with a small cross about the origin."""
    P = spread * (2.0 * rng.random((points, dim)) - 1.0)
    P = np.vstack([P, core * np.eye(dim), -core * np.eye(dim)])
    hull = ConvexHull(P)
    eq = np.unique(np.round(hull.equations, 12), axis=0)
    return Polytope(-eq[:, :-1], eq[:, -1])


def polytope_hausdorff(A: Polytope, B: Polytope) -> float:
    """Exact Hausdorff distance of bounded polytopes: distance to a convex set peaks at a vertex."""
    return float(max(B.distance(A.face_points()).max(), A.distance(B.face_points()).max()))


def check_hausdorff_lemmas(trials: int = 100, cfg: MCConfig = MCConfig(), seed: int = 7, dim: int = 2) -> CheckReport:
    """Window restriction does not increase the distance; shifting by ``v`` moves the window trace by ``<= 2|v|``."""
    rng = rng_for(seed, 3)
    cases = []
    for _ in range(trials):
        F, G = random_polytope(rng, dim), random_polytope(rng, dim)
        r = float(rng.uniform(0.3, 2.5))
        v = rng.standard_normal(dim)
        v *= rng.uniform(0.0, 0.5) * r / np.linalg.norm(v)
        cases.append((F, G, r, v))

    def one(case):
        F, G, r, v = case
        windowed = hausdorff(F, G, r, cfg).value
        shifted = hausdorff(F, F.translate(v), r, cfg).value
        same = hausdorff(F, F, r, cfg).value
        return [margin(windowed, polytope_hausdorff(F, G)),
                margin(shifted, 2.0 * float(np.linalg.norm(v))),
                margin(same, 0.0)]

    margins = [m for ms in parallel_map(one, cases) for m in ms]
    return _report("hausdorff_lemmas", f"random polytopes R^{dim}", margins, seed,
                   tolerance="1e-9 (window distance is a sampled lower estimate)")


def check_inradius_lipschitz(trials: int = 100, seed: int = 7, cfg: MCConfig = MCConfig()) -> CheckReport:
    """``|inr(A) - inr(B)| <= delta(A, B)`` on random polygons, nested balls and a perturbed cube."""
    rng = rng_for(seed, 4)
    margins = []
    for _ in range(trials):
        A, B = random_polytope(rng), random_polytope(rng)
        gap = abs(inradius(A, cfg).value - inradius(B, cfg).value)
        margins.append(margin(gap, polytope_hausdorff(A, B)))
    # concentric balls: equality case
    margins.append(margin(abs(inradius(Ball(np.zeros(3), 1.0)).value - inradius(Ball(np.zeros(3), 2.0)).value), 1.0))
    cube = Polytope.box(-np.ones(3), np.ones(3))
    bumped = Polytope(cube.A, cube.b + 0.2 * rng.uniform(-1.0, 1.0, cube.b.size))
    margins.append(margin(abs(inradius(cube).value - inradius(bumped).value), polytope_hausdorff(cube, bumped)))
    return _report("inradius_lipschitz", "random polytopes", margins, seed)


# ---------------------------------------------------------------------------
# Profile inequality chain
# ---------------------------------------------------------------------------

CHAIN_VOLUMES = (0.1, 1.0, 10.0)


def check_profile_chain(body: Body, volumes=CHAIN_VOLUMES, cfg: MCConfig = MCConfig(),
                        ucfg: UpperConfig = UpperConfig(count=16), centers: CenterConfig = CenterConfig(count=16),
                        seed: int = 7) -> CheckReport:
    """``lower <= I_Cmin``, ``lower <= I_H``, ``I_Cinf <= upper`` and ``lower <= upper`` at each volume."""
    vols = np.asarray(volumes, dtype=float)
    d = body.dim
    br = profile_bracket(body, vols, cfg, ucfg=ucfg, centers=centers)
    notes = []
    margins = [margin(lo, up, 0.0, s) for lo, up, s in zip(br.lower, br.upper, br.upper_sigma)]
    margins += [margin(lo, ih) for lo, ih in zip(br.lower, half_space_profile(d, vols))]
    try:
        ic = icmin_profile(body, vols, cfg)
        rel = ic.alpha.std_error / (d * ic.alpha.value)
        margins += [margin(lo, v, 0.0, v * rel) for lo, v in zip(br.lower, ic.values)]
    except DegenerateError:
        notes.append("degenerate asymptotic cylinder: I_Cmin clause skipped")
    if br.asymptotic_alpha is not None:
        a = br.asymptotic_alpha
        ref = cone_profile(a, d, vols)
        rel = a.std_error / (d * a.value)
        margins += [margin(c, up, c * rel, s) for c, up, s in zip(ref, br.upper, br.upper_sigma)]
        if any(br.rigidity):
            notes.append("rigidity diagnostic: upper bound matches the asymptotic cone profile")
    else:
        notes.append("degenerate or missing asymptotic cone: I_Cinf clause skipped")
    return _report("profile_chain", _label(body), margins, seed, notes=notes)


# ---------------------------------------------------------------------------
# Degeneracy of the parabola envelope
# ---------------------------------------------------------------------------

DEGENERACY_X = (3.0, 10.0, 30.0, 100.0)


@dataclass
class DegeneracyReport:
    xs: tuple
    alpha: list
    alpha_sigma: list
    upper: list
    check: CheckReport


def check_ex_degeneracy(xs=DEGENERACY_X, v: float = 1.0, cfg: MCConfig | None = None, seed: int = 7) -> DegeneracyReport:
    """Wedge solid angles and the upper bound at ``v`` both decrease along ``x``.

    Solid angles are sampled (shortcuts off) and must be 3-sigma separated.
    """
    cfg = cfg or MCConfig(seed=seed, shortcuts=False)
    body = ExEnvelope(extra_x=tuple(xs))
    alphas, upper = [], []
    for x in xs:
        W = ex_wedge(x)
        alphas.append(solid_angle(W, cfg))
        upper.append(upper_bound_at(body, W.apex, [v], cfg, cone=W))
    margins = []
    for i in range(len(xs) - 1):
        a, b = alphas[i + 1], alphas[i]
        margins.append(margin(a.value, b.value, a.std_error, b.std_error) + 2 * ABS_TOL)
        margins.append(float(upper[i + 1].values[0] - upper[i].values[0]))
    rep = _report("ex_degeneracy", body.family, margins, seed, tolerance="strict decrease, 3 sigma apart")
    return DegeneracyReport(tuple(xs), [a.value for a in alphas], [a.std_error for a in alphas],
                            [float(u.values[0]) for u in upper], rep)


# ---------------------------------------------------------------------------
# Standard suite
# ---------------------------------------------------------------------------

def cube_cone() -> PolyCone:
    """``{|x| <= z, |y| <= z}``."""
    N = np.array([[-1, 0, 1], [1, 0, 1], [0, -1, 1], [0, 1, 1]], dtype=float) / math.sqrt(2.0)
    return PolyCone(np.zeros(3), N)


def standard_suite() -> dict:
    square = Polytope.box([-1.0, -1.0], [1.0, 1.0])
    return {
        "halfspace": HalfSpace([0.0, 0.0, 1.0], 0.0),
        "slab": Slab([0.0, 0.0, 1.0], 0.0, 1.0),
        "octant": PolyCone(np.zeros(3), np.eye(3)),
        "cube_cone": cube_cone(),
        "power_1.25": PowerBody(1.25),
        "power_1.5": PowerBody(1.5),
        "power_2": PowerBody(2.0),
        "product_square": Product(square, 1),
        "cylbounded": CylBounded(square, prof.power(2.0)),
        "exenvelope": ExEnvelope(),
    }


# bodies without uniform geometry only take the checks that do not presuppose it
UNIFORM_ONLY = {"profile_chain"}
NON_UNIFORM = {"exenvelope"}

SUITE_CHECKS = ("doubling", "bm_concavity", "hausdorff_lemmas", "inradius_lipschitz", "profile_chain",
                "ex_degeneracy")


def run_suite(names=None, trials: int = 100, seed: int = 7, cfg: MCConfig | None = None) -> list:
    """Run the named checks (all by default) over the standard body suite."""
    names = tuple(names or SUITE_CHECKS)
    unknown = set(names) - set(SUITE_CHECKS)
    if unknown:
        raise ValueError(f"unknown check(s): {sorted(unknown)}")
    cfg = cfg or MCConfig(samples=20_000, seed=seed)
    bodies = standard_suite()
    out = []
    for name in names:
        if name in ("doubling", "bm_concavity", "profile_chain"):
            fn = {"doubling": check_doubling, "bm_concavity": check_bm_concavity}.get(name)
            for label, body in bodies.items():
                if name in UNIFORM_ONLY and label in NON_UNIFORM:
                    continue
                rep = check_profile_chain(body, cfg=cfg, seed=seed) if fn is None else fn(body, trials, cfg, seed)
                rep.body = label
                out.append(rep)
        elif name == "hausdorff_lemmas":
            out.append(check_hausdorff_lemmas(trials, cfg, seed))
        elif name == "inradius_lipschitz":
            out.append(check_inradius_lipschitz(trials, seed, cfg))
        else:
            out.append(check_ex_degeneracy(seed=seed).check)
    return out
