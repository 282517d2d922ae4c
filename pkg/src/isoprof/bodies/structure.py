"""Closed-form structural operations: tangent cones, asymptotic cones and cylinders."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from ..errors import (BoundedBodyError, DimensionError, NoClosedFormError,
                      NotBoundaryError)
from .families import (ATOL, Ball, BallCut, Body, CylBounded, ExEnvelope, Flat, FullSpace,
                       HalfSpace, Intersection, PolyCone, Polytope, Product, Ray,
                       RevolutionBody, Slab, _HRep, _Placed, _RevolutionLocal,
                       envelope_planes)
from .profile import linear

BOUNDARY_TOL = 1e-9
PROBE_RADIUS = 1e-6
FACET_SLACK = 1e-9


def is_cone(body: Body) -> bool:
    return isinstance(body, (PolyCone, HalfSpace, FullSpace))


def cone_apex(body: Body) -> np.ndarray:
    if isinstance(body, PolyCone):
        return np.array(body.apex)
    if isinstance(body, HalfSpace):
        return body.normal * body.offset
    if isinstance(body, FullSpace):
        return np.zeros(body.dim)
    raise NoClosedFormError(f"{body.family} is not a cone")


def _probe_dirs(dim, count=64, seed=12345):
    g = np.random.default_rng(seed).standard_normal((count, dim))
    g /= np.linalg.norm(g, axis=1)[:, None]
    return np.vstack([np.eye(dim), -np.eye(dim), g])


def is_boundary(body: Body, p, tol=BOUNDARY_TOL, probe=PROBE_RADIUS) -> bool:
    """``p`` is within ``tol`` of C and some point of ``B(p, probe)`` leaves C."""
    p = np.asarray(p, dtype=float)
    if p.shape != (body.dim,):
        raise DimensionError(f"point must have dimension {body.dim}")
    if body.distance(p) > tol:
        return False
    q = body.project(p)
    return not bool(np.all(body.contains(q + probe * _probe_dirs(body.dim))))


def _as_cone(p, normals):
    N = np.array(normals, dtype=float)
    N = np.unique(np.round(N, 13), axis=0)
    if len(N) == 1:
        return HalfSpace(N[0], float(N[0] @ p))
    return PolyCone(p, N)


def _tangent_normals(body, p):
    """Inward normals of the tangent cone of ``body`` at boundary point ``p``."""
    if isinstance(body, ExEnvelope):
        raise NoClosedFormError("ExEnvelope tangent cones have no closed form; see ex_wedge for outer cones")
    if isinstance(body, _HRep):
        s = body.slack(p[None])[0]
        active = s <= FACET_SLACK * (1.0 + np.abs(body.b))
        return list(body.A[active])
    if isinstance(body, Ball):
        d = body.center - p
        return [d / np.linalg.norm(d)]
    if isinstance(body, _Placed):
        return _tangent_normals(body._local, body.to_local(p[None])[0])
    if isinstance(body, _RevolutionLocal):
        z, t = p[:-1], p[-1]
        rho = np.linalg.norm(z)
        prof = body.profile
        if rho < 1e-12:
            if prof.slope_at_zero == 0.0:
                e = np.zeros(body.dim)
                e[-1] = 1.0
                return [e]
            raise NoClosedFormError("tangent cone at a conical apex is a round cone (not polyhedral)")
        d = float(prof.df(np.array(rho)))
        n = np.append(-d * z / rho, 1.0)
        return [n / np.linalg.norm(n)]
    if isinstance(body, Product):
        inner = _tangent_normals(body.section, p[: body.k])
        return [np.concatenate([n, np.zeros(body.free_dims)]) for n in inner]
    if isinstance(body, (Intersection, BallCut)):
        parts = body.parts if isinstance(body, Intersection) else (body.body, body.ball)
        normals = []
        for part in parts:
            if part.distance(p) <= BOUNDARY_TOL and is_boundary(part, p):
                normals += _tangent_normals(part, p)
        return normals
    raise NoClosedFormError(f"no closed-form tangent cone for family {body.family}")


def tangent_cone(body: Body, p) -> Body:
    """Smallest cone with vertex ``p`` containing C, as a HalfSpace or PolyCone."""
    p = np.asarray(p, dtype=float)
    if not is_boundary(body, p):
        raise NotBoundaryError(f"point {p.tolist()} is not on the boundary of {body.family}")
    if isinstance(body, ExEnvelope):
        raise NoClosedFormError("ExEnvelope tangent cones have no closed form; see ex_wedge for outer cones")
    normals = _tangent_normals(body, p)
    if not normals:
        raise NoClosedFormError(f"could not identify active constraints for {body.family}")
    return _as_cone(p, normals)


def ex_wedge(x) -> PolyCone:
    """The wedge ``W_x``: intersection of the two supporting half-spaces at ``p_x``."""
    p, _, _, _, (n1, _), (n2, _) = envelope_planes(x)
    return PolyCone(p, np.vstack([n1, n2]))


def _flag_degenerate(cone):
    c, r = PolyCone(np.zeros(cone.dim), cone.normals).chebyshev(box=1.0)
    if r < 1e-9:
        cone.degenerate = True
    return cone


def asymptotic_cone(body: Body) -> Body:
    """``C_inf``, the intersection of ``lambda C`` over ``lambda > 0`` (apex at the origin)."""
    if getattr(body, "bounded", False):
        raise BoundedBodyError(f"{body.family} is bounded; its asymptotic cone is a point")
    d = body.dim
    e_t = np.zeros(d)
    e_t[-1] = 1.0
    if isinstance(body, FullSpace):
        return body
    if isinstance(body, HalfSpace):
        return HalfSpace(body.normal, 0.0)
    if isinstance(body, Slab):
        return Flat(np.zeros(d), body.normal[None, :])
    if isinstance(body, (PolyCone, Polytope)):
        return _flag_degenerate(PolyCone(np.zeros(d), body.A))
    if isinstance(body, Product):
        return Flat(np.zeros(d), np.eye(d)[: body.k])
    if isinstance(body, (CylBounded, ExEnvelope)):
        return Ray(np.zeros(d), e_t)
    if isinstance(body, RevolutionBody):
        if body.profile.superlinear:
            return Ray(np.zeros(d), e_t)
        k = body.profile.asymptotic_slope
        if not np.isfinite(k):
            raise NoClosedFormError("profile has no recorded asymptotic slope")
        if k == 0.0:
            return HalfSpace(e_t, 0.0)
        return RevolutionBody(linear(k), d)
    raise NoClosedFormError(f"no closed-form asymptotic cone for family {body.family}")


@dataclass
class CylinderReport:
    """Closed-form representatives of the asymptotic cylinders of a body."""

    cylinders: list = field(default_factory=list)
    degenerate: bool = False
    note: str = ""


def _facet_is_essential(N, i):
    """Facet ``i`` of the cone ``{N x >= 0}`` has a relative-interior point."""
    d = N.shape[1]
    others = np.delete(N, i, axis=0)
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-others, np.ones((len(others), 1))]) if len(others) else None
    b_ub = np.zeros(len(others)) if len(others) else None
    A_eq = np.append(N[i], 0.0)[None, :]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[0.0],
                  bounds=[(-1, 1)] * d + [(0, 1)], method="highs")
    return res.status == 0 and -res.fun > 1e-9


def asymptotic_cylinders(body: Body) -> CylinderReport:
    if getattr(body, "bounded", False):
        raise BoundedBodyError(f"{body.family} is bounded; it has no asymptotic cylinders")
    d = body.dim
    if isinstance(body, ExEnvelope):
        return CylinderReport([], True, "an asymptotic cylinder has empty interior (a half-line limit)")
    if isinstance(body, CylBounded):
        K = body.section.scale(body.factor).translate(body.shift[:-1])
        return CylinderReport([Product(K, 1)], False, "horizontal translate of K x R")
    if isinstance(body, (Product, HalfSpace, Slab, FullSpace)):
        return CylinderReport([body], False, "translation-invariant along its recession directions")
    if isinstance(body, PolyCone):
        N = np.asarray(body.normals)
        cyl = [HalfSpace(N[i], 0.0) for i in range(len(N)) if _facet_is_essential(N, i)]
        return CylinderReport(cyl + [FullSpace(d)], False, "facet half-spaces and the full space")
    if isinstance(body, RevolutionBody):
        prof = body.profile
        if prof.superlinear:
            n = np.zeros(d)
            n[0] = -1.0
        else:
            k = prof.asymptotic_slope
            n = np.zeros(d)
            n[0], n[-1] = -k, 1.0
        return CylinderReport([HalfSpace(n, 0.0), FullSpace(d)], False,
                              "limits along the boundary are half-spaces; along the axis the full space")
    raise NoClosedFormError(f"no closed-form asymptotic cylinders for family {body.family}")


def cylinder_points(cyl: Body, count=0) -> np.ndarray:
    """Representative boundary points of an asymptotic cylinder (structural points)."""
    if isinstance(cyl, FullSpace):
        return np.zeros((1, cyl.dim))
    return cyl.structural_points()
