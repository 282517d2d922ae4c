"""Parametric convex bodies with exact membership/distance/projection oracles.

Every body works on batches: ``contains``, ``distance``, ``project`` and
``depth`` accept a single point of shape ``(d,)`` or a stack ``(m, d)``.
``raycast(x0, dirs)`` returns, for unit directions ``dirs``, the exit
parameter ``sup{t >= 0 : x0 + t u in C}`` (``inf`` when the ray stays in C);
it assumes ``x0`` lies in C.

Bodies are immutable after construction; the arrays they hold are marked
read-only.
"""
from __future__ import annotations

import itertools
import json
import math

import numpy as np
from scipy.optimize import linprog, minimize, nnls

from ..errors import DimensionError, ProjectionError, BodySpecError
from . import profile as _profile
from .profile import ConvexProfile

ATOL = 1e-9
T_MAX = 1e12
_ENUM_LIMIT = 4000


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _unit(v, path="/normal"):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n == 0.0:
        raise BodySpecError(path, "normal vector must be non-zero")
    return v / n


def as_points(x, dim):
    """Return ``(P, single)`` with ``P`` of shape ``(m, dim)``."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    P = arr.reshape(1, -1) if single else arr
    if P.ndim != 2 or P.shape[1] != dim:
        raise DimensionError(f"expected points of dimension {dim}, got shape {arr.shape}")
    return P, single


def _unwrap(values, single):
    return values[0] if single else values


def golden_min(fn, lo, hi, iters=60):
    """Vectorised golden-section minimisation of ``fn`` on ``[lo, hi]``."""
    gr = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo.copy(), hi.copy()
    c = b - gr * (b - a)
    d = a + gr * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - gr * (b - a)
        new_d = a + gr * (b - a)
        c, d = np.where(left, new_c, d), np.where(left, c, new_d)
        # one fresh evaluation per lane would need masking; two keeps it simple
        fc, fd = fn(c), fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


class Body:
    """Common interface of every convex body."""

    family = "body"
    degenerate = False
    bounded = False
    dim: int

    # -- oracles ---------------------------------------------------------
    def contains(self, x):
        P, single = as_points(x, self.dim)
        return _unwrap(self._contains(P), single)

    def project(self, x):
        P, single = as_points(x, self.dim)
        out = self._project(P)
        return out[0] if single else out

    def distance(self, x):
        P, single = as_points(x, self.dim)
        return _unwrap(self._distance(P), single)

    def depth(self, x):
        """Distance to the complement for points of C (0 outside)."""
        P, single = as_points(x, self.dim)
        return _unwrap(np.maximum(self._depth(P), 0.0), single)

    def raycast(self, x0, dirs):
        x0 = np.asarray(x0, dtype=float)
        if x0.shape != (self.dim,):
            raise DimensionError(f"ray origin must have dimension {self.dim}")
        U, _ = as_points(dirs, self.dim)
        return np.maximum(self._raycast(x0, U), 0.0)

    # -- defaults --------------------------------------------------------
    def _distance(self, P):
        return np.linalg.norm(P - self._project(P), axis=1)

    def _raycast(self, x0, U):
        return _bisect_raycast(self._contains, x0, U)

    def _depth(self, P):
        raise NotImplementedError(f"{self.family} has no depth oracle")

    def structural_points(self):
        return np.empty((0, self.dim))

    def interior_point(self):
        raise NotImplementedError

    def bounding_box(self):
        """Axis-aligned ``(lo, hi)`` enclosing C; sides are infinite where C is unbounded."""
        box = self.__dict__.get("_bbox")
        if box is None:
            lo, hi = self._bounding_box()
            box = (_frozen(lo), _frozen(hi))
            self.__dict__["_bbox"] = box
        return box

    def _bounding_box(self):
        return np.full(self.dim, -np.inf), np.full(self.dim, np.inf)

    def scale(self, lam):
        lam = _check_factor(lam)
        return self._scaled(lam)

    def translate(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise DimensionError(f"translation must have dimension {self.dim}")
        return self._translated(v)

    def to_json(self) -> dict:
        raise NotImplementedError

    def fingerprint(self) -> str:
        return json.dumps(_canon(self.to_json()), sort_keys=True)

    def __eq__(self, other):
        return isinstance(other, Body) and self.fingerprint() == other.fingerprint()

    def __hash__(self):
        return hash(self.fingerprint())

    def __repr__(self):
        return f"{type(self).__name__}({self.fingerprint()})"


def _canon(obj):
    """JSON-ready copy with ``-0.0`` folded into ``0.0`` and numpy scalars unwrapped."""
    if isinstance(obj, dict):
        return {k: _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) + 0.0
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _check_factor(lam):
    lam = float(lam)
    if not lam > 0.0 or not np.isfinite(lam):
        raise ValueError(f"scale factor must be positive, got {lam}")
    return lam


def _bisect_raycast(contains, x0, U, iters=80):
    m = U.shape[0]
    lo = np.zeros(m)
    hi = np.ones(m)
    active = contains(x0 + hi[:, None] * U)
    for _ in range(45):
        if not active.any():
            break
        hi = np.where(active, hi * 2.0, hi)
        active = active & (hi < T_MAX)
        if active.any():
            idx = np.flatnonzero(active)
            active[idx] = contains(x0 + hi[idx, None] * U[idx])
    unbounded = hi >= T_MAX
    lo = np.where(hi > 1.0, 0.5 * hi, 0.0)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        inside = contains(x0 + mid[:, None] * U)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return np.where(unbounded, np.inf, lo)


# ---------------------------------------------------------------------------
# Half-space representations
# ---------------------------------------------------------------------------

class _HRep(Body):
    """Intersection of half-spaces ``a_i . x >= b_i`` with unit inward normals."""

    def __init__(self, A, b):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.atleast_1d(np.asarray(b, dtype=float))
        if A.shape[0] == 0:
            raise BodySpecError("/facets", "facet list must be non-empty")
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms == 0):
            raise BodySpecError("/facets", "zero normal")
        self.A = _frozen(A / norms[:, None])
        self.b = _frozen(b / norms)
        self.dim = A.shape[1]
        self._subsets = None

    def slack(self, P):
        return P @ self.A.T - self.b

    def _contains(self, P):
        return np.all(self.slack(P) >= -ATOL * (1.0 + np.abs(self.b)), axis=1)

    def _depth(self, P):
        return np.min(self.slack(P), axis=1)

    def _raycast(self, x0, U):
        s0 = self.A @ x0 - self.b
        au = U @ self.A.T
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(au < -1e-15, np.maximum(s0, 0.0) / -au, np.inf)
        return t.min(axis=1)

    # exact projection -------------------------------------------------------
    def _active_sets(self):
        if self._subsets is None:
            m, d = self.A.shape
            total = sum(math.comb(m, k) for k in range(1, min(m, d) + 1))
            subsets = []
            if total <= _ENUM_LIMIT:
                for k in range(1, min(m, d) + 1):
                    for idx in itertools.combinations(range(m), k):
                        As = self.A[list(idx)]
                        G = As @ As.T
                        if np.linalg.matrix_rank(G, tol=1e-10) < k:
                            continue
                        subsets.append((np.array(idx), As, np.linalg.inv(G)))
            else:
                subsets = None
            self._subsets = subsets if subsets is not None else False
        return self._subsets

    def _project(self, P):
        out = P.copy()
        todo = ~self._contains(P)
        if not todo.any():
            return out
        Y = P[todo]
        subsets = self._active_sets()
        if subsets is False:
            out[todo] = np.array([self._ldp_project(y) for y in Y])
            return out
        best = np.full(Y.shape[0], np.inf)
        res = np.empty_like(Y)
        scale = 1.0 + np.abs(self.b).max()
        for idx, As, Ginv in subsets:
            mu = (self.b[idx][None, :] - Y @ As.T) @ Ginv.T
            ok = np.all(mu >= -1e-12 * scale, axis=1)
            if not ok.any():
                continue
            X = Y[ok] + mu[ok] @ As
            feas = np.all(X @ self.A.T - self.b >= -1e-9 * scale, axis=1)
            if not feas.any():
                continue
            rows = np.flatnonzero(ok)[feas]
            dist = np.linalg.norm(X[feas] - Y[rows], axis=1)
            better = dist < best[rows]
            best[rows[better]] = dist[better]
            res[rows[better]] = X[feas][better]
        missing = ~np.isfinite(best)
        if missing.any():
            res[missing] = np.array([self._ldp_project(y) for y in Y[missing]])
        out[todo] = res
        return out

    def _ldp_project(self, y):
        """Least-distance programming via NNLS (Lawson-Hanson)."""
        h = self.b - self.A @ y
        E = np.vstack([self.A.T, h[None, :]])
        f = np.zeros(self.dim + 1)
        f[-1] = 1.0
        u, _ = nnls(E, f, maxiter=50 * E.shape[1])
        r = E @ u - f
        if abs(r[-1]) < 1e-14:
            raise ProjectionError("polyhedral projection failed (infeasible or non-convergent)")
        return y - r[:-1] / r[-1]

    # geometry helpers ------------------------------------------------------
    def _bounding_box(self):
        lo, hi = np.full(self.dim, -np.inf), np.full(self.dim, np.inf)
        for i in range(self.dim):
            for sign in (1.0, -1.0):
                c = np.zeros(self.dim)
                c[i] = sign
                res = linprog(c, A_ub=-self.A, b_ub=-self.b, bounds=[(None, None)] * self.dim, method="highs")
                if res.status == 0:
                    if sign > 0:
                        lo[i] = res.fun
                    else:
                        hi[i] = -res.fun
        return lo, hi

    def recession_is_trivial(self) -> bool:
        """True when ``{A d >= 0}`` is ``{0}``, i.e. the H-polyhedron is bounded."""
        d = self.dim
        for i in range(d):
            for sgn in (1.0, -1.0):
                c = np.zeros(d)
                c[i] = -sgn
                res = linprog(c, A_ub=-self.A, b_ub=np.zeros(len(self.A)), bounds=[(-1, 1)] * d,
                              method="highs")
                if res.status == 0 and -res.fun > 1e-9:
                    return False
        return True

    def chebyshev(self, box=1e6):
        """Chebyshev centre and radius by LP; radius capped at ``box``."""
        m, d = self.A.shape
        c = np.zeros(d + 1)
        c[-1] = -1.0
        A_ub = np.hstack([-self.A, np.ones((m, 1))])
        bounds = [(-box, box)] * d + [(0, box)]
        res = linprog(c, A_ub=A_ub, b_ub=-self.b, bounds=bounds, method="highs")
        if res.status != 0:
            raise ProjectionError(f"Chebyshev LP failed: {res.message}")
        return res.x[:d], float(res.x[-1])

    def face_points(self):
        """One point on each minimal face (vertices when the polyhedron is pointed)."""
        m, d = self.A.shape
        scale = 1.0 + np.abs(self.b).max()
        for k in range(min(m, d), 0, -1):
            pts = []
            for idx in itertools.combinations(range(m), k):
                As = self.A[list(idx)]
                if np.linalg.matrix_rank(As, tol=1e-10) < k:
                    continue
                x = np.linalg.lstsq(As, self.b[list(idx)], rcond=None)[0]
                if np.all(self.slack(x[None])[0] >= -1e-9 * scale):
                    pts.append(x)
            if pts:
                pts = np.unique(np.round(np.array(pts), 12), axis=0)
                return pts
        return np.empty((0, d))

    def interior_point(self):
        c, r = self.chebyshev(box=1e3)
        return c

    def structural_points(self):
        return self.face_points()


class HalfSpace(_HRep):
    """``{x : normal . x >= offset}``."""

    family = "halfspace"

    def __init__(self, normal, offset=0.0):
        n = _unit(normal)
        offset = float(offset) / np.linalg.norm(np.asarray(normal, dtype=float))
        super().__init__(n[None, :], [offset])
        self.normal = self.A[0]
        self.offset = float(self.b[0])

    def _project(self, P):
        s = P @ self.normal - self.offset
        return P - np.minimum(s, 0.0)[:, None] * self.normal[None, :]

    def _distance(self, P):
        return np.maximum(self.offset - P @ self.normal, 0.0)

    def interior_point(self):
        return self.normal * (self.offset + 1.0)

    def structural_points(self):
        return (self.normal * self.offset)[None, :]

    def _scaled(self, lam):
        return HalfSpace(self.normal, self.offset * lam)

    def _translated(self, v):
        return HalfSpace(self.normal, self.offset + float(self.normal @ v))

    def to_json(self):
        return {"family": "halfspace", "normal": self.normal.tolist(), "offset": self.offset}


class Slab(_HRep):
    """``{x : lo <= normal . x <= hi}``."""

    family = "slab"

    def __init__(self, normal, lo, hi):
        raw = np.linalg.norm(np.asarray(normal, dtype=float))
        n = _unit(normal)
        lo, hi = float(lo) / raw, float(hi) / raw
        if not lo < hi:
            raise BodySpecError("/lo", "slab requires lo < hi")
        super().__init__(np.vstack([n, -n]), [lo, -hi])
        self.normal = n
        self.lo, self.hi = lo, hi
        self.normal.setflags(write=False)

    def _project(self, P):
        s = P @ self.normal
        c = np.clip(s, self.lo, self.hi)
        return P + (c - s)[:, None] * self.normal[None, :]

    def _distance(self, P):
        s = P @ self.normal
        return np.maximum(self.lo - s, 0.0) + np.maximum(s - self.hi, 0.0)

    def interior_point(self):
        return self.normal * 0.5 * (self.lo + self.hi)

    def structural_points(self):
        return np.vstack([self.normal * self.lo, self.normal * self.hi])

    def _scaled(self, lam):
        return Slab(self.normal, self.lo * lam, self.hi * lam)

    def _translated(self, v):
        s = float(self.normal @ v)
        return Slab(self.normal, self.lo + s, self.hi + s)

    def to_json(self):
        return {"family": "slab", "normal": self.normal.tolist(), "lo": self.lo, "hi": self.hi}


class PolyCone(_HRep):
    """Polyhedral cone ``{x : n_i . (x - apex) >= 0}``."""

    family = "polycone"

    def __init__(self, apex, normals):
        apex = np.asarray(apex, dtype=float)
        N = np.atleast_2d(np.asarray(normals, dtype=float))
        if N.shape[0] == 0:
            raise BodySpecError("/facets", "facet list must be non-empty")
        N = N / np.linalg.norm(N, axis=1)[:, None]
        super().__init__(N, N @ apex)
        self.apex = _frozen(apex)
        self.normals = self.A

    @property
    def is_orthant(self) -> bool:
        """Normals are distinct signed coordinate axes."""
        N = self.normals
        axes = np.argmax(np.abs(N), axis=1)
        return bool(np.allclose(np.abs(N).max(axis=1), 1.0, atol=1e-12)
                    and len(set(axes.tolist())) == len(axes))

    def _project(self, P):
        if self.is_orthant:
            out = P.copy()
            axes = np.argmax(np.abs(self.normals), axis=1)
            sgn = np.sign(self.normals[np.arange(len(axes)), axes])
            for ax, s in zip(axes, sgn):
                rel = (out[:, ax] - self.apex[ax]) * s
                out[:, ax] = self.apex[ax] + s * np.maximum(rel, 0.0)
            return out
        return super()._project(P)

    def interior_point(self):
        c, _ = PolyCone(np.zeros(self.dim), self.normals).chebyshev(box=1.0)
        return self.apex + c

    def structural_points(self):
        return self.face_points()

    def _scaled(self, lam):
        return PolyCone(self.apex * lam, self.normals)

    def _translated(self, v):
        return PolyCone(self.apex + v, self.normals)

    def to_json(self):
        return {"family": "polycone", "apex": self.apex.tolist(), "facets": self.normals.tolist()}


class Polytope(_HRep):
    """Intersection of half-spaces ``{x : n_i . x >= b_i}`` (bounded or not)."""

    family = "polytope"

    def __init__(self, normals, offsets):
        N = np.atleast_2d(np.asarray(normals, dtype=float))
        super().__init__(N, offsets)
        self.bounded = self.recession_is_trivial()

    @classmethod
    def box(cls, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        d = lo.size
        eye = np.eye(d)
        return cls(np.vstack([eye, -eye]), np.concatenate([lo, -hi]))

    def volume(self):
        """Exact volume of a bounded polytope (vertex enumeration + convex hull)."""
        from scipy.spatial import ConvexHull, HalfspaceIntersection

        if not self.bounded:
            return np.inf
        c, r = self.chebyshev()
        if r <= 0:
            return 0.0
        if self.dim == 1:
            return 2.0 * r
        hs = np.hstack([-self.A, self.b[:, None]])
        verts = HalfspaceIntersection(hs, c).intersections
        return float(ConvexHull(verts).volume)

    def _scaled(self, lam):
        return Polytope(self.A, self.b * lam)

    def _translated(self, v):
        return Polytope(self.A, self.b + self.A @ v)

    def to_json(self):
        return {"family": "polytope",
                "facets": [{"normal": a.tolist(), "offset": float(b)} for a, b in zip(self.A, self.b)]}


# ---------------------------------------------------------------------------
# Elementary and degenerate sets
# ---------------------------------------------------------------------------

class FullSpace(Body):
    family = "fullspace"

    def __init__(self, dim):
        self.dim = int(dim)

    def _contains(self, P):
        return np.ones(P.shape[0], dtype=bool)

    def _project(self, P):
        return P.copy()

    def _distance(self, P):
        return np.zeros(P.shape[0])

    def _raycast(self, x0, U):
        return np.full(U.shape[0], np.inf)

    def _depth(self, P):
        return np.full(P.shape[0], np.inf)

    def interior_point(self):
        return np.zeros(self.dim)

    def _scaled(self, lam):
        return self

    def _translated(self, v):
        return self

    def to_json(self):
        return {"family": "fullspace", "dim": self.dim}


class Ball(Body):
    family = "ball"
    bounded = True

    def __init__(self, center, radius):
        self.center = _frozen(center)
        self.radius = float(radius)
        if not self.radius > 0:
            raise BodySpecError("/radius", "radius must be positive")
        self.dim = self.center.size

    def _contains(self, P):
        return np.linalg.norm(P - self.center, axis=1) <= self.radius * (1 + 1e-12)

    def _project(self, P):
        D = P - self.center
        n = np.linalg.norm(D, axis=1)
        f = np.where(n > self.radius, self.radius / np.where(n > 0, n, 1.0), 1.0)
        return self.center + D * f[:, None]

    def _distance(self, P):
        return np.maximum(np.linalg.norm(P - self.center, axis=1) - self.radius, 0.0)

    def _depth(self, P):
        return self.radius - np.linalg.norm(P - self.center, axis=1)

    def _raycast(self, x0, U):
        w = x0 - self.center
        bu = U @ w
        c = w @ w - self.radius ** 2
        disc = np.maximum(bu * bu - c, 0.0)
        return -bu + np.sqrt(disc)

    def _bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def interior_point(self):
        return self.center.copy()

    def structural_points(self):
        return self.center[None, :]

    def _scaled(self, lam):
        return Ball(self.center * lam, self.radius * lam)

    def _translated(self, v):
        return Ball(self.center + v, self.radius)

    def to_json(self):
        return {"family": "ball", "center": self.center.tolist(), "radius": self.radius}


class Ray(Body):
    """Closed half-line ``{apex + t u : t >= 0}``; zero volume, flagged degenerate."""

    family = "ray"
    degenerate = True

    def __init__(self, apex, direction):
        self.apex = _frozen(apex)
        self.direction = _frozen(_unit(direction, "/direction"))
        self.dim = self.apex.size

    def _project(self, P):
        t = np.maximum((P - self.apex) @ self.direction, 0.0)
        return self.apex + t[:, None] * self.direction

    def _contains(self, P):
        return self._distance(P) <= ATOL

    def _raycast(self, x0, U):
        along = np.abs(U @ self.direction - 1.0) < 1e-12
        return np.where(along, np.inf, 0.0)

    def _depth(self, P):
        return np.zeros(P.shape[0])

    def interior_point(self):
        return self.apex + self.direction

    def _scaled(self, lam):
        return Ray(self.apex * lam, self.direction)

    def _translated(self, v):
        return Ray(self.apex + v, self.direction)

    def to_json(self):
        return {"family": "ray", "apex": self.apex.tolist(), "direction": self.direction.tolist()}


class Flat(Body):
    """Affine subspace ``{x : N (x - point) = 0}``; flagged degenerate."""

    family = "flat"
    degenerate = True

    def __init__(self, point, normals):
        self.point = _frozen(point)
        N = np.atleast_2d(np.asarray(normals, dtype=float))
        q, _ = np.linalg.qr(N.T)
        self.normals = _frozen(q.T)
        self.dim = self.point.size

    def _project(self, P):
        D = (P - self.point) @ self.normals.T
        return P - D @ self.normals

    def _contains(self, P):
        return self._distance(P) <= ATOL

    def _raycast(self, x0, U):
        flat = np.all(np.abs(U @ self.normals.T) < 1e-12, axis=1)
        return np.where(flat, np.inf, 0.0)

    def _depth(self, P):
        return np.zeros(P.shape[0])

    def interior_point(self):
        return self.point.copy()

    def _scaled(self, lam):
        return Flat(self.point * lam, self.normals)

    def _translated(self, v):
        return Flat(self.point + v, self.normals)

    def to_json(self):
        return {"family": "flat", "point": self.point.tolist(), "normals": self.normals.tolist()}


# ---------------------------------------------------------------------------
# Products and intersections
# ---------------------------------------------------------------------------

class Product(Body):
    """``section x R^free_dims``; the section occupies the leading coordinates."""

    family = "product"

    def __init__(self, section: Body, free_dims: int):
        if not getattr(section, "bounded", False):
            raise BodySpecError("/section", "product section must be a bounded body")
        self.section = section
        self.free_dims = int(free_dims)
        if self.free_dims < 1:
            raise BodySpecError("/free_dims", "free_dims must be >= 1")
        self.k = section.dim
        self.dim = self.k + self.free_dims

    def _contains(self, P):
        return self.section._contains(P[:, : self.k])

    def _project(self, P):
        out = P.copy()
        out[:, : self.k] = self.section._project(P[:, : self.k])
        return out

    def _distance(self, P):
        return self.section._distance(P[:, : self.k])

    def _depth(self, P):
        return self.section._depth(P[:, : self.k])

    def _raycast(self, x0, U):
        Us = U[:, : self.k]
        n = np.linalg.norm(Us, axis=1)
        t = np.full(U.shape[0], np.inf)
        moving = n > 1e-15
        if moving.any():
            t[moving] = self.section._raycast(x0[: self.k], Us[moving] / n[moving, None]) / n[moving]
        return t

    def _bounding_box(self):
        lo, hi = self.section.bounding_box()
        inf = np.full(self.free_dims, np.inf)
        return np.concatenate([lo, -inf]), np.concatenate([hi, inf])

    def _pad(self, pts):
        pts = np.atleast_2d(pts)
        return np.hstack([pts, np.zeros((pts.shape[0], self.free_dims))])

    def interior_point(self):
        return self._pad(self.section.interior_point())[0]

    def structural_points(self):
        return self._pad(self.section.structural_points())

    def _scaled(self, lam):
        return Product(self.section.scale(lam), self.free_dims)

    def _translated(self, v):
        return Product(self.section.translate(v[: self.k]), self.free_dims)

    def to_json(self):
        return {"family": "product", "section": self.section.to_json(), "free_dims": self.free_dims}


class Intersection(Body):
    """Finite intersection of convex bodies; projection by Dykstra's algorithm."""

    family = "intersection"
    max_iter = 20000

    def __init__(self, parts):
        self.parts = tuple(parts)
        dims = {p.dim for p in self.parts}
        if len(dims) != 1:
            raise DimensionError("intersection parts must share a dimension")
        self.dim = dims.pop()
        self.bounded = any(getattr(p, "bounded", False) for p in self.parts)

    def _contains(self, P):
        ok = np.ones(P.shape[0], dtype=bool)
        for p in self.parts:
            ok &= p._contains(P)
        return ok

    def _depth(self, P):
        return np.min([p._depth(P) for p in self.parts], axis=0)

    def _raycast(self, x0, U):
        return np.min([p._raycast(x0, U) for p in self.parts], axis=0)

    def _project(self, P):
        out = P.copy()
        todo = ~self._contains(P)
        if not todo.any():
            return out
        X = P[todo].copy()
        incr = [np.zeros_like(X) for _ in self.parts]
        for _ in range(self.max_iter):
            prev = X.copy()
            for i, part in enumerate(self.parts):
                Z = part._project(X + incr[i])
                incr[i] = X + incr[i] - Z
                X = Z
            if np.max(np.abs(X - prev)) <= 1e-11 * (1.0 + np.max(np.abs(X))):
                break
        else:
            raise ProjectionError("Dykstra projection hit its iteration cap")
        out[todo] = X
        return out

    def _bounding_box(self):
        boxes = [p.bounding_box() for p in self.parts]
        return np.max([b[0] for b in boxes], axis=0), np.min([b[1] for b in boxes], axis=0)

    def interior_point(self):
        return _max_depth_point(self, [p.interior_point() for p in self.parts])

    def structural_points(self):
        pts = [p.structural_points() for p in self.parts]
        pts = np.vstack(pts) if pts else np.empty((0, self.dim))
        return pts[self._contains(pts)] if len(pts) else pts

    def _scaled(self, lam):
        return Intersection([p.scale(lam) for p in self.parts])

    def _translated(self, v):
        return Intersection([p.translate(v) for p in self.parts])

    def to_json(self):
        return {"family": "intersection", "parts": [p.to_json() for p in self.parts]}


class BallCut(Body):
    """``C ∩ closed ball(center, radius)``: the intrinsic ball of C when center ∈ C."""

    family = "ballcut"
    bounded = True

    def __init__(self, body: Body, center, radius):
        self.body = body
        self.ball = Ball(center, radius)
        self.center, self.radius = self.ball.center, self.ball.radius
        self.dim = body.dim

    def _contains(self, P):
        return self.ball._contains(P) & self.body._contains(P)

    def _depth(self, P):
        return np.minimum(self.body._depth(P), self.ball._depth(P))

    def _raycast(self, x0, U):
        return np.minimum(self.body._raycast(x0, U), self.ball._raycast(x0, U))

    def _project(self, P):
        # dual bisection on the ball multiplier: x(mu) = proj_C(c + (y - c)/(1 + mu))
        c, R = self.center, self.radius
        X = self.body._project(P)
        far = np.linalg.norm(X - c, axis=1) > R * (1 + 1e-12)
        if not far.any():
            return X
        Y = P[far]
        lo = np.zeros(Y.shape[0])
        hi = np.ones(Y.shape[0])
        for _ in range(200):
            Xh = self.body._project(c + (Y - c) / (1.0 + hi[:, None]))
            bad = np.linalg.norm(Xh - c, axis=1) > R
            if not bad.any():
                break
            hi = np.where(bad, hi * 4.0, hi)
        else:
            raise ProjectionError("body does not meet the ball (empty intersection)")
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            Xm = self.body._project(c + (Y - c) / (1.0 + mid[:, None]))
            bad = np.linalg.norm(Xm - c, axis=1) > R
            lo = np.where(bad, mid, lo)
            hi = np.where(bad, hi, mid)
            if np.all(hi - lo <= 1e-15 * (1.0 + hi)):
                break
        X[far] = self.body._project(c + (Y - c) / (1.0 + hi[:, None]))
        return X

    def _bounding_box(self):
        blo, bhi = self.body.bounding_box()
        return np.maximum(blo, self.center - self.radius), np.minimum(bhi, self.center + self.radius)

    def interior_point(self):
        starts = [self.center]
        try:
            starts.append(self.ball.center + 0.5 * (self.body.interior_point() - self.center)
                          * min(1.0, self.radius / max(1e-300, np.linalg.norm(self.body.interior_point() - self.center))))
        except NotImplementedError:
            pass
        return _max_depth_point(self, starts)

    def structural_points(self):
        return self.center[None, :]

    def _scaled(self, lam):
        return BallCut(self.body.scale(lam), self.center * lam, self.radius * lam)

    def _translated(self, v):
        return BallCut(self.body.translate(v), self.center + v, self.radius)

    def to_json(self):
        return {"family": "ballcut", "body": self.body.to_json(),
                "center": self.center.tolist(), "radius": self.radius}


def _max_depth_point(body, starts):
    """Point of (approximately) maximal depth, by Nelder-Mead from ``starts``."""
    from scipy.optimize import minimize

    best, best_val = None, -np.inf
    for s in starts:
        s = np.asarray(s, dtype=float)
        res = minimize(lambda y: -float(body._depth(y[None])[0]), s, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000 * body.dim})
        val = -res.fun
        if val > best_val:
            best, best_val = res.x, val
    return best


# ---------------------------------------------------------------------------
# Placed bodies (translation and scaling stored explicitly)
# ---------------------------------------------------------------------------

class _Placed(Body):
    """A local body ``L`` placed as ``shift + factor * L``."""

    def __init__(self, local: Body, shift=None, factor=1.0):
        self._local = local
        self.dim = local.dim
        self.shift = _frozen(np.zeros(self.dim) if shift is None else shift)
        self.factor = _check_factor(factor)
        if self.shift.shape != (self.dim,):
            raise DimensionError("shift has the wrong dimension")

    def to_local(self, P):
        return (P - self.shift) / self.factor

    def to_global(self, Q):
        return self.shift + self.factor * Q

    def _contains(self, P):
        return self._local._contains(self.to_local(P))

    def _project(self, P):
        return self.to_global(self._local._project(self.to_local(P)))

    def _distance(self, P):
        return self.factor * self._local._distance(self.to_local(P))

    def _depth(self, P):
        return self.factor * self._local._depth(self.to_local(P))

    def _raycast(self, x0, U):
        return self.factor * self._local._raycast(self.to_local(x0[None])[0], U)

    def _bounding_box(self):
        lo, hi = self._local.bounding_box()
        return self.shift + self.factor * lo, self.shift + self.factor * hi

    def interior_point(self):
        return self.to_global(self._local.interior_point()[None])[0]

    def structural_points(self):
        return self.to_global(self._local.structural_points())

    def _placement_json(self):
        out = {}
        if np.any(self.shift != 0):
            out["shift"] = self.shift.tolist()
        if self.factor != 1.0:
            out["scale"] = self.factor
        return out


class _RevolutionLocal(Body):
    """``{(z, t) : t >= f(|z|)}`` at the origin."""

    family = "revolution-local"

    def __init__(self, prof: ConvexProfile, dim):
        self.profile = prof
        self.dim = int(dim)

    def _split(self, P):
        z = P[:, :-1]
        return z, np.linalg.norm(z, axis=1), P[:, -1]

    def _contains(self, P):
        _, rho, t = self._split(P)
        f = self.profile.f(rho)
        return t >= f - ATOL * (1.0 + np.abs(f))

    def _project(self, P):
        out = P.copy()
        z, rho0, t0 = self._split(P)
        outside = t0 < self.profile.f(rho0)
        if not outside.any():
            return out
        z, rho0, t0 = z[outside], rho0[outside], t0[outside]
        f, df = self.profile.f, self.profile.df

        def phi(r):
            return r - rho0 + df(r) * (f(r) - t0)

        at_apex = phi(np.zeros_like(rho0)) >= 0
        lo = np.zeros_like(rho0)
        hi = rho0.copy()
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            neg = phi(mid) < 0
            lo = np.where(neg, mid, lo)
            hi = np.where(neg, hi, mid)
            if np.all(hi - lo <= 4e-16 * (1.0 + rho0)):
                break
        r = np.where(at_apex | (rho0 == 0), 0.0, 0.5 * (lo + hi))
        with np.errstate(invalid="ignore", divide="ignore"):
            zs = np.where(rho0[:, None] > 0, z * (r / np.where(rho0 > 0, rho0, 1.0))[:, None], 0.0)
        out[outside, :-1] = zs
        out[outside, -1] = f(r)
        return out

    def _raycast(self, x0, U):
        z0, t0 = x0[:-1], x0[-1]
        zu, tu = U[:, :-1], U[:, -1]
        f = self.profile.f

        def g(tau):
            return t0 + tau * tu - f(np.linalg.norm(z0 + tau[:, None] * zu, axis=1))

        m = U.shape[0]
        hi = np.ones(m)
        grow = g(hi) >= 0
        for _ in range(45):
            if not grow.any():
                break
            hi = np.where(grow, hi * 2.0, hi)
            grow = grow & (hi < T_MAX)
            idx = np.flatnonzero(grow)
            if idx.size:
                grow[idx] = (t0 + hi[idx] * tu[idx]
                             - f(np.linalg.norm(z0 + hi[idx, None] * zu[idx], axis=1))) >= 0
        unbounded = hi >= T_MAX
        lo = np.where(hi > 1.0, 0.5 * hi, 0.0)
        hi = np.where(unbounded, 1.0, hi)
        # Illinois regula falsi on the bracket g(lo) >= 0 > g(hi), restricted to open lanes
        flo, fhi = g(lo), g(hi)
        side = np.zeros(m, dtype=int)
        # rays leaving immediately from a boundary origin exit at 0
        at0 = np.flatnonzero((lo == 0.0) & (flo <= 1e-15 * (1.0 + abs(t0))) & ~unbounded)
        if at0.size:
            eps = np.full(at0.size, 1e-13)
            leave = (t0 + eps * tu[at0] - f(np.linalg.norm(z0 + eps[:, None] * zu[at0], axis=1))) < 0
            hi[at0[leave]] = 0.0
        idx = np.flatnonzero(~unbounded)
        for _ in range(100):
            open_ = (hi[idx] - lo[idx]) > 1e-13 * np.maximum(hi[idx], 1.0)
            idx = idx[open_]
            if idx.size == 0:
                break
            a, b, fa, fb = lo[idx], hi[idx], flo[idx], fhi[idx]
            c = b - fb * (b - a) / (fb - fa)
            c = np.where((c > a) & (c < b), c, 0.5 * (a + b))
            zc = z0 + c[:, None] * zu[idx]
            fc = t0 + c * tu[idx] - f(np.linalg.norm(zc, axis=1))
            inside = fc >= 0
            sd = side[idx]
            lo[idx] = np.where(inside, c, a)
            flo[idx] = np.where(inside, fc, np.where(sd == -1, 0.5 * fa, fa))
            hi[idx] = np.where(inside, b, c)
            fhi[idx] = np.where(inside, np.where(sd == 1, 0.5 * fb, fb), fc)
            side[idx] = np.where(inside, 1, -1)
            # a residual at rounding level pins the root
            done = np.abs(fc) <= 1e-15 * (1.0 + np.abs(t0) + np.abs(c))
            hi[idx[done]] = c[done]
            lo[idx[done]] = c[done]
        return np.where(unbounded, np.inf, lo)

    def _depth(self, P):
        _, rho0, t0 = self._split(P)
        f, df = self.profile.f, self.profile.df
        inside = t0 >= f(rho0)
        out = np.zeros(P.shape[0])
        if not inside.any():
            return out
        rho0, t0 = rho0[inside], t0[inside]
        top = self.profile.inverse(np.maximum(t0, 0.0))

        def slack(r):
            d = df(r)
            return (t0 - f(r) - d * (rho0 - r)) / np.sqrt(1.0 + d * d)

        grid = np.linspace(0.0, 1.0, 129)
        vals = np.array([slack(top * g) for g in grid])
        k = np.argmin(vals, axis=0)
        lo = top * grid[np.maximum(k - 1, 0)]
        hi = top * grid[np.minimum(k + 1, grid.size - 1)]
        _, best = golden_min(slack, lo, hi, iters=60)
        out[inside] = np.minimum(best, vals.min(axis=0))
        return out

    def _bounding_box(self):
        lo, hi = np.full(self.dim, -np.inf), np.full(self.dim, np.inf)
        lo[-1] = float(self.profile.f(np.zeros(1))[0])
        return lo, hi

    def interior_point(self):
        x = np.zeros(self.dim)
        x[-1] = 1.0
        return x

    def structural_points(self):
        return np.zeros((1, self.dim))


class RevolutionBody(_Placed):
    """Body of revolution ``apex + scale * {(z, t) in R^n x R : t >= f(|z|)}``."""

    family = "revolution"

    def __init__(self, profile: ConvexProfile, dim=3, apex=None, scale=1.0):
        super().__init__(_RevolutionLocal(profile, dim), apex, scale)
        self.profile = profile

    @property
    def apex(self):
        return self.shift

    @property
    def axis(self):
        e = np.zeros(self.dim)
        e[-1] = 1.0
        return e

    @property
    def superlinear(self):
        return self.profile.superlinear

    @property
    def fast_path_ok(self):
        p = self.profile
        return p.strictly_convex and p.f_triple_prime_nonpositive and p.superlinear

    def _scaled(self, lam):
        return type(self)._rebuild(self, self.shift * lam, self.factor * lam)

    def _translated(self, v):
        return type(self)._rebuild(self, self.shift + v, self.factor)

    def _rebuild(self, apex, factor):
        return RevolutionBody(self.profile, self.dim, apex, factor)

    def to_json(self):
        out = {"family": "revolution", "dim": self.dim, "profile": _profile_json(self.profile)}
        out.update(self._placement_json())
        return out


def _profile_json(p):
    return {k: v for k, v in p.params.items() if k != "asymptotic_slope"}


class PowerBody(RevolutionBody):
    """``C_a = {(x, y) in R^2 x R : y >= |x|**a}`` with ``1 < a <= 2``."""

    family = "power"

    def __init__(self, a, apex=None, scale=1.0):
        a = float(a)
        if not (1.0 < a <= 2.0):
            raise BodySpecError("/a", f"power exponent must lie in (1, 2], got {a}")
        self.a = a
        super().__init__(_profile.power(a), 3, apex, scale)

    def _rebuild(self, apex, factor):
        return PowerBody(self.a, apex, factor)

    def to_json(self):
        out = {"family": "power", "a": self.a}
        out.update(self._placement_json())
        return out


class CylBounded(_Placed):
    """Cylindrically bounded body ``{(z, t) : z in K, t >= height(|z|)}``.

    ``section`` is a bounded polytope ``K`` in ``R^n`` and ``height`` a convex
    radial profile.  The body is the intersection of the revolution epigraph
    with ``K x R``.
    """

    family = "cylbounded"

    def __init__(self, section: Polytope, height: ConvexProfile, shift=None, scale=1.0):
        if not isinstance(section, Polytope) or not section.bounded:
            raise BodySpecError("/section", "cylbounded section must be a bounded polytope")
        self.section = section
        self.height = height
        local = Intersection([_RevolutionLocal(height, section.dim + 1), Product(section, 1)])
        super().__init__(local, shift, scale)

    def section_area(self):
        """``H^n(K)`` in global units."""
        return self.section.volume() * self.factor ** self.section.dim

    def interior_point(self):
        c, _ = self.section.chebyshev()
        t = float(self.height.f(np.array(np.linalg.norm(c)))) + 1.0
        return self.to_global(np.append(c, t)[None])[0]

    def structural_points(self):
        V = self.section.face_points()
        lifted = np.hstack([V, self.height.f(np.linalg.norm(V, axis=1))[:, None]])
        pts = np.vstack([lifted, np.zeros((1, self.dim))])
        pts = pts[self._local._contains(pts)]
        return self.to_global(pts)

    def _scaled(self, lam):
        return CylBounded(self.section, self.height, self.shift * lam, self.factor * lam)

    def _translated(self, v):
        return CylBounded(self.section, self.height, self.shift + v, self.factor)

    def to_json(self):
        out = {"family": "cylbounded", "section": self.section.to_json(),
               "height": _profile_json(self.height)}
        out.update(self._placement_json())
        return out


# ---------------------------------------------------------------------------
# Convex envelope of a half-cylinder and a parabola
# ---------------------------------------------------------------------------

def envelope_planes(x):
    """Points and supporting half-spaces attached to the parabola point at ``x > 1``.

    Returns ``(p, q, t1, t2, (n1, b1), (n2, b2))`` with half-spaces
    ``n_i . y >= b_i`` containing the envelope.
    """
    x = float(x)
    if not x > 1.0:
        raise ValueError(f"parabola parameter must exceed 1, got {x}")
    p = np.array([x, 0.0, (x - 1.0) ** 2])
    q = np.array([(1.0 + x) / 2.0, 0.0, 0.0])
    c = 2.0 / (1.0 + x)
    s = math.sqrt(1.0 - 4.0 / (1.0 + x) ** 2)
    t1 = np.array([c, s, 0.0])
    t2 = np.array([c, -s, 0.0])
    planes = []
    for t in (t1, t2):
        n = np.cross(q - p, t - p)
        n /= np.linalg.norm(n)
        b = float(n @ p)
        if b > 0:  # origin lies inside the envelope
            n, b = -n, -b
        planes.append((n, b))
    return p, q, t1, t2, planes[0], planes[1]


class _DiskStrip(Body):
    """``{(x, y, z) : (x, y) in D ∪ ([0, inf) x [-1, 1])}``, the xy-shadow of the envelope."""

    family = "diskstrip"
    dim = 3

    def _contains(self, P):
        x, y = P[:, 0], P[:, 1]
        tol = ATOL
        return np.where(x >= 0, np.abs(y) <= 1 + tol, x * x + y * y <= 1 + tol)

    def _project(self, P):
        out = P.copy()
        x, y = P[:, 0], P[:, 1]
        right = x >= 0
        out[:, 1] = np.where(right, np.clip(y, -1.0, 1.0), y)
        r = np.hypot(x, y)
        left_out = (~right) & (r > 1)
        out[left_out, 0] = x[left_out] / r[left_out]
        out[left_out, 1] = y[left_out] / r[left_out]
        return out

    def _depth(self, P):
        x, y = P[:, 0], P[:, 1]
        return np.where(x >= 0, 1.0 - np.abs(y), 1.0 - np.hypot(x, y))

    def _raycast(self, x0, U):
        px, py = x0[0], x0[1]
        ux, uy = U[:, 0], U[:, 1]
        # disk part: |p + t u|^2 <= 1
        a = ux * ux + uy * uy
        bq = px * ux + py * uy
        cq = px * px + py * py - 1.0
        disc = bq * bq - a * cq
        with np.errstate(divide="ignore", invalid="ignore"):
            disk_hi = np.where((a > 1e-30) & (disc >= 0), (-bq + np.sqrt(np.maximum(disc, 0))) / a,
                               np.where(cq <= 0, np.inf, -np.inf))
        # strip part: x >= 0 and |y| <= 1
        lo = np.zeros(U.shape[0]) - np.inf
        hi = np.full(U.shape[0], np.inf)
        with np.errstate(divide="ignore", invalid="ignore"):
            tx = -px / ux
            hi = np.where(ux < 0, np.minimum(hi, tx), hi)
            lo = np.where(ux > 0, np.maximum(lo, tx), lo)
            empty_x = (ux == 0) & (px < 0)
            for bound, sgn in ((1.0, 1.0), (-1.0, -1.0)):
                tb = (bound - py) / uy
                hi = np.where(sgn * uy > 0, np.minimum(hi, tb), hi)
                lo = np.where(sgn * uy < 0, np.maximum(lo, tb), lo)
            empty_y = (uy == 0) & (np.abs(py) > 1)
        strip_hi = np.where(empty_x | empty_y | (lo > hi), -np.inf, hi)
        return np.maximum(disk_hi, strip_hi)

    def _bounding_box(self):
        return np.array([-1.0, -1.0, -np.inf]), np.array([np.inf, 1.0, np.inf])

    def interior_point(self):
        return np.array([0.0, 0.0, 1.0])

    def to_json(self):
        return {"family": "diskstrip"}


class _EnvelopeCore(Intersection):
    """Half-spaces cut by the xy-shadow, projected as one smooth QP per point.

    The shadow is ``max(0, -x)^2 + y^2 <= 1``, a C^1 convex constraint, so
    SLSQP converges where alternating projections crawl along corners.
    """

    def __init__(self, planes):
        super().__init__([planes, _DiskStrip()])
        self.planes = planes

    def _project_one(self, y):
        A, b = self.planes.A, self.planes.b
        start = self.parts[1]._project(self.planes._project(y[None, :]))[0]
        cons = [
            {"type": "ineq", "fun": lambda x: A @ x - b, "jac": lambda x: A},
            {"type": "ineq",
             "fun": lambda x: np.array([1.0 - min(x[0], 0.0) ** 2 - x[1] ** 2]),
             "jac": lambda x: np.array([[-2.0 * min(x[0], 0.0), -2.0 * x[1], 0.0]])},
        ]
        res = minimize(lambda x: 0.5 * np.sum((x - y) ** 2), start, jac=lambda x: x - y,
                       constraints=cons, method="SLSQP", options={"ftol": 1e-15, "maxiter": 500})
        x = res.x[None, :]
        for _ in range(50):
            if self._contains(x)[0]:
                break
            x = self.planes._project(self.parts[1]._project(x))
        x = x[0]
        if not self._contains(x[None, :])[0]:
            raise ProjectionError("envelope projection did not converge")
        return x

    def _project(self, P):
        out = P.copy()
        todo = np.flatnonzero(~self._contains(P))
        for i in todo:
            out[i] = self._project_one(P[i])
        return out


class ExEnvelope(_Placed):
    """Outer approximation of the closed convex envelope of a half-cylinder and a parabola.

    ``Q = {x^2 + y^2 <= 1, z >= 0}`` and ``P = {(x, 0, (x-1)^2) : x >= 1}``.
    Membership is the intersection of the supporting half-spaces attached to
    the parabola points on the grid ``x = 1 + 2**k / 16`` (``k < levels``) and
    any ``extra_x``, the floor ``z >= 0`` and the xy-shadow constraint.
    """

    family = "exenvelope"

    def __init__(self, levels=21, extra_x=(), shift=None, scale=1.0):
        self.levels = int(levels)
        self.extra_x = tuple(float(x) for x in extra_x)
        xs = sorted(set([1.0 + 2.0 ** k / 16.0 for k in range(self.levels)] + list(self.extra_x)))
        self.grid = tuple(xs)
        normals, offsets = [np.array([0.0, 0.0, 1.0])], [0.0]
        for x in xs:
            _, _, _, _, (n1, b1), (n2, b2) = envelope_planes(x)
            normals += [n1, n2]
            offsets += [b1, b2]
        self.planes = Polytope(np.array(normals), np.array(offsets))
        super().__init__(_EnvelopeCore(self.planes), shift, scale)

    def parabola_point(self, x):
        return self.to_global(np.array([[x, 0.0, (x - 1.0) ** 2]]))[0]

    def interior_point(self):
        return self.to_global(np.array([[0.0, 0.0, 1.0]]))[0]

    def structural_points(self):
        pts = np.array([[x, 0.0, (x - 1.0) ** 2] for x in self.grid])
        return self.to_global(np.vstack([pts, np.zeros((1, 3))]))

    def _scaled(self, lam):
        return ExEnvelope(self.levels, self.extra_x, self.shift * lam, self.factor * lam)

    def _translated(self, v):
        return ExEnvelope(self.levels, self.extra_x, self.shift + v, self.factor)

    def to_json(self):
        out = {"family": "exenvelope"}
        if self.levels != 21:
            out["levels"] = self.levels
        if self.extra_x:
            out["extra_x"] = list(self.extra_x)
        out.update(self._placement_json())
        return out
