"""Body specifications as JSON documents.

A document is ``{"family": name, ...fields}``.  Normals may be unnormalized;
they are normalized on load (offsets are rescaled to keep the same set).
Every error names the JSON path of the offending field.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from ..errors import BodySpecError
from . import profile as _profile
from .families import (Ball, BallCut, CylBounded, ExEnvelope, FullSpace, HalfSpace,
                        Intersection, PolyCone, Polytope, PowerBody, Product, RevolutionBody,
                        Slab)


def _num(obj, key, path, default=None):
    if key not in obj:
        if default is None:
            raise BodySpecError(f"{path}/{key}", "missing required field")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
        raise BodySpecError(f"{path}/{key}", "expected a finite number")
    return float(v)


def _vec(obj, key, path, dim=None, required=True):
    if key not in obj:
        if required:
            raise BodySpecError(f"{path}/{key}", "missing required field")
        return None
    v = obj[key]
    if not isinstance(v, list) or not v:
        raise BodySpecError(f"{path}/{key}", "expected a non-empty list of numbers")
    for i, x in enumerate(v):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not np.isfinite(x):
            raise BodySpecError(f"{path}/{key}/{i}", "expected a finite number")
    if dim is not None and len(v) != dim:
        raise BodySpecError(f"{path}/{key}", f"expected {dim} components, got {len(v)}")
    arr = np.array(v, dtype=float)
    return arr


def _nonzero(vec, path):
    if np.linalg.norm(vec) == 0:
        raise BodySpecError(path, "normal vector must be non-zero")
    return vec


def _placement(obj, path, dim):
    shift = _vec(obj, "shift", path, dim, required=False)
    if shift is None:
        shift = _vec(obj, "apex", path, dim, required=False)
    scale = _num(obj, "scale", path, 1.0)
    if scale <= 0:
        raise BodySpecError(f"{path}/scale", "scale must be positive")
    return shift, scale


def _facets(obj, path):
    facets = obj.get("facets")
    if not isinstance(facets, list) or not facets:
        raise BodySpecError(f"{path}/facets", "facet list must be non-empty")
    normals, offsets = [], []
    for i, f in enumerate(facets):
        fp = f"{path}/facets/{i}"
        if not isinstance(f, dict):
            raise BodySpecError(fp, "facet must be an object {normal, offset}")
        n = _nonzero(_vec(f, "normal", fp), f"{fp}/normal")
        normals.append(n)
        offsets.append(_num(f, "offset", fp, 0.0))
    if len({len(n) for n in normals}) != 1:
        raise BodySpecError(f"{path}/facets", "all normals must share a dimension")
    return np.array(normals), np.array(offsets)


def _polytope(obj, path):
    if "box" in obj:
        box = obj["box"]
        if not isinstance(box, dict):
            raise BodySpecError(f"{path}/box", "expected {lo, hi}")
        lo = _vec(box, "lo", f"{path}/box")
        hi = _vec(box, "hi", f"{path}/box", len(lo))
        if np.any(lo >= hi):
            raise BodySpecError(f"{path}/box", "box requires lo < hi componentwise")
        return Polytope.box(lo, hi)
    N, b = _facets(obj, path)
    return Polytope(N, b)


def body_from_json(obj, path=""):
    """Build a body from a parsed JSON object."""
    if not isinstance(obj, dict):
        raise BodySpecError(path or "/", "body must be a JSON object")
    fam = obj.get("family")
    if not isinstance(fam, str):
        raise BodySpecError(f"{path}/family", "missing or non-string family")
    fam = fam.lower()
    if fam == "halfspace":
        n = _vec(obj, "normal", path)
        _nonzero(n, f"{path}/normal")
        return HalfSpace(n, _num(obj, "offset", path, 0.0))
    if fam == "slab":
        n = _nonzero(_vec(obj, "normal", path), f"{path}/normal")
        lo, hi = _num(obj, "lo", path), _num(obj, "hi", path)
        if not lo < hi:
            raise BodySpecError(f"{path}/hi", "slab requires lo < hi")
        return Slab(n, lo, hi)
    if fam == "polycone":
        apex = _vec(obj, "apex", path)
        facets = obj.get("facets")
        if not isinstance(facets, list) or not facets:
            raise BodySpecError(f"{path}/facets", "facet list must be non-empty")
        normals = []
        for i, f in enumerate(facets):
            fp = f"{path}/facets/{i}"
            n = _vec(f, "normal", fp) if isinstance(f, dict) else _vec({"n": f}, "n", fp)
            if len(n) != len(apex):
                raise BodySpecError(fp, f"expected {len(apex)} components")
            normals.append(_nonzero(n, fp))
        return PolyCone(apex, np.array(normals))
    if fam == "polytope":
        return _polytope(obj, path)
    if fam == "fullspace":
        dim = obj.get("dim", 3)
        if not isinstance(dim, int) or dim < 1:
            raise BodySpecError(f"{path}/dim", "dim must be a positive integer")
        return FullSpace(dim)
    if fam == "ball":
        c = _vec(obj, "center", path)
        r = _num(obj, "radius", path)
        if r <= 0:
            raise BodySpecError(f"{path}/radius", "radius must be positive")
        return Ball(c, r)
    if fam == "revolution":
        dim = obj.get("dim", 3)
        if not isinstance(dim, int) or dim < 2:
            raise BodySpecError(f"{path}/dim", "dim must be an integer >= 2")
        prof = _profile.from_json(obj.get("profile"), f"{path}/profile")
        shift, scale = _placement(obj, path, dim)
        return RevolutionBody(prof, dim, shift, scale)
    if fam == "power":
        a = _num(obj, "a", path)
        shift, scale = _placement(obj, path, 3)
        return PowerBody(a, shift, scale)
    if fam == "product":
        sec = body_from_json(obj.get("section"), f"{path}/section")
        free = obj.get("free_dims", 1)
        if not isinstance(free, int) or free < 1:
            raise BodySpecError(f"{path}/free_dims", "free_dims must be a positive integer")
        if not getattr(sec, "bounded", False):
            raise BodySpecError(f"{path}/section", "product section must be bounded")
        return Product(sec, free)
    if fam == "cylbounded":
        sec_obj = obj.get("section")
        if not isinstance(sec_obj, dict):
            raise BodySpecError(f"{path}/section", "expected a polytope object")
        K = _polytope(sec_obj, f"{path}/section")
        if not K.bounded:
            raise BodySpecError(f"{path}/section", "section must be a bounded polytope")
        height = _profile.from_json(obj.get("height"), f"{path}/height")
        shift, scale = _placement(obj, path, K.dim + 1)
        return CylBounded(K, height, shift, scale)
    if fam == "exenvelope":
        levels = obj.get("levels", 21)
        if not isinstance(levels, int) or levels < 1:
            raise BodySpecError(f"{path}/levels", "levels must be a positive integer")
        extra = obj.get("extra_x", [])
        if not isinstance(extra, list) or any(not isinstance(x, (int, float)) or x <= 1 for x in extra):
            raise BodySpecError(f"{path}/extra_x", "extra_x must be a list of numbers > 1")
        shift, scale = _placement(obj, path, 3)
        return ExEnvelope(levels, extra, shift, scale)
    if fam == "intersection":
        parts = obj.get("parts")
        if not isinstance(parts, list) or not parts:
            raise BodySpecError(f"{path}/parts", "expected a non-empty list of bodies")
        return Intersection([body_from_json(p, f"{path}/parts/{i}") for i, p in enumerate(parts)])
    if fam == "ballcut":
        inner = body_from_json(obj.get("body"), f"{path}/body")
        return BallCut(inner, _vec(obj, "center", path, inner.dim), _num(obj, "radius", path))
    raise BodySpecError(f"{path}/family", f"unknown family {fam!r}")


def load_body(path):
    """Load a body from a JSON file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise BodySpecError("/", f"cannot read {path}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BodySpecError("/", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return body_from_json(obj)


def body_hash(body) -> str:
    """SHA-256 of the canonical JSON form of a body."""
    return hashlib.sha256(body.fingerprint().encode()).hexdigest()
