import json
import math

import numpy as np
import pytest

from isoprof.bodies import (Ball, CylBounded, ExEnvelope, FullSpace, HalfSpace, PolyCone, Polytope,
                            PowerBody, Product, Slab, asymptotic_cone, asymptotic_cylinders,
                            body_from_json, body_hash, envelope_planes, ex_wedge, is_boundary,
                            is_cone, load_body, tangent_cone)
from isoprof.bodies import profile as prof
from isoprof.bodies.families import BallCut, Flat, Ray
from isoprof.errors import BodySpecError, DimensionError, NoClosedFormError

SQUARE = Polytope.box([-1.0, -1.0], [1.0, 1.0])


def test_halfspace_oracles():
    H = HalfSpace([0, 0, 2], 1.0)           # z >= 0.5 after normalization
    assert H.contains([0, 0, 0.5]) and not H.contains([0, 0, 0.49])
    assert np.allclose(H.project([1, 2, -1]), [1, 2, 0.5])
    assert H.distance([0, 0, -0.5]) == pytest.approx(1.0)
    assert H.depth([0, 0, 3]) == pytest.approx(2.5)
    t = H.raycast(np.array([0, 0, 1.5]), [[0, 0, -1], [1, 0, 0]])
    assert t[0] == pytest.approx(1.0) and np.isinf(t[1])


def test_normals_are_unit():
    P = Polytope([[3, 4, 0], [0, 0, 5]], [5, 0])
    assert np.allclose(np.linalg.norm(P.A, axis=1), 1.0, atol=1e-12)
    assert P.b[0] == pytest.approx(1.0)


def test_cube_projection_volume_and_box():
    C = Polytope.box([0, 0, 0], [1, 1, 1])
    assert C.bounded
    assert np.allclose(C.project([2, 0.5, -1]), [1, 0.5, 0])
    assert C.volume() == pytest.approx(1.0)
    lo, hi = C.bounding_box()
    assert np.allclose(lo, 0) and np.allclose(hi, 1)


def test_projection_is_nearest_point_on_random_polytope():
    rng = np.random.default_rng(0)
    N = rng.standard_normal((7, 3))
    P = Polytope(N, -np.ones(7))
    Y = 3 * rng.standard_normal((50, 3))
    X = P.project(Y)
    assert np.all(P.contains(X))
    # variational inequality of the projection: (y - x).(z - x) <= 0 for z in C
    Z = P.project(3 * rng.standard_normal((200, 3)))
    lhs = np.einsum("ik,jk->ij", Y - X, Z) - np.einsum("ik,ik->i", Y - X, X)[:, None]
    assert lhs.max() <= 1e-7


def test_power_body_oracles():
    C = PowerBody(2.0)
    assert C.contains([1, 0, 1]) and not C.contains([1, 0, 0.99])
    assert C.depth([0, 0, 1]) == pytest.approx(math.sqrt(3) / 2, rel=1e-6)
    # ray straight up from the apex never leaves
    assert np.isinf(C.raycast(np.zeros(3), [[0, 0, 1]])[0])
    # exit of a horizontal ray from (0, 0, 4): |x| = 2
    assert C.raycast(np.array([0, 0, 4.0]), [[1, 0, 0]])[0] == pytest.approx(2.0, rel=1e-10)
    x = C.project([3.0, 0.0, 0.0])
    assert C.contains(x) and x[2] == pytest.approx(x[0] ** 2, abs=1e-9)


def test_cylbounded_projection_and_section_area():
    B = CylBounded(SQUARE, prof.power(2.0))
    assert np.allclose(B.project([2, 2, -1]), [0.5, 0.5, 0.5], atol=1e-6)
    assert B.section_area() == pytest.approx(4.0)
    assert not B.bounded


def test_scale_and_translate_commute_with_membership():
    rng = np.random.default_rng(1)
    for body in (PowerBody(1.5), CylBounded(SQUARE, prof.power(2.0)), PolyCone(np.zeros(3), np.eye(3))):
        v = rng.standard_normal(3)
        T = body.scale(2.0).translate(v)
        X = 3 * rng.standard_normal((200, 3))
        assert np.array_equal(T.contains(2.0 * X + v), body.contains(X))


def test_fingerprint_equality_and_hash():
    a = HalfSpace([0, 0, 1], 0.0)
    b = HalfSpace([0, 0, 2], -0.0)
    assert a == b and hash(a) == hash(b)
    assert body_hash(a) == body_hash(b)
    assert len(body_hash(a)) == 64


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        HalfSpace([0, 0, 1]).contains([0, 0])


def test_tangent_cones():
    H = HalfSpace([0, 0, 1], 0.0)
    assert isinstance(tangent_cone(H, [1, 2, 0]), HalfSpace)
    O = PolyCone(np.zeros(3), np.eye(3))
    cone = tangent_cone(O, [0, 0, 0])
    assert isinstance(cone, PolyCone) and cone.is_orthant
    edge = tangent_cone(Polytope.box([0, 0, 0], [1, 1, 1]), [0, 0, 0.5])
    assert edge.normals.shape[0] == 2
    assert isinstance(tangent_cone(PowerBody(2.0), [0, 0, 0]), HalfSpace)
    with pytest.raises(NoClosedFormError):
        tangent_cone(ExEnvelope(), [0, 0, 0])


def test_is_boundary():
    H = HalfSpace([0, 0, 1], 0.0)
    assert is_boundary(H, [3, 4, 0])
    assert not is_boundary(H, [0, 0, 1])


def test_asymptotic_cones():
    assert is_cone(asymptotic_cone(HalfSpace([0, 0, 1], 2.0)))
    assert isinstance(asymptotic_cone(Slab([0, 0, 1], 0, 1)), Flat)
    assert isinstance(asymptotic_cone(PowerBody(2.0)), Ray)
    assert isinstance(asymptotic_cone(CylBounded(SQUARE, prof.power(2.0))), Ray)
    shifted = PolyCone([1, 2, 3], np.eye(3))
    cone = asymptotic_cone(shifted)
    assert np.allclose(cone.apex, 0) and not cone.degenerate


def test_asymptotic_cylinders():
    rep = asymptotic_cylinders(CylBounded(SQUARE, prof.power(2.0)))
    assert not rep.degenerate and isinstance(rep.cylinders[0], Product)
    assert asymptotic_cylinders(ExEnvelope()).degenerate
    rev = asymptotic_cylinders(PowerBody(2.0))
    assert any(isinstance(c, FullSpace) for c in rev.cylinders)


def test_envelope_planes_support_the_envelope():
    E = ExEnvelope()
    for x in (2.0, 5.0, 17.0):
        p, q, t1, t2, (n1, b1), (n2, b2) = envelope_planes(x)
        assert n1 @ p == pytest.approx(b1) and n2 @ p == pytest.approx(b2)
        assert n1 @ q == pytest.approx(b1) and n1 @ t1 == pytest.approx(b1, abs=1e-12)
        assert n2 @ t2 == pytest.approx(b2, abs=1e-12)
        assert b1 <= 0 and b2 <= 0          # origin inside

def test_envelope_projection_lands_in_wedge():
    E = ExEnvelope(extra_x=(10.0,))
    W = ex_wedge(10.0)
    Y = 5 * np.random.default_rng(2).standard_normal((200, 3))
    X = E.project(Y)
    assert np.all(E.contains(X)) and np.all(W.contains(X))
    # variational inequality against sampled interior points
    Z = 20 * np.random.default_rng(3).random((20000, 3)) - [5, 10, 0]
    Z = Z[E.contains(Z)]
    lhs = (Y - X) @ Z.T - np.einsum("ik,ik->i", Y - X, X)[:, None]
    assert lhs.max() <= 1e-7


def test_json_roundtrip_and_errors(tmp_path):
    spec = {"family": "cylbounded", "section": {"family": "polytope", "box": {"lo": [-1, -1], "hi": [1, 1]}},
            "height": {"power": 2}, "shift": [0, 0, 1]}
    body = body_from_json(spec)
    again = body_from_json(json.loads(json.dumps(body.to_json())))
    assert body == again
    f = tmp_path / "b.json"
    f.write_text(json.dumps({"family": "power", "a": 1.5}))
    assert isinstance(load_body(f), PowerBody)
    with pytest.raises(BodySpecError) as exc:
        body_from_json({"family": "slab", "normal": [0, 0, 1], "lo": 1, "hi": 0})
    assert exc.value.path == "/hi"
    with pytest.raises(BodySpecError) as exc:
        body_from_json({"family": "product", "section": {"family": "halfspace", "normal": [1, "a"]}})
    assert exc.value.path == "/section/normal/1"
    with pytest.raises(BodySpecError):
        body_from_json({"family": "teapot"})


def test_ballcut_projection_stays_in_both():
    C = BallCut(HalfSpace([0, 0, 1], 0.0), np.zeros(3), 1.0)
    X = C.project(np.array([[3.0, 0, -2], [0, 0, 5], [0.2, 0.1, 0.3]]))
    assert np.all(C.contains(X))
    assert np.allclose(X[1], [0, 0, 1]) and np.allclose(X[2], [0.2, 0.1, 0.3])
    assert C.bounded and Ball([0, 0, 0], 2).bounded
