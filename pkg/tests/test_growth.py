import math

import numpy as np
import pytest

from isoprof.bodies import CylBounded, HalfSpace, PolyCone, Polytope, PowerBody, is_boundary
from isoprof.bodies import profile as prof
from isoprof.errors import RangeError
from isoprof.growth import (CenterConfig, GrowthSampler, ReciprocalFn, V_revolution, b_table,
                            boundary_cloud, constants, g_range_on, phi, revolution_r0,
                            revolution_sandwich)
from isoprof.growth import _concave_majorant
from isoprof.measure import MCConfig, ball_volume

H = HalfSpace([0.0, 0.0, 1.0], 0.0)


def test_half_space_table_is_certified_and_exact():
    r = np.array([0.5, 1.0, 2.0])
    t = b_table(H, r)
    assert t.certified
    assert np.allclose(t.b, 2 * math.pi / 3 * r ** 3, rtol=1e-14)


def test_phi_inverts_closed_form_and_table():
    v = 2 * math.pi / 3
    assert phi(ReciprocalFn.half_space(3), v) == pytest.approx(1.0, abs=1e-9)
    assert phi(b_table(H, [0.5, 1.0, 2.0]), v) == pytest.approx(1.0, abs=1e-9)
    assert phi(lambda r: r ** 2, 9.0) == pytest.approx(3.0, abs=1e-9)
    with pytest.raises(ValueError):
        phi(lambda r: r, 0.0)


def test_phi_refuses_volumes_past_a_flat_table():
    table = b_table(H, [1.0, 2.0])
    rec = ReciprocalFn(table.V, max_radius=2.0)
    with pytest.raises(RangeError):
        rec(1e6)


def test_concave_majorant_through_origin():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    y = np.array([1.0, 1.2, 2.5, 2.6])
    m = _concave_majorant(x, y)
    assert np.all(m >= y - 1e-15)
    slopes = np.diff(np.concatenate([[0.0], m])) / np.diff(np.concatenate([[0.0], x]))
    assert np.all(np.diff(slopes) <= 1e-12)
    assert np.allclose(_concave_majorant(x, np.sqrt(x)), np.sqrt(x))


def test_boundary_cloud_lies_on_boundary():
    body = PolyCone(np.zeros(3), np.eye(3))
    pts = boundary_cloud(body, 32, 3.0, seed=1)
    assert pts.shape == (32, 3)
    assert all(is_boundary(body, p) for p in pts)


def test_sampled_table_is_an_upper_bound_for_octant():
    octant = PolyCone(np.zeros(3), np.eye(3))
    t = b_table(octant, [0.5, 1.0], CenterConfig(count=16), MCConfig(samples=20_000))
    exact = math.pi / 6 * np.array([0.5, 1.0]) ** 3       # apex ball
    assert np.all(t.b - 3 * t.sigma <= exact * (1 + 1e-12))
    assert np.all(np.abs(t.b - exact) <= 3 * t.sigma + 1e-12)


def test_sampler_reuses_probes_and_stays_monotone():
    body = CylBounded(Polytope.box([-1, -1], [1, 1]), prof.power(2.0))
    sampler = GrowthSampler(body, CenterConfig(count=8), MCConfig(samples=20_000), 8.0)
    t = sampler.table(np.geomspace(0.2, 8.0, 10))
    assert np.all(np.diff(t.root()) >= 0)
    assert t.concavity_adjustment() >= 0


def test_revolution_apex_volume_matches_sampling():
    body = PowerBody(2.0)
    est = ball_volume(body, np.zeros(3), 1.0, MCConfig(shortcuts=False))
    assert abs(V_revolution(body, 1.0) - est.value) <= 3 * est.std_error


def test_revolution_r0_and_weight_range():
    body = PowerBody(2.0)
    r0 = revolution_r0(body)
    assert r0 > 0
    lo, hi = g_range_on(body, r0, 4 * r0)
    assert 0 < lo <= hi <= 1
    rep = revolution_sandwich(body, 3 * r0, r0)
    assert rep.holds


def test_constants_of_half_space():
    c = constants(H, 1.0)
    assert c.b_r0.value == pytest.approx(2 * math.pi / 3)
    assert c.inradius_lb == pytest.approx(1 / 6)


def test_constants_with_c1_give_lambda():
    c = constants(H, 0.5, c1=2.0)
    assert c.b_1.value == pytest.approx(2 * math.pi / 3)
    assert c.Lambda > 0 and c.ell1 <= c.ell2


def test_phi_is_monotone_and_sub_doubling_on_paraboloid():
    table = b_table(PowerBody(2.0), np.geomspace(0.1, 100, 30))
    v = np.sort(np.random.default_rng(4).uniform(0.01, 1000, 40))
    p = phi(table, v)
    assert np.all(np.diff(p) >= 0)
    assert np.all(phi(table, 2 * v) <= 3 * p)
    assert np.all(phi(table, table.V(table.radii)) <= table.radii * (1 + 1e-9))


def test_cone_growth_exponent_is_ambient_dimension():
    from isoprof.dimension import fit_dimension
    octant = PolyCone(np.zeros(3), np.eye(3))
    t = b_table(octant, np.geomspace(1, 10, 8), CenterConfig(count=8), MCConfig(samples=20_000))
    assert fit_dimension(t).m == pytest.approx(3.0, rel=0.02)


def test_recession_growth_lower_bound():
    # b((2m+1) r0) >= (m+1) b(r0) along a recession direction
    body = CylBounded(Polytope.box([-1, -1], [1, 1]), prof.power(2.0))
    r0 = 0.5
    radii = [r0 * (2 * m + 1) for m in range(4)]
    t = b_table(body, radii, CenterConfig(count=8), MCConfig(samples=20_000))
    for m in range(1, 4):
        assert t.b[m] >= (m + 1) * t.b[0] - 3 * np.hypot(t.sigma[m], (m + 1) * t.sigma[0])


@pytest.mark.parametrize("r", [1.0, 2.0, 4.0])
def test_revolution_apex_volume_over_radii(r):
    body = PowerBody(2.0)
    est = ball_volume(body, np.zeros(3), r, MCConfig(shortcuts=False))
    assert abs(V_revolution(body, r) - est.value) <= 3 * est.std_error
