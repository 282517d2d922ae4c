import math

import numpy as np
import pytest

from isoprof.bodies import ExEnvelope, HalfSpace, PolyCone, PowerBody, Slab
from isoprof.errors import DegenerateError
from isoprof.growth import CenterConfig, ReciprocalFn
from isoprof.measure import MCConfig, SolidAngle
from isoprof.profiles import (LOWER_DOUBLE, UpperConfig, cone_profile, half_space_profile,
                              icmin_profile, lower_bound, profile_bracket, upper_bound,
                              upper_bound_at)

H = HalfSpace([0.0, 0.0, 1.0], 0.0)
OCT = PolyCone(np.zeros(3), np.eye(3))


def test_cone_profile_closed_forms():
    # half-ball of volume v: radius (3v/2pi)^(1/3), flat disk excluded
    v = 2.0
    r = (3 * v / (2 * math.pi)) ** (1 / 3)
    assert half_space_profile(3, v) == pytest.approx(2 * math.pi * r * r, rel=1e-13)
    assert cone_profile(SolidAngle(math.pi / 2, 0.0, 3, True), 3, v) == pytest.approx(
        cone_profile(math.pi / 2, 3, v))
    with pytest.raises(ValueError):
        cone_profile(5 * math.pi, 3, 1.0)
    with pytest.raises(ValueError):
        cone_profile(math.pi, 3, 0.0)


def test_lower_bound_picks_the_larger_branch():
    rec = ReciprocalFn.half_space(3)
    vals, tags = lower_bound(rec, 3, np.array([0.5, 1.0, 8.0]))
    a = 8.0 ** -3 * np.array([0.5, 1.0, 8.0]) / rec(np.array([1.0, 2.0, 16.0]))
    assert np.allclose(vals, a) and tags == [LOWER_DOUBLE] * 3


def test_upper_bound_of_half_space_is_its_profile():
    v = np.array([0.1, 1.0, 10.0])
    ub = upper_bound(H, v, UpperConfig(count=8))
    assert np.allclose(ub.values, half_space_profile(3, v), rtol=1e-12)
    assert len(ub.witnesses) == 3


def test_upper_bound_at_decreases_along_the_envelope():
    env = ExEnvelope()
    vals = [upper_bound_at(env, env.parabola_point(x), [1.0], MCConfig(samples=20_000)).values[0]
            for x in (3.0, 30.0)]
    assert vals[1] < vals[0]


def test_icmin_uses_smallest_tangent_cone():
    r = icmin_profile(OCT, [1.0, 8.0])
    assert r.alpha.value == pytest.approx(math.pi / 2)
    assert r.values[1] / r.values[0] == pytest.approx(4.0)
    with pytest.raises(DegenerateError):
        icmin_profile(ExEnvelope(), 1.0)


def test_slab_icmin_comes_from_edge_free_boundary():
    r = icmin_profile(Slab([0, 0, 1], 0.0, 1.0), 1.0)
    assert r.alpha.value == pytest.approx(2 * math.pi)


def test_bracket_is_ordered_and_flags_rigidity_on_cones():
    br = profile_bracket(OCT, [0.1, 1.0], MCConfig(samples=20_000), ucfg=UpperConfig(count=8),
                         centers=CenterConfig(count=8))
    assert np.all(br.lower <= br.upper)
    assert br.asymptotic_alpha.value == pytest.approx(math.pi / 2)
    assert all(br.rigidity)


def test_power_body_bracket_has_no_rigidity_flag():
    br = profile_bracket(PowerBody(2.0), [1.0], MCConfig(samples=20_000), ucfg=UpperConfig(count=8),
                         centers=CenterConfig(count=8))
    assert br.lower[0] <= br.upper[0] and br.rigidity == []


def test_cone_profile_normalized_monotonicity_and_concavity():
    # I(v)/v^(n/d) is constant on a cone and I^(d/n) is linear, hence concave
    v = np.geomspace(1e-3, 1e3, 25)
    iv = cone_profile(math.pi / 2, 3, v)
    assert np.allclose(iv / v ** (2 / 3), iv[0] / v[0] ** (2 / 3), rtol=1e-12)
    y = iv ** 1.5
    assert np.allclose(np.diff(y) / np.diff(v), (y[1] - y[0]) / (v[1] - v[0]), rtol=1e-9)
