import math

import numpy as np
import pytest

from isoprof.bodies import HalfSpace, PolyCone, PowerBody
from isoprof.dimension import (DimensionFit, W_closed_form, fit_dimension, power_body_dimension,
                               profile_exponent_fit)
from isoprof.errors import RangeError
from isoprof.growth import CenterConfig, GrowthTable, b_table
from isoprof.measure import MCEstimate
from isoprof.profiles import ProfileBracket


def _table(radii, values):
    vals = [MCEstimate(float(v), 0.0, 0, True) for v in values]
    return GrowthTable(np.asarray(radii, dtype=float), vals, 3)


def test_pure_power_law_recovers_exponent():
    r = np.geomspace(1, 100, 20)
    fit = fit_dimension(_table(r, 3.7 * r ** 2.4))
    assert isinstance(fit, DimensionFit)
    assert fit.m == pytest.approx(2.4, abs=1e-12) and fit.residual < 1e-12
    assert fit.window == pytest.approx((10.0, 100.0))


def test_fit_is_scale_invariant():
    r = np.geomspace(1, 1000, 19)
    table = b_table(PowerBody(2.0), r)
    scaled = b_table(PowerBody(2.0).scale(3.0), 3 * r, CenterConfig(count=8))
    assert abs(fit_dimension(table).m - fit_dimension(scaled).m) <= 0.02


def test_fit_rejects_bad_tables():
    r = np.geomspace(1, 100, 20)
    with pytest.raises(RangeError):
        fit_dimension(_table(r, r[::-1]))
    with pytest.raises(RangeError):
        fit_dimension(_table(r[:4], r[:4] ** 3))
    with pytest.raises(RangeError):
        fit_dimension(_table(r, r ** 3), window=(200.0, 300.0))


def test_power_body_dimension_and_W():
    assert power_body_dimension(1.5) == pytest.approx(3.5 / 1.5)
    for bad in (1.0, 2.5):
        with pytest.raises(RangeError):
            power_body_dimension(bad)
    assert W_closed_form(2.0, 1.0, 2.0) == pytest.approx((4.0 - 1.0) / 2.0)
    with pytest.raises(RangeError):
        W_closed_form(2.0, 2.0, 1.0)


def _bracket_from(volumes, lower, upper):
    v = np.asarray(volumes, dtype=float)
    return ProfileBracket(v, np.asarray(lower), [], np.asarray(upper), np.zeros_like(v), [], 3)


def test_profile_exponent_of_cone_is_two_thirds():
    from isoprof.profiles import cone_profile
    v = np.geomspace(0.1, 100, 8)
    iv = cone_profile(math.pi / 2, 3, v)
    lo, up = profile_exponent_fit(_bracket_from(v, iv / 10, iv))
    assert up.beta == pytest.approx(2 / 3, abs=1e-12) and up.m == pytest.approx(3.0)
    assert lo.beta == pytest.approx(2 / 3, abs=1e-12)


def test_profile_exponent_of_paraboloid_from_lower_bound():
    # lower bound is v / phi(v) up to constants, so its slope is 1 - 1/beta with beta = 2
    v = np.geomspace(1, 1e4, 10)
    lower = v / np.sqrt(v)
    lo, _ = profile_exponent_fit(_bracket_from(v, lower, 2 * lower))
    assert 0.4 <= lo.beta <= 0.6 and lo.m == pytest.approx(2.0)


def test_half_space_growth_dimension():
    fit = fit_dimension(b_table(HalfSpace([0, 0, 1.0], 0.0), np.geomspace(1, 1000, 25)))
    assert fit.m == pytest.approx(3.0, abs=1e-9)


def _real_bracket(body, volumes):
    from isoprof.measure import MCConfig
    from isoprof.profiles import UpperConfig, profile_bracket
    return profile_bracket(body, volumes, MCConfig(samples=20_000), ucfg=UpperConfig(count=8),
                           centers=CenterConfig(count=8))


def test_octant_bracket_slopes_are_two_thirds():
    v = np.geomspace(1, 1e4, 9)
    lo, up = profile_exponent_fit(_real_bracket(PolyCone(np.zeros(3), np.eye(3)), v), window=(1, 1e4))
    assert lo.beta == pytest.approx(2 / 3, abs=0.05) and up.beta == pytest.approx(2 / 3, abs=0.05)


def test_paraboloid_bracket_slopes_near_one_half():
    v = np.geomspace(1, 1e4, 5)
    lo, up = profile_exponent_fit(_real_bracket(PowerBody(2.0), v), window=(1, 1e4))
    assert 0.4 <= lo.beta <= 0.6 and 0.4 <= up.beta <= 0.6
