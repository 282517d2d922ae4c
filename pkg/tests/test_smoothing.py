import numpy as np
import pytest

from isoprof.bodies import HalfSpace, PolyCone, Slab
from isoprof.smoothing import (MollifierCfg, bump, bump_constant, check_sandwich, in_smoothed,
                               mollified_distance, _nodes)

H = HalfSpace([0.0, 0.0, 1.0], 0.0)
CFG = MollifierCfg(0.1)


def test_bump_support_and_normalisation():
    assert bump(np.array([1.0, 1.5]))[0] == 0.0
    assert bump(np.array(0.0)) == pytest.approx(np.exp(-1.0))
    for d in (2, 3):
        U, W = _nodes(d, 24, 12, 24, 100_000, 0)
        assert W.sum() == pytest.approx(1.0) and np.all(W >= 0)
        assert np.all(np.linalg.norm(U, axis=1) < 1.0)
    assert bump_constant(3) > bump_constant(2) > 0


def test_epsilon_must_be_positive():
    with pytest.raises(ValueError):
        MollifierCfg(0.0)


def test_half_space_value_on_boundary_and_far_away():
    # on the boundary only the lower half of the kernel sees positive distance
    g0 = mollified_distance(H, [0, 0, 0], CFG)
    assert 0 < g0 < CFG.epsilon
    # away from the boundary the average of an affine function is its centre value
    assert mollified_distance(H, [0, 0, -2.0], CFG) == pytest.approx(2.0, rel=1e-12)
    assert mollified_distance(H, [0, 0, 2.0], CFG) == 0.0


def test_translation_equivariance():
    v = np.array([0.3, -1.2, 0.7])
    X = np.random.default_rng(0).uniform(-1, 1, (20, 3))
    a = mollified_distance(Slab([0, 0, 1], 0.0, 1.0), X, CFG)
    b = mollified_distance(Slab([0, 0, 1], 0.0, 1.0).translate(v), X + v, CFG)
    assert np.allclose(a, b, atol=1e-12)


def test_one_lipschitz_and_monotone_in_the_body():
    rng = np.random.default_rng(1)
    X, Y = rng.uniform(-1, 1, (50, 3)), rng.uniform(-1, 1, (50, 3))
    octant = PolyCone(np.zeros(3), np.eye(3))
    gx, gy = mollified_distance(octant, X, CFG), mollified_distance(octant, Y, CFG)
    assert np.all(np.abs(gx - gy) <= np.linalg.norm(X - Y, axis=1) + 1e-12)
    # octant is inside the half-space x3 >= 0, so its distance is larger
    assert np.all(gx >= mollified_distance(H, X, CFG) - 1e-12)


def test_in_smoothed_and_sandwich():
    assert in_smoothed(H, 0.1, [0, 0, 0])
    assert not in_smoothed(H, 0.1, [0, 0, -0.5])
    rep = check_sandwich(H, 0.1, samples=500, seed=3)
    assert rep.samples == 500 and rep.violations == 0 and rep.worst_margin <= 0
