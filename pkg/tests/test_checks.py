import numpy as np
import pytest

from isoprof.bodies import HalfSpace, PowerBody
from isoprof.checks import (CheckReport, check_bm_concavity, check_doubling, check_ex_degeneracy,
                            check_hausdorff_lemmas, check_inradius_lipschitz, check_profile_chain,
                            margin, polytope_hausdorff, random_polytope, run_suite, standard_suite)
from isoprof.bodies.families import Polytope
from isoprof.measure import MCConfig

CFG = MCConfig(samples=20_000)


def test_margin_uses_three_sigma_and_absolute_floor():
    assert margin(1.0, 1.0) == pytest.approx(-1e-9)
    assert margin(1.3, 1.0, 0.1, 0.0) < 0 < margin(1.31, 1.0, 0.1, 0.0)


def test_report_pass_flag():
    ok = CheckReport("x", "b", 3, 0, -1.0, "tol", 7, [])
    assert ok.passed and not CheckReport("x", "b", 3, 1, 0.5, "tol", 7, []).passed


def test_polytope_hausdorff_of_nested_squares():
    A = Polytope.box([-1, -1], [1, 1])
    B = Polytope.box([-2, -2], [2, 2])
    assert polytope_hausdorff(A, B) == pytest.approx(np.sqrt(2))
    P = random_polytope(np.random.default_rng(0))
    assert P.contains(np.zeros(2)) and polytope_hausdorff(P, P) == 0.0


@pytest.mark.parametrize("check", [check_doubling, check_bm_concavity])
def test_ball_checks_pass_on_power_body(check):
    rep = check(PowerBody(1.5), trials=5, cfg=CFG, seed=1)
    assert rep.trials == 5 and rep.passed


def test_doubling_is_deterministic():
    a = check_doubling(HalfSpace([0, 0, 1.0], 0.0), trials=4, cfg=CFG, seed=3)
    b = check_doubling(HalfSpace([0, 0, 1.0], 0.0), trials=4, cfg=CFG, seed=3)
    assert a == b


def test_hausdorff_and_inradius_checks():
    assert check_hausdorff_lemmas(trials=4, cfg=CFG, seed=2).passed
    assert check_inradius_lipschitz(trials=4, seed=2, cfg=CFG).passed


def test_profile_chain_on_half_space():
    from isoprof.growth import CenterConfig
    from isoprof.profiles import UpperConfig
    rep = check_profile_chain(HalfSpace([0, 0, 1.0], 0.0), volumes=(1.0,), cfg=CFG,
                              ucfg=UpperConfig(count=4), centers=CenterConfig(count=4))
    assert rep.passed


def test_degeneracy_report_shape():
    rep = check_ex_degeneracy((3.0, 30.0), cfg=MCConfig(samples=50_000, shortcuts=False))
    assert len(rep.alpha) == len(rep.upper) == 2
    assert rep.alpha[0] > rep.alpha[1] and rep.upper[0] > rep.upper[1]


def test_suite_registry_and_unknown_names():
    assert {"halfspace", "octant", "exenvelope"} <= set(standard_suite())
    with pytest.raises(ValueError):
        run_suite(["nonsense"], trials=1)
