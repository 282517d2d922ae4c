import math

import numpy as np
import pytest
from scipy.integrate import quad

from isoprof.bodies import Ball, CylBounded, FullSpace, HalfSpace, PolyCone, Polytope, PowerBody, Slab, ex_wedge
from isoprof.bodies import profile as prof
from isoprof.bodies.families import BallCut
from isoprof.errors import EmptyWindowError, NotAConeError, UnboundedBodyError
from isoprof.measure import (BallProbe, MCConfig, ball_relative_perimeter, ball_volume, hausdorff,
                             inradius, make_probe, solid_angle, unit_ball_volume)

H = HalfSpace([0.0, 0.0, 1.0], 0.0)
OCT = PolyCone(np.zeros(3), np.eye(3))
MC = MCConfig(shortcuts=False)


def test_half_space_volume_shortcut_and_sampled():
    assert ball_volume(H, [0, 0, 0], 1.0).value == pytest.approx(2 * math.pi / 3, rel=1e-14)
    est = ball_volume(H, [0, 0, 0], 1.0, MC)
    assert abs(est.value - 2 * math.pi / 3) <= 3 * est.std_error


def test_full_space_exact():
    est = ball_volume(FullSpace(3), np.zeros(3), 2.0)
    assert est.exact and est.value == pytest.approx(32 * math.pi / 3, rel=1e-14)


def test_slab_cap_shortcut_matches_sampling():
    S = Slab([0, 0, 1], 0.0, 1.0)
    x = np.array([0.0, 0.0, 0.3])
    exact = ball_volume(S, x, 1.5)
    est = ball_volume(S, x, 1.5, MC)
    assert exact.exact
    assert abs(est.value - exact.value) <= 3 * est.std_error


def test_power_apex_volume_against_quadrature():
    # |B(apex, 1)| = 2 pi int_0^1 s^2 (1 - f(x(s))/s) ds, with f(x)=x^2 and s^2 = x^2 + x^4
    def integrand(s):
        x2 = (-1 + math.sqrt(1 + 4 * s * s)) / 2
        return s * s * (1 - x2 / s)
    ref = 2 * math.pi * quad(integrand, 0, 1, epsabs=0, epsrel=1e-12)[0]
    est = ball_volume(PowerBody(2.0), np.zeros(3), 1.0, MC)
    assert abs(est.value - ref) <= 3 * est.std_error
    assert ref <= unit_ball_volume(3) / 2


def test_perimeters():
    assert ball_relative_perimeter(H, np.zeros(3), 1.0).value == pytest.approx(2 * math.pi)
    assert ball_relative_perimeter(OCT, np.zeros(3), 1.0).value == pytest.approx(math.pi / 2)
    est = ball_relative_perimeter(OCT, np.zeros(3), 2.0, MC)
    assert abs(est.value - 4 * math.pi / 2) <= 3 * est.std_error


def test_reproducible_and_thread_independent(monkeypatch):
    body = PowerBody(1.5)
    x = np.array([0.5, 0.2, 1.0])
    monkeypatch.setenv("ISOPROF_THREADS", "1")
    a = ball_volume(body, x, 1.3, MCConfig(samples=50_000, seed=11))
    monkeypatch.setenv("ISOPROF_THREADS", "4")
    b = ball_volume(body, x, 1.3, MCConfig(samples=50_000, seed=11))
    assert a == b


def test_probe_agrees_with_direct_sampling_and_is_monotone():
    body = PowerBody(2.0)
    x = np.array([1.0, 0.0, 1.0])
    probe = BallProbe(body, x, MCConfig())
    vols = [probe.volume(r).value for r in np.linspace(0.2, 3, 15)]
    assert np.all(np.diff(vols) >= 0)
    direct = ball_volume(body, x, 1.0, MCConfig(seed=3))
    pv = probe.volume(1.0)
    assert abs(direct.value - pv.value) <= 3 * math.hypot(direct.std_error, pv.std_error)
    r = probe.radius_for_volume(2.0)
    assert probe.volume(r).value >= 2.0 > probe.volume(r * (1 - 1e-6)).value


def test_thin_body_uses_clipped_box_at_large_radius():
    body = CylBounded(Polytope.box([-1, -1], [1, 1]), prof.power(2.0))
    apex = np.zeros(3)
    est = ball_volume(body, apex, 200.0)
    # K x [0, r] minus the region under t = |z|^2: 4 r - 8/3
    assert abs(est.value - (4 * 200 - 8 / 3)) <= 3 * est.std_error
    assert est.std_error / est.value < 0.02
    probe = make_probe(body, apex)
    pv = probe.volume(200.0)
    assert abs(pv.value - (4 * 200 - 8 / 3)) <= 3 * pv.std_error


def test_solid_angles():
    assert solid_angle(H).value == pytest.approx(2 * math.pi, rel=1e-15)
    assert solid_angle(OCT).value == pytest.approx(math.pi / 2, rel=1e-15)
    assert solid_angle(FullSpace(3)).value == pytest.approx(4 * math.pi)
    w10, w100 = solid_angle(ex_wedge(10.0), MC), solid_angle(ex_wedge(100.0), MC)
    assert w10.value - w100.value > 3 * math.hypot(w10.std_error, w100.std_error)
    # two-facet wedge: exact dihedral formula against sampling
    W = ex_wedge(10.0)
    exact = solid_angle(W)
    assert exact.exact and abs(exact.value - w10.value) <= 3 * w10.std_error
    with pytest.raises(NotAConeError):
        solid_angle(PowerBody(2.0))


def test_round_cone_solid_angle():
    # t >= k |z| has solid angle 2 pi (1 - k / sqrt(1 + k^2))
    from isoprof.bodies import RevolutionBody
    k = 1.5
    C = RevolutionBody(prof.linear(k))
    exact = solid_angle(C)
    assert exact.value == pytest.approx(2 * math.pi * (1 - k / math.sqrt(1 + k * k)), rel=1e-12)
    est = solid_angle(C, MC)
    assert abs(est.value - exact.value) <= 3 * est.std_error


def test_inradius():
    assert inradius(Polytope.box([0, 0, 0], [1, 1, 1])).value == pytest.approx(0.5)
    assert inradius(Ball([0, 0, 0], 2.0)).value == 2.0
    assert inradius(BallCut(H, np.zeros(3), 1.0)).value == pytest.approx(0.5, abs=1e-6)
    with pytest.raises(UnboundedBodyError):
        inradius(H)


def test_hausdorff_examples():
    h = hausdorff(Ball([0, 0, 0], 1.0), Ball([0, 0, 0], 2.0), 3.0)
    assert h.value == pytest.approx(1.0, abs=1e-6)
    assert hausdorff(H, H, 2.0).value == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(EmptyWindowError):
        hausdorff(Ball([10, 0, 0], 1.0), H, 2.0)
