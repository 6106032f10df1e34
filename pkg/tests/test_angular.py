import math

import numpy as np
import pytest

from vc_twist.angular import (
    azimuthal_average,
    cone_geometry,
    delta_angle,
    delta_prime,
    final_electron,
    soft_geometry,
    weight_F,
    weight_F_from_delta,
)
from vc_twist.errors import OutsideOverlap
from vc_twist.kinematics import MediumModel, overlap_interval
from vc_twist.numerics import integrate_sqrt_singular

D = math.radians


def test_delta_matches_arccos():
    th, tg, t0 = D(30), D(30), D(30)
    ref = math.acos((math.cos(t0) - math.cos(tg) * math.cos(th)) / (math.sin(tg) * math.sin(th)))
    assert delta_angle(th, tg, t0) == pytest.approx(ref, rel=1e-14)
    assert math.cos(delta_angle(th, tg, t0)) == pytest.approx(0.4641016151377546)


def test_F_forms_agree():
    th, t0 = D(12), D(14.5)
    for tg in np.linspace(D(3), D(26), 9):
        assert weight_F(th, tg, t0) == pytest.approx(weight_F_from_delta(th, tg, t0), rel=1e-12)


def test_F_vectorised():
    out = weight_F(D(12), np.array([D(5), D(10)]), D(14.5))
    assert out.shape == (2,)


def test_F_normalization():
    th, t0 = D(20), D(35)
    val = integrate_sqrt_singular(lambda t: weight_F(th, t, t0) * np.sin(t), overlap_interval(th, t0))
    assert val == pytest.approx(1.0, abs=1e-12)


def test_F_symmetric_in_theta_theta0():
    assert weight_F(D(10), D(15), D(14)) == pytest.approx(weight_F(D(14), D(15), D(10)))


def test_outside_overlap():
    with pytest.raises(OutsideOverlap):
        delta_angle(D(10), D(30), D(14.5))
    with pytest.raises(OutsideOverlap):
        weight_F(D(10), D(30), D(14.5))


def test_delta_at_borders():
    th, t0 = D(12), D(14.5)
    assert delta_angle(th, D(2.5), t0) == pytest.approx(math.pi, abs=1e-6)
    assert delta_angle(th, D(26.5), t0) == pytest.approx(0.0, abs=1e-6)


def test_final_electron_momentum_conservation():
    p, th, d, k, tg = 1e6, D(10), 1.0, 2e5, D(20)
    pf, tp, dp, tkp = final_electron(p, th, d, k, tg)
    vec = pf * np.array([math.sin(tp) * math.cos(dp), math.sin(tp) * math.sin(dp), math.cos(tp)])
    pv = p * np.array([math.sin(th) * math.cos(d), math.sin(th) * math.sin(d), math.cos(th)])
    kv = k * np.array([math.sin(tg), 0.0, math.cos(tg)])
    assert np.allclose(vec, pv - kv, rtol=1e-12)
    # delta' reproduces theta_kp' through the same construction as delta
    assert delta_prime(tp, tg, tkp) == pytest.approx(dp, rel=1e-9)


def test_cone_geometry_consistency(e300):
    med = MediumModel.constant(1.8)
    g = cone_geometry(e300, 5e4, D(15), D(30), med)
    assert 0 <= g.delta <= math.pi and 0 <= g.delta_p <= math.pi
    assert g.F == pytest.approx(weight_F(D(15), D(30), g.theta0))


def test_azimuthal_average_two_point():
    g = soft_geometry(D(12), D(10), D(14.5))
    m = 3
    val = azimuthal_average(lambda phi, phip: np.exp(1j * m * phi), g)
    assert val == pytest.approx(math.cos(m * g.delta) * g.F)
