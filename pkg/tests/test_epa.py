import math

import pytest

from vc_twist.epa import (
    VirtualPhoton,
    epa_kinematics,
    epa_mean_helicity_reference,
    epa_pl_reference,
    epa_planewave_coefficients,
    epa_polarization,
    epa_soft_relations,
    epa_twisted_coefficients,
    epa_virtual_photon,
    virtuality,
)
from vc_twist.errors import DomainError
from vc_twist.evolved import ModeTruncation
from vc_twist.kinematics import M_E, momentum, overlap_interval, speed
from vc_twist.numerics import sqrt_singular_nodes

E = 1e4 * M_E


def test_virtual_photon_spacelike():
    ph = epa_virtual_photon(E, 0.01 * E, 0.02)
    assert ph.virtuality_q2 < 0
    assert ph.theta_g == pytest.approx(0.02)
    with pytest.raises(DomainError):
        VirtualPhoton(omega=2.0, k_perp=1.0, k_z=1.0)


def test_virtuality_matches_kinematics():
    w = 0.01 * E
    ph = epa_virtual_photon(E, w, 0.02)
    assert virtuality(E, w, ph.k_perp) == pytest.approx(ph.virtuality_q2, rel=1e-6)


def test_soft_relations():
    w = 1e-4 * E
    k_perp = 100 * M_E * w / E
    q2, w_ret = epa_soft_relations(E, w, k_perp)
    assert virtuality(E, w, k_perp) == pytest.approx(q2, rel=1e-3)
    assert w_ret == w


def test_kinematics_energy_conservation():
    w, tk = 0.01 * E, 0.02
    k = epa_kinematics(E, w, tk)
    p, pf = momentum(E), momentum(E - w)
    # |p - k| = p' with k along theta_kp
    assert math.sqrt(p * p + k * k - 2 * p * k * math.cos(tk)) == pytest.approx(pf, rel=1e-12)


def test_polarization_regime():
    for x in (0.001, 0.01):
        pol = epa_polarization(E, 0.5, x * E, 0.01)
        assert pol.P_l == pytest.approx(epa_pl_reference(E, x * E), abs=1e-6)
        assert pol.mean_helicity == pytest.approx(epa_mean_helicity_reference(E, x * E, 0.5), rel=0.01)


def test_planewave_helicity_conserved():
    for c in epa_planewave_coefficients(E, -0.5, 0.01 * E, 0.02, ModeTruncation(max_abs_m=2)):
        assert c.lambda_prime.twice_value == -1
        assert c.m_prime.twice_value + 2 * c.m_gamma == -1


def test_twisted_reduces_to_planewave():
    w, tk, th = 0.01 * E, 0.02, 1e-7
    tr = ModeTruncation(max_abs_m=2)
    pw = {(c.lambda_gamma, c.m_gamma): c.weight for c in epa_planewave_coefficients(E, 0.5, w, tk, tr)}
    nodes, weights = sqrt_singular_nodes(overlap_interval(th, tk), 4)
    acc = {}
    for t, wt in zip(nodes, weights):
        for c in epa_twisted_coefficients(E, 0.5, 0.5, th, w, float(t), tk, tr):
            key = (c.lambda_gamma, c.m_gamma)
            acc[key] = acc.get(key, 0) + wt * math.sin(t) * c.weight
    v = speed(E)
    for key, val in pw.items():
        assert abs(acc[key] - 1j ** -0.5 * v * val) <= 1e-5 * abs(val)
