import math

import numpy as np
import pytest

from vc_twist.amplitudes import helicity_sum_S
from vc_twist.errors import DomainError, OutsideOverlap
from vc_twist.evolved import (
    CSV_FIELDS,
    EvolvedCoefficient,
    ModeTruncation,
    SpaceTimePoint,
    coefficients_to_csv,
    electron_bessel_mode,
    evolved_pw_coefficients,
    evolved_pw_state,
    evolved_tw_coefficients,
    evolved_tw_state,
    momentum_rep_coefficient,
    photon_bessel_mode,
    photon_linear_mode,
    sample_wavefunction,
)
from vc_twist.kinematics import M_E, MediumModel, cherenkov_angle, momentum
from vc_twist.spin_basis import electron_planewave_spinor, photon_polarization_vector

MED = MediumModel.constant(1.8)
E2 = 2e6  # total energy, eV


def _pw_phase(p_vec, energy, x):
    return np.exp(-1j * (energy * x.t - np.dot(p_vec, x.cartesian())))


def test_tam_assertion():
    with pytest.raises(AssertionError):
        EvolvedCoefficient(m_prime=0.5, lambda_prime=0.5, m_gamma=1, lambda_gamma=1, omega=1.0,
                           weight=1.0, j_total=0.5)


@pytest.mark.parametrize("seed", range(3))
def test_tam_randomized(seed):
    rng = np.random.default_rng(seed)
    lam = rng.choice([0.5, -0.5])
    omega = rng.uniform(1e5, 8e5)
    tr = ModeTruncation(max_abs_m=int(rng.integers(1, 6)))
    for c in evolved_pw_coefficients(E2, lam, MED, omega, tr):
        assert c.m_prime.twice_value + 2 * c.m_gamma == round(2 * lam)
    m = int(rng.integers(-3, 4)) + 0.5
    theta = rng.uniform(0.05, 0.3)
    t0 = cherenkov_angle(E2, omega, MED)
    tg = abs(theta - t0) + 0.5 * (min(theta + t0, math.pi) - abs(theta - t0))
    for c in evolved_tw_coefficients(E2, lam, m, theta, MED, omega, tg, tr):
        assert c.m_prime.twice_value + 2 * c.m_gamma == round(2 * m)


def test_electron_mode_at_axis():
    # at r = 0 only the J_0 term survives: order m' - sigma = 0
    x = SpaceTimePoint()
    psi = electron_bessel_mode(0.5 * M_E, M_E, 1.5, 0.5, x)
    assert np.allclose(psi, 0)
    psi = electron_bessel_mode(0.5 * M_E, M_E, 0.5, 0.5, x)
    assert np.any(np.abs(psi) > 0)


def test_photon_mode_at_axis():
    x = SpaceTimePoint()
    assert np.allclose(photon_bessel_mode(0.5, 1.0, 3, 1, x), 0)
    assert np.any(np.abs(photon_bessel_mode(0.5, 1.0, 1, 1, x)) > 0)


def test_electron_modes_reconstruct_plane_wave():
    pp, pz = 0.7 * M_E, 1.2 * M_E
    th, E = math.atan2(pp, pz), math.sqrt(pp ** 2 + pz ** 2 + M_E ** 2)
    x = SpaceTimePoint(0.3 / M_E, 2.0 / M_E, 0.7, 0.4 / M_E)
    phi = 1.3
    p_vec = np.array([pp * math.cos(phi), pp * math.sin(phi), pz])
    for lp in (0.5, -0.5):
        target = electron_planewave_spinor(th, phi, E, lp) * _pw_phase(p_vec, E, x)
        total = np.zeros(4, dtype=complex)
        for m2 in range(-81, 82, 2):
            total += 1j ** (m2 / 2) * np.exp(-0.5j * m2 * phi) * electron_bessel_mode(pp, pz, m2 / 2, lp, x)
        assert np.allclose(total, target, atol=1e-12 * np.max(np.abs(target)))


def test_photon_modes_reconstruct_plane_wave():
    kp, kz = 0.7, 1.2
    th, w = math.atan2(kp, kz), math.hypot(kp, kz)
    x = SpaceTimePoint(0.3, 2.0, 0.7, 0.4)
    phi = 2.2
    k_vec = np.array([kp * math.cos(phi), kp * math.sin(phi), kz])
    for lg in (1, -1):
        target = photon_polarization_vector(th, phi, lg) * _pw_phase(k_vec, w, x)
        total = sum(1j ** m * np.exp(-1j * m * phi) * photon_bessel_mode(kp, kz, m, lg, x)
                    for m in range(-40, 41))
        assert np.allclose(total, target, atol=1e-12)


def test_linear_modes():
    x = SpaceTimePoint(0.0, 1.5, 0.2, 0.1)
    a_p = photon_bessel_mode(0.5, 1.0, 2, 1, x)
    a_m = photon_bessel_mode(0.5, 1.0, 2, -1, x)
    par = photon_linear_mode(0.5, 1.0, 2, "parallel", x)
    perp = photon_linear_mode(0.5, 1.0, 2, "perp", x)
    assert np.allclose(a_p, (-par - 1j * perp) / math.sqrt(2))
    assert np.allclose(a_m, (par - 1j * perp) / math.sqrt(2))
    with pytest.raises(DomainError):
        photon_linear_mode(0.5, 1.0, 2, "circular", x)


def test_pw_weights_branch_independent():
    a = evolved_pw_coefficients(E2, 0.5, MED, 3e5, ModeTruncation(max_abs_m=2), branch="plus")
    b = evolved_pw_coefficients(E2, 0.5, MED, 3e5, ModeTruncation(max_abs_m=2), branch="minus")
    assert [c.weight for c in a] == [c.weight for c in b]


def test_tw_outside_overlap():
    t0 = cherenkov_angle(E2, 3e5, MED)
    with pytest.raises(OutsideOverlap):
        evolved_tw_coefficients(E2, 0.5, 0.5, 0.05, MED, 3e5, t0 + 0.2, ModeTruncation(max_abs_m=1))


def _on_shell_pw(omega, phi_g):
    t0 = cherenkov_angle(E2, omega, MED)
    k = omega * 1.8
    kv = k * np.array([math.sin(t0) * math.cos(phi_g), math.sin(t0) * math.sin(phi_g), math.cos(t0)])
    pv = np.array([0.0, 0.0, momentum(E2)]) - kv
    return pv, kv


def test_momentum_rep_off_shell():
    pv, kv = _on_shell_pw(3e5, 0.3)
    res = momentum_rep_coefficient(E2, 0.5, pv + np.array([0.0, 0.0, 1e3]), kv, MED)
    assert not res.on_shell
    assert np.all(res.coefficient == 0)
    assert res.max_residual > 1e-9


def test_momentum_rep_plane_wave_on_shell():
    pv, kv = _on_shell_pw(3e5, 0.3)
    res = momentum_rep_coefficient(E2, 0.5, pv, kv, MED)
    assert res.on_shell and res.branch == "plus"
    assert res.max_residual < 1e-12
    S = helicity_sum_S(0.5, E2, E2 - 3e5, math.atan2(math.hypot(*pv[:2]), pv[2]),
                       cherenkov_angle(E2, 3e5, MED), 0.3, phi_p=math.atan2(pv[1], pv[0]))
    ratio = res.coefficient[np.abs(S) > 1e-6 * np.max(np.abs(S))] / S[np.abs(S) > 1e-6 * np.max(np.abs(S))]
    assert np.allclose(ratio, ratio[0])


def test_momentum_rep_twisted_on_shell():
    omega, theta = 3e5, 0.1
    t0 = cherenkov_angle(E2, omega, MED)
    tg = t0 + 0.05
    k = omega * 1.8
    p = momentum(E2)
    # place p on the cone at the azimuth that conserves momentum for the photon at phi_g = 0
    cos_d = (math.cos(t0) - math.cos(tg) * math.cos(theta)) / (math.sin(tg) * math.sin(theta))
    phi = math.acos(cos_d)
    pvec = p * np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    kv = k * np.array([math.sin(tg), 0.0, math.cos(tg)])
    res = momentum_rep_coefficient(E2, 0.5, pvec - kv, kv, MED, m=0.5, theta=theta)
    assert res.on_shell
    assert np.max(np.abs(res.coefficient)) > 0
    with pytest.raises(DomainError):
        momentum_rep_coefficient(E2, 0.5, pvec - kv, kv, MED, m=0.5)


def test_sample_single_coefficient():
    c = evolved_pw_coefficients(E2, 0.5, MED, 3e5, ModeTruncation(max_abs_m=1))[0]
    xe, xg = SpaceTimePoint(1e-6, 2e-6, 0.1, 0.0), SpaceTimePoint(0.0, 1e-6, 0.5, 1e-6)
    s = sample_wavefunction([c], xe, xg)
    ref = c.weight * np.outer(electron_bessel_mode(c.p_perp_f, c.p_z_f, c.m_prime, c.lambda_prime, xe),
                              photon_bessel_mode(c.k_perp, c.k_z, c.m_gamma, c.lambda_gamma, xg, c.omega))
    assert np.allclose(s.values, ref)
    assert s.n_terms == 1


def test_sample_tail_converges():
    tr = ModeTruncation.gauss(2e5, 4e5, 16, max_abs_m=24)
    coeffs = evolved_pw_state(E2, 0.5, MED, tr)
    xe, xg = SpaceTimePoint(0.0, 3e-6, 0.1, 0.0), SpaceTimePoint(0.0, 3e-6, 0.5, 0.0)
    small = sample_wavefunction(coeffs, xe, xg, ModeTruncation(max_abs_m=12))
    big = sample_wavefunction(coeffs, xe, xg, ModeTruncation(max_abs_m=24))
    scale = np.max(np.abs(big.values))
    assert np.max(np.abs(big.values - small.values)) < 1e-8 * scale
    assert not big.warning


def test_tw_state_measures():
    tr = ModeTruncation(max_abs_m=1, omega_grid=(3e5,), theta_grid_size=8)
    coeffs = evolved_tw_state(E2, 0.5, 0.5, 0.1, MED, tr)
    theta_nodes = {c.theta_g for c in coeffs}
    assert len(theta_nodes) == 8
    assert all(c.measure > 0 for c in coeffs)


def test_csv_format():
    coeffs = evolved_pw_coefficients(E2, 0.5, MED, 3e5, ModeTruncation(max_abs_m=1))
    text = coefficients_to_csv(coeffs, ["command: test"])
    lines = text.splitlines()
    assert lines[0] == "# command: test"
    assert lines[1] == ",".join(CSV_FIELDS)
    assert len(lines) == 2 + len(coeffs)
    assert "-0," not in text
    assert coefficients_to_csv(coeffs, ["command: test"]) == text
