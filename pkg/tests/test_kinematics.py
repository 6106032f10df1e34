import math

import pytest

from vc_twist.errors import DomainError, NoCherenkovEmission
from vc_twist.kinematics import (
    ConeGeometry,
    ElectronState,
    MediumModel,
    PhotonMode,
    cherenkov_angle,
    cherenkov_cos_angle,
    emission_omega_range,
    momentum,
    overlap_interval,
    phase_space_weight,
    sin_theta0_soft,
    speed,
    total_energy,
)


def test_cone_angle_300kev_water(e300, water):
    assert math.degrees(cherenkov_angle(e300, 2.25, water)) == pytest.approx(14.47, abs=0.01)


def test_recoil_term_increases_cosine(e300):
    med = MediumModel.constant(1.8)
    v = speed(e300)
    c = cherenkov_cos_angle(e300, 1e5, med)
    assert c > 1 / (v * 1.8)
    assert c == pytest.approx(1 / (v * 1.8) + 1e5 / (2 * e300) * (1.8 ** 2 - 1) / (v * 1.8), rel=1e-15)


def test_below_threshold(water):
    E = total_energy(100e3)  # v n < 1
    with pytest.raises(NoCherenkovEmission) as info:
        cherenkov_cos_angle(E, 2.0, water)
    assert info.value.value > 1


def test_omega_domain(e300, water):
    with pytest.raises(DomainError):
        cherenkov_cos_angle(e300, 0.0, water)
    with pytest.raises(DomainError):
        cherenkov_cos_angle(e300, e300, water)


def test_soft_sin(e300):
    v = speed(e300)
    assert sin_theta0_soft(v, 1.33) == pytest.approx(math.sqrt(1 - 1 / (v * 1.33) ** 2))
    with pytest.raises(NoCherenkovEmission):
        sin_theta0_soft(0.5, 1.33)


def test_tabulated_medium(tmp_path):
    path = tmp_path / "n.txt"
    path.write_text("# omega n\n1.0, 1.30\n2.0 1.32\n3.0,1.35\n")
    med = MediumModel.from_table_file(path)
    assert med.n(1.5) == pytest.approx(1.31)
    assert med.d_omega_n(2.0) == pytest.approx(1.32 + 2.0 * (1.35 - 1.30) / 2.0, rel=1e-3)
    with pytest.raises(DomainError):
        med.n(5.0)


def test_emission_range_constant(e300, water):
    lo, hi = emission_omega_range(e300, water, 1.0, 5.0)
    assert lo == pytest.approx(1.0)
    assert hi == pytest.approx(5.0)


def test_electron_states(e300):
    pw = ElectronState.plane_wave(e300, 0.5)
    assert pw.tam_m.twice_value == 1
    assert pw.p_z == pytest.approx(momentum(e300))
    tw = ElectronState.bessel(e300, -0.5, 0.2, "3/2")
    assert tw.theta == pytest.approx(0.2)
    with pytest.raises(DomainError):
        ElectronState.bessel(e300, 0.5, 0.2, 1)
    with pytest.raises(DomainError):
        ElectronState(e300, 0.5, shape="bessel", p_perp=1.0, p_z=1.0, tam_m=0.5)


def test_photon_mode_checks(water):
    ph = PhotonMode.from_angle(2.0, 0.3, water, m_gamma=2, pol="parallel")
    assert ph.theta_g == pytest.approx(0.3)
    with pytest.raises(DomainError):
        PhotonMode(2.0, 1.0, 1.0, n=1.33)
    with pytest.raises(DomainError):
        PhotonMode.from_angle(2.0, 0.3, water, pol=0)


def test_overlap_interval():
    iv = overlap_interval(math.radians(12), math.radians(14.5))
    assert math.degrees(iv.lower) == pytest.approx(2.5)
    assert math.degrees(iv.upper) == pytest.approx(26.5)
    # wrap-around beyond pi
    iv = overlap_interval(math.radians(170), math.radians(20))
    assert math.degrees(iv.lower) == pytest.approx(150)
    assert math.degrees(iv.upper) == pytest.approx(170)
    with pytest.raises(DomainError):
        overlap_interval(0.0, 0.2)


def test_cone_geometry_interval():
    g = ConeGeometry(theta0=0.25, theta=0.1)
    assert g.interval.lower == pytest.approx(0.15)


def test_phase_space_weight(e300, water):
    w = phase_space_weight(e300, 2.0, water)
    assert w == pytest.approx((e300 - 2.0) * 2.0 * 1.33 / (speed(e300) * e300))
    assert phase_space_weight(e300, 2.0, water, per_omega=True) == pytest.approx(w * 1.33)
