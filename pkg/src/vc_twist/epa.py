"""
Equivalent-photon (Weizsaecker-Williams) variant.

The transverse equivalent photon couples to the electron line exactly like a
Cherenkov photon, so the amplitude machinery is shared.  The kinematics
differ: the photon is space-like and its emission angle is a free input
rather than fixed by the Cherenkov condition.

Only transverse (helicity +-1) equivalent photons are modelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple


from .amplitudes import _half2, _photon_helicity, ultrarel_g1_g2
from .angular import cone_geometry
from .errors import DomainError, KinematicallyForbidden
from .evolved import EvolvedCoefficient, ModeTruncation
from .kinematics import ALPHA, M_E, MediumModel, momentum, speed
from .numerics import HalfInt, doubled, i_power, wigner_d_half, wigner_d_one

SQRT2 = math.sqrt(2.0)
SQRT_4PI_ALPHA = math.sqrt(4 * math.pi * ALPHA)


@dataclass(frozen=True)
class VirtualPhoton:
    """Space-like photon with energy ``omega`` and momentum (k_perp, 0, k_z)."""

    omega: float
    k_perp: float
    k_z: float
    virtuality_q2: float = float("nan")

    def __post_init__(self):
        q2 = self.omega ** 2 - self.k_perp ** 2 - self.k_z ** 2
        if math.isnan(self.virtuality_q2):
            object.__setattr__(self, "virtuality_q2", q2)
        elif abs(self.virtuality_q2 - q2) > 1e-9 * max(abs(q2), self.omega ** 2):
            raise DomainError("virtuality_q2 inconsistent with omega, k_perp, k_z")
        if self.virtuality_q2 > 1e-12 * self.omega ** 2:
            raise DomainError(f"equivalent photon must be space-like, got k^2 = {self.virtuality_q2}")

    @property
    def k(self) -> float:
        return math.hypot(self.k_perp, self.k_z)

    @property
    def theta_g(self) -> float:
        return math.atan2(self.k_perp, self.k_z)


def virtuality(E: float, omega: float, k_perp: float, m_e: float = M_E) -> float:
    """k^2 = -(k_perp^2 + (m_e omega/E)^2)/(1 - omega/E) for an initial electron along z.

    Exact in the ultra-relativistic treatment of the electron line; ``k_perp``
    is the photon momentum transverse to the initial electron.
    """
    if not 0 < omega < E:
        raise DomainError(f"need 0 < omega < E, got omega={omega}, E={E}")
    x = omega / E
    return -(k_perp ** 2 + (m_e * x) ** 2) / (1 - x)


def epa_soft_relations(E: float, omega: float, k_perp: float) -> Tuple[float, float]:
    """Soft-photon approximations (k^2, k_z) ~ (-k_perp^2, omega), valid for omega << E."""
    return -k_perp ** 2, omega


def epa_kinematics(E: float, omega: float, theta_kp: float, m_e: float = M_E) -> float:
    """|k| for a photon emitted at angle ``theta_kp`` to the initial momentum.

    Solves |p - k| = p' with E' = E - omega on the branch continuously
    connected to k = omega at theta_kp = 0.  Raises
    :class:`KinematicallyForbidden` when no real solution exists.
    """
    if not 0 < omega < E - m_e:
        raise DomainError(f"need 0 < omega < E - m_e, got omega={omega}")
    p = momentum(E, m_e)
    pf = momentum(E - omega, m_e)
    s = math.sin(theta_kp)
    rad = pf * pf - (p * s) ** 2
    if rad < 0:
        raise KinematicallyForbidden(f"no equivalent photon at theta_kp = {theta_kp} rad")
    # p cos - sqrt(rad), evaluated without cancellation
    c = math.cos(theta_kp)
    num = p * p - pf * pf
    den = p * c + math.sqrt(rad)
    if den <= 0:
        raise KinematicallyForbidden(f"no forward equivalent photon at theta_kp = {theta_kp} rad")
    return num / den


def epa_virtual_photon(E: float, omega: float, theta_g: float, m_e: float = M_E) -> VirtualPhoton:
    """Virtual photon for an initial electron along z, photon at polar angle ``theta_g``."""
    k = epa_kinematics(E, omega, theta_g, m_e)
    return VirtualPhoton(omega=omega, k_perp=k * math.sin(theta_g), k_z=k * math.cos(theta_g))


def _final_angle(E: float, omega: float, theta_g: float, k: float, m_e: float) -> Tuple[float, float, float]:
    """Final electron (p'_perp, p'_z, theta') for an initial electron along z."""
    p = momentum(E, m_e)
    p_perp = k * math.sin(theta_g)
    p_z = p - k * math.cos(theta_g)
    return p_perp, p_z, math.atan2(p_perp, p_z)


def epa_ultrarel_m_coefficient(lam, lam_p, lam_g, sigma, sigma_g, E: float, E_p: float,
                               theta: float, theta_p: float, theta_g: float) -> float:
    """Ultra-relativistic helicity coefficient.

    -sqrt(4 pi alpha) 8 sigma lam delta_{lam lam'} sqrt(E E') d_{sigma lam}(theta)
    d_{sigma - sigma_g, lam}(theta') d^1_{sigma_g lam_g}(theta_g) (delta_{0 sigma_g} - sqrt2 delta_{2 sigma, sigma_g}).
    Returns 0 for lam' != lam.
    """
    l2, lp2, lg = _half2(lam, "lambda"), _half2(lam_p, "lambda'"), _photon_helicity(lam_g)
    s2 = _half2(sigma, "sigma")
    sg = doubled(sigma_g)
    if sg % 2:
        raise DomainError("sigma_g must be an integer")
    sg //= 2
    if lp2 != l2:
        return 0.0
    if sg == 0:
        kron = 1.0
    elif sg == s2:
        kron = -SQRT2
    else:
        return 0.0
    return (-SQRT_4PI_ALPHA * 2 * s2 * l2 * math.sqrt(E * E_p)
            * wigner_d_half(s2 / 2, l2 / 2, theta)
            * wigner_d_half((s2 - 2 * sg) / 2, l2 / 2, theta_p)
            * wigner_d_one(sg, lg, theta_g) * kron)


def epa_g1_g2(E: float, omega: float, theta_g: float, lam, m_e: float = M_E) -> Tuple[float, float]:
    """(g1, g2) for an initial electron along z and an equivalent photon at ``theta_g``."""
    k = epa_kinematics(E, omega, theta_g, m_e)
    _, _, theta_p = _final_angle(E, omega, theta_g, k, m_e)
    return ultrarel_g1_g2(lam, theta_p, theta_g)


def epa_planewave_coefficients(E: float, lam, omega: float, theta_g: float,
                               truncation: Optional[ModeTruncation] = None,
                               m_e: float = M_E) -> List[EvolvedCoefficient]:
    """Mode-expansion coefficients for a plane-wave initial electron.

    Helicity is conserved on the electron line (lam' = lam), m' = lam - m_g and

        weight = i^(lam+1)/v sqrt(pi alpha/E) sqrt(1 - omega/E) (-1)^m_g (-(lam_g g1 + g2)),

    which is the helicity form of g1 A_par + i g2 A_perp.
    """
    truncation = truncation or ModeTruncation()
    l2 = _half2(lam, "lambda")
    k = epa_kinematics(E, omega, theta_g, m_e)
    p_perp, p_z, theta_p = _final_angle(E, omega, theta_g, k, m_e)
    g1, g2 = ultrarel_g1_g2(l2 / 2, theta_p, theta_g)
    pref = (i_power(l2 + 2) / speed(E, m_e) * math.sqrt(math.pi * ALPHA / E)
            * math.sqrt(1 - omega / E))
    out = []
    for lg in (1, -1):
        for mg in truncation.m_gamma_values:
            out.append(EvolvedCoefficient(
                m_prime=HalfInt(l2 - 2 * mg), lambda_prime=HalfInt(l2), m_gamma=mg, lambda_gamma=lg,
                omega=omega, weight=pref * (-1) ** mg * (-(lg * g1 + g2)), j_total=HalfInt(l2),
                theta_g=theta_g, branch="plus", k_perp=k * math.sin(theta_g),
                k_z=k * math.cos(theta_g), p_perp_f=p_perp, p_z_f=p_z, E_f=E - omega, kind="epa-pw"))
    return out


def epa_twisted_C(lam, lam_g, m, m_g: int, theta: float, theta_p: float, theta_g: float,
                  delta: float, delta_p: float) -> float:
    """C_{lam_g m_g} = 2 lam sum_{sigma sigma_g} 2 sigma d d d (delta_{0 sigma_g} - sqrt2 delta_{2 sigma, sigma_g})
    cos[(m - sigma)(delta - delta') + (m_g - sigma_g) delta']."""
    l2, lg = _half2(lam, "lambda"), _photon_helicity(lam_g)
    m2 = doubled(m)
    if m2 % 2 == 0:
        raise DomainError("electron TAM projection must be half-integer")
    acc = 0.0
    for s2 in (1, -1):
        for sg, kron in ((0, 1.0), (s2, -SQRT2)):
            acc += (s2 * kron * wigner_d_half(s2 / 2, l2 / 2, theta)
                    * wigner_d_half((s2 - 2 * sg) / 2, l2 / 2, theta_p)
                    * wigner_d_one(sg, lg, theta_g)
                    * math.cos((m2 - s2) / 2 * (delta - delta_p) + (m_g - sg) * delta_p))
    return l2 * acc


def epa_twisted_coefficients(E: float, lam, m, theta: float, omega: float, theta_g: float,
                             theta_kp: float, truncation: Optional[ModeTruncation] = None,
                             m_e: float = M_E) -> List[EvolvedCoefficient]:
    """Mode-expansion coefficients for a Bessel initial electron.

    ``theta_kp`` is the emission angle relative to the contributing plane-wave
    component; it plays the role of the Cherenkov angle in the overlap weight
    F(theta, theta_g, theta_kp).  Only lam' = lam appears, m' = m - m_g and

        weight = -i sqrt(2 pi alpha/E) sqrt(1 - omega/E) F C_{lam_g m_g}.
    """
    truncation = truncation or ModeTruncation()
    l2 = _half2(lam, "lambda")
    m2 = doubled(m)
    k = epa_kinematics(E, omega, theta_kp, m_e)
    # the medium only supplies n(omega) to cone_geometry; k is passed explicitly
    geo = cone_geometry(E, omega, theta, theta_g, MediumModel.constant(1.0), m_e,
                        theta0=theta_kp, k=k)
    pref = -1j * math.sqrt(2 * math.pi * ALPHA / E) * math.sqrt(1 - omega / E) * geo.F
    p_perp = geo.p_f * math.sin(geo.theta_p)
    p_z = geo.p_f * math.cos(geo.theta_p)
    out = []
    for lg in (1, -1):
        for mg in truncation.m_gamma_values:
            c = epa_twisted_C(l2 / 2, lg, m2 / 2, mg, theta, geo.theta_p, theta_g, geo.delta, geo.delta_p)
            out.append(EvolvedCoefficient(
                m_prime=HalfInt(m2 - 2 * mg), lambda_prime=HalfInt(l2), m_gamma=mg, lambda_gamma=lg,
                omega=omega, weight=pref * c, j_total=HalfInt(m2), theta_g=theta_g,
                k_perp=k * math.sin(theta_g), k_z=k * math.cos(theta_g), p_perp_f=p_perp,
                p_z_f=p_z, E_f=E - omega, kind="epa-tw"))
    return out


@dataclass(frozen=True)
class EPAPolarization:
    omega: float
    theta_g: float
    g1: float
    g2: float
    P_l: float
    mean_helicity: float


def epa_polarization(E: float, lam, omega: float, theta_g: float, m_e: float = M_E) -> EPAPolarization:
    """Linear-polarization degree and mean helicity of the equivalent photon at ``theta_g``."""
    from .observables import epa_mean_helicity, pl_planewave

    g1, g2 = epa_g1_g2(E, omega, theta_g, lam, m_e)
    return EPAPolarization(omega=omega, theta_g=theta_g, g1=g1, g2=g2,
                           P_l=pl_planewave(g1, g2), mean_helicity=epa_mean_helicity(g1, g2))


def epa_pl_reference(E: float, omega: float) -> float:
    """Leading-order P_l = 1 - omega^2/(2 E^2)."""
    return 1 - omega ** 2 / (2 * E ** 2)


def epa_mean_helicity_reference(E: float, omega: float, lam) -> float:
    """Leading-order mean helicity 2 lam omega/E."""
    return doubled(lam) * omega / E
