"""
Helicity amplitudes for e -> e' + gamma in a medium.

The plane-wave amplitude is written as a sum over spin projections sigma,
sigma_g of angle-independent coefficients times azimuthal phases.  Everything
else here (back-to-back plane-wave amplitude, ultra-relativistic and soft
forms, the twisted-electron coefficient C and the helicity sum S) is built
from those coefficients.

Electron labels (lambda, lambda', sigma, m) are half-integers and may be
given as floats (0.5), strings ("1/2") or :class:`HalfInt`.  Internally they
are carried as doubled ints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .errors import DomainError
from .kinematics import ALPHA, M_E, sin_theta0_soft, speed
from .numerics import HalfInt, doubled, wigner_d_half, wigner_d_one
from .spin_basis import electron_planewave_spinor, linear_polarizations, photon_polarization_vector

SQRT_4PI_ALPHA = math.sqrt(4 * math.pi * ALPHA)
SQRT2 = math.sqrt(2.0)

BRANCHES = ("plus", "minus")


def _half2(x, what: str) -> int:
    t = doubled(x)
    if t not in (-1, 1):
        raise DomainError(f"{what} must be +-1/2, got {x!r}")
    return t


def _photon_helicity(x) -> int:
    t = doubled(x)
    if t not in (-2, 2):
        raise DomainError(f"photon helicity must be +-1, got {x!r}")
    return t // 2


def _tam2(x, what: str = "m") -> int:
    t = doubled(x)
    if t % 2 == 0:
        raise DomainError(f"electron TAM projection {what} must be half-integer, got {x!r}")
    return t


def branch_sign(branch: str) -> int:
    if branch not in BRANCHES:
        raise DomainError(f"branch must be 'plus' or 'minus', got {branch!r}")
    return 1 if branch == "plus" else -1


def branch_for_phi(phi_g: float) -> str:
    """phi' = phi_g + pi for phi_g in [0, pi), phi_g - pi otherwise."""
    return "plus" if (phi_g % (2 * math.pi)) < math.pi else "minus"


@dataclass(frozen=True)
class HelicityLabels:
    lam: HalfInt
    lam_p: HalfInt
    lam_g: int
    sigma: HalfInt
    sigma_g: int

    def __post_init__(self):
        for name in ("lam", "lam_p", "sigma"):
            value = HalfInt.of(getattr(self, name))
            _half2(value, name)
            object.__setattr__(self, name, value)
        _photon_helicity(self.lam_g)
        if doubled(self.sigma_g) not in (-2, 0, 2):
            raise DomainError(f"sigma_g must be -1, 0 or 1, got {self.sigma_g!r}")
        object.__setattr__(self, "lam_g", int(self.lam_g))
        object.__setattr__(self, "sigma_g", int(self.sigma_g))


# -----------------------------------------------------------------------------
# Coefficients
# -----------------------------------------------------------------------------


def energy_factor(E: float, E_p: float, lam, lam_p, m_e: float = M_E) -> float:
    """E_{lam lam'} = sqrt((E-m)(E'+m)) + 4 lam lam' sqrt((E'-m)(E+m))."""
    l2, lp2 = _half2(lam, "lambda"), _half2(lam_p, "lambda'")
    if E < m_e or E_p < m_e:
        raise DomainError(f"energies must be >= m_e, got E={E}, E'={E_p}")
    return math.sqrt((E - m_e) * (E_p + m_e)) + l2 * lp2 * math.sqrt((E_p - m_e) * (E + m_e))


def _m_coeff(l2: int, lp2: int, lg: int, s2: int, sg: int, E: float, E_p: float,
             theta: float, theta_p: float, theta_g: float, m_e: float) -> float:
    # sigma - sigma_g must be a spin-1/2 label; only sigma_g in {0, 2 sigma} survive
    inner2 = s2 - 2 * sg
    if inner2 not in (-1, 1):
        return 0.0
    if sg == 0:
        kron = 1.0
    elif sg == s2:
        kron = -SQRT2
    else:
        return 0.0
    return (-SQRT_4PI_ALPHA * s2 * l2 * energy_factor(E, E_p, l2 / 2, lp2 / 2, m_e)
            * wigner_d_half(s2 / 2, l2 / 2, theta)
            * wigner_d_half(inner2 / 2, lp2 / 2, theta_p)
            * wigner_d_one(sg, lg, theta_g) * kron)


def m_coefficient(labels: HelicityLabels, E: float, omega: float, theta: float,
                  theta_p: float, theta_g: float, m_e: float = M_E) -> float:
    """Angle-independent amplitude coefficient M^{lam lam' lam_g}_{sigma sigma_g}.

    Zero unless sigma_g is 0 or 2 sigma (so that sigma - sigma_g = -+1/2).
    """
    if omega < 0 or E - omega < m_e:
        raise DomainError(f"need 0 <= omega <= E - m_e, got omega={omega}")
    return _m_coeff(labels.lam.twice_value, labels.lam_p.twice_value, labels.lam_g,
                    labels.sigma.twice_value, labels.sigma_g, E, E - omega,
                    theta, theta_p, theta_g, m_e)


def _pw_pair(l2: int, lp2: int, lg: int, E: float, E_p: float, theta_p: float,
             theta_g: float, m_e: float) -> Tuple[float, float]:
    """(M_{lam,0}, M_{lam,2lam}) for an initial electron along z."""
    m0 = _m_coeff(l2, lp2, lg, l2, 0, E, E_p, 0.0, theta_p, theta_g, m_e)
    m2 = _m_coeff(l2, lp2, lg, l2, l2, E, E_p, 0.0, theta_p, theta_g, m_e)
    return m0, m2


def mfi_planewave(lam, lam_p, lam_g, E: float, omega: float, theta_p: float, theta_g: float,
                  phi_p: float, phi_g: float, m_e: float = M_E) -> complex:
    """Plane-wave amplitude M_fi for an initial electron along z."""
    l2, lp2, lg = _half2(lam, "lambda"), _half2(lam_p, "lambda'"), _photon_helicity(lam_g)
    if omega < 0 or E - omega < m_e:
        raise DomainError(f"need 0 <= omega <= E - m_e, got omega={omega}")
    m0, m2 = _pw_pair(l2, lp2, lg, E, E - omega, theta_p, theta_g, m_e)
    lam_f = l2 / 2
    return m0 * np.exp(1j * lam_f * phi_p) + m2 * np.exp(-1j * lam_f * phi_p + 1j * l2 * phi_g)


def planewave_difference(lam, lam_p, lam_g, E: float, omega: float, theta_p: float,
                         theta_g: float, m_e: float = M_E) -> float:
    """M_{lam,0} - M_{lam,2lam}: the back-to-back amplitude without its phase."""
    l2, lp2, lg = _half2(lam, "lambda"), _half2(lam_p, "lambda'"), _photon_helicity(lam_g)
    if omega < 0 or E - omega < m_e:
        raise DomainError(f"need 0 <= omega <= E - m_e, got omega={omega}")
    m0, m2 = _pw_pair(l2, lp2, lg, E, E - omega, theta_p, theta_g, m_e)
    return m0 - m2


def mfi_backtoback(lam, lam_p, lam_g, E: float, omega: float, theta_p: float, theta_g: float,
                   phi_g: float, branch: str = "plus", m_e: float = M_E) -> complex:
    """M_fi at phi' = phi_g +- pi: exp(i lam (phi_g +- pi)) (M_{lam,0} - M_{lam,2lam})."""
    sign = branch_sign(branch)
    lam_f = doubled(lam) / 2
    return (np.exp(1j * lam_f * (phi_g + sign * math.pi))
            * planewave_difference(lam, lam_p, lam_g, E, omega, theta_p, theta_g, m_e))


def planewave_table(lam, E: float, omega: float, theta_p: float, theta_g: float,
                    m_e: float = M_E) -> Dict[Tuple[int, int], float]:
    """{(2 lam', lam_g): M_{lam,0} - M_{lam,2lam}} over all final helicities."""
    return {(lp2, lg): planewave_difference(lam, lp2 / 2, lg, E, omega, theta_p, theta_g, m_e)
            for lp2 in (1, -1) for lg in (1, -1)}


# -----------------------------------------------------------------------------
# Closed-form limits
# -----------------------------------------------------------------------------


def ultrarel_g1_g2(lam, theta_p: float, theta_g: float) -> Tuple[float, float]:
    """g1 = sin(theta_g + theta'/2), g2 = 2 lam sin(theta'/2)."""
    l2 = _half2(lam, "lambda")
    return math.sin(theta_g + theta_p / 2), l2 * math.sin(theta_p / 2)


def soft_G1_G2(lam, m_g: int, theta: float, theta_g: float, delta: float) -> Tuple[float, float]:
    """Soft-photon twisted-electron factors G1, G2.

    G1 = [cos(theta) sin(theta_g) - sin(theta) cos(theta_g) cos(delta)] cos(m_g delta),
    G2 = -sin(theta) sin(delta) sin(m_g delta).  Independent of lam.
    """
    _half2(lam, "lambda")
    if doubled(m_g) % 2:
        raise DomainError("photon TAM projection must be an integer")
    g1 = ((math.cos(theta) * math.sin(theta_g) - math.sin(theta) * math.cos(theta_g) * math.cos(delta))
          * math.cos(m_g * delta))
    g2 = -math.sin(theta) * math.sin(delta) * math.sin(m_g * delta)
    return g1, g2


def twisted_C(lam, lam_p, lam_g, m, m_g: int, E: float, omega: float, theta: float,
              theta_p: float, theta_g: float, delta: float, delta_p: float,
              m_e: float = M_E) -> float:
    """Twisted-electron coefficient C_{lam' lam_g m_g}.

    Sum over sigma, sigma_g of M_{sigma sigma_g} cos[(m - sigma)(delta - delta')
    + (m_g - sigma_g) delta'].  ``delta`` and ``delta_p`` come from the cone
    overlap geometry (:mod:`vc_twist.angular`) and must lie in [0, pi].
    """
    l2, lp2, lg = _half2(lam, "lambda"), _half2(lam_p, "lambda'"), _photon_helicity(lam_g)
    m2 = _tam2(m)
    if doubled(m_g) % 2:
        raise DomainError("photon TAM projection must be an integer")
    for name, d in (("delta", delta), ("delta'", delta_p)):
        if not (0 <= d <= math.pi):
            raise DomainError(f"{name} = {d} outside [0, pi]; geometry is outside the cone overlap")
    if omega < 0 or E - omega < m_e:
        raise DomainError(f"need 0 <= omega <= E - m_e, got omega={omega}")
    E_p = E - omega
    total = 0.0
    for s2 in (1, -1):
        for sg in (0, s2):
            coeff = _m_coeff(l2, lp2, lg, s2, sg, E, E_p, theta, theta_p, theta_g, m_e)
            total += coeff * math.cos((m2 - s2) / 2 * (delta - delta_p) + (m_g - sg) * delta_p)
    return total


# -----------------------------------------------------------------------------
# Helicity sum
# -----------------------------------------------------------------------------


def _final_phi(phi_g: float, branch: str, phi_p) -> float:
    if phi_p is not None:
        return phi_p
    return phi_g + branch_sign(branch) * math.pi


def helicity_sum_S(lam, E: float, E_p: float, theta_p: float, theta_g: float, phi_g: float,
                   branch: str = "plus", phi_p=None, m_e: float = M_E) -> np.ndarray:
    """Closed form of sum_{lam', lam_g} u_{p' lam'} e_{k lam_g} (M_{lam,0} - M_{lam,2lam}).

    Returns a (4, 3) complex array (bispinor index, vector index).  The final
    electron azimuth is phi_g +- pi according to ``branch`` unless ``phi_p``
    is given explicitly.
    """
    l2 = _half2(lam, "lambda")
    lam_f = l2 / 2
    phi_f = _final_phi(phi_g, branch, phi_p)
    e_par, e_perp = linear_polarizations(theta_g, phi_g)
    u_same = electron_planewave_spinor(theta_p, phi_f, E_p, lam_f, m_e)
    u_flip = electron_planewave_spinor(theta_p, phi_f, E_p, -lam_f, m_e)
    vec_same = e_par * math.sin(theta_g + theta_p / 2) + 1j * e_perp * l2 * math.sin(theta_p / 2)
    vec_flip = e_par * l2 * math.cos(theta_g + theta_p / 2) + 1j * e_perp * math.cos(theta_p / 2)
    return SQRT_4PI_ALPHA * (energy_factor(E, E_p, lam_f, lam_f, m_e) * np.outer(u_same, vec_same)
                             + energy_factor(E, E_p, lam_f, -lam_f, m_e) * np.outer(u_flip, vec_flip))


def helicity_sum_direct(lam, E: float, E_p: float, theta_p: float, theta_g: float, phi_g: float,
                        branch: str = "plus", phi_p=None, m_e: float = M_E) -> np.ndarray:
    """The same helicity sum evaluated term by term."""
    l2 = _half2(lam, "lambda")
    phi_f = _final_phi(phi_g, branch, phi_p)
    out = np.zeros((4, 3), dtype=complex)
    for lp2 in (1, -1):
        u = electron_planewave_spinor(theta_p, phi_f, E_p, lp2 / 2, m_e)
        for lg in (1, -1):
            e = photon_polarization_vector(theta_g, phi_g, lg)
            m0, m2 = _pw_pair(l2, lp2, lg, E, E_p, theta_p, theta_g, m_e)
            out += np.outer(u, e) * (m0 - m2)
    return out


def soft_amplitude(lam_g, E: float, n: float, m_e: float = M_E) -> float:
    """Soft-photon back-to-back amplitude without phase: -lam_g sqrt(8 pi alpha) v E sin(theta0)."""
    lg = _photon_helicity(lam_g)
    v = speed(E, m_e)
    return -lg * math.sqrt(8 * math.pi * ALPHA) * v * E * sin_theta0_soft(v, n)
