"""
Bispinors and photon polarization vectors in the helicity basis.

Bispinors are complex arrays of shape (4,), polarization vectors complex
arrays of shape (3,).  Phases are fixed: changing them breaks the pinned
regression values in the test suite.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .kinematics import M_E
from .numerics import doubled, wigner_d_half, wigner_d_one

SQRT2 = math.sqrt(2.0)

# Spin-1 eigenvectors of s_z with eigenvalues -1, 0, +1.
CHI = {
    1: np.array([-1, -1j, 0], dtype=complex) / SQRT2,
    0: np.array([0, 0, 1], dtype=complex),
    -1: np.array([1, -1j, 0], dtype=complex) / SQRT2,
}

_W = {1: np.array([1, 0], dtype=complex), -1: np.array([0, 1], dtype=complex)}


def _half(x, what: str) -> int:
    t = doubled(x)
    if t not in (-1, 1):
        raise DomainError(f"{what} must be +-1/2, got {x!r}")
    return t


def basis_bispinor(sigma, E: float, lam, m_e: float = M_E) -> np.ndarray:
    """U^(sigma)(E, lam): s_z eigenstate bispinor with norm^2 = 2E."""
    s2 = _half(sigma, "sigma")
    l2 = _half(lam, "lambda")
    if E < m_e:
        raise DomainError(f"energy {E} eV below the rest mass")
    w = _W[s2]
    return np.concatenate([math.sqrt(E + m_e) * w, l2 * math.sqrt(E - m_e) * w])


def electron_planewave_spinor(theta_p: float, phi_p: float, E_p: float, lam_p,
                              m_e: float = M_E) -> np.ndarray:
    """Helicity bispinor u_{p' lam'} for a momentum at polar angles (theta', phi')."""
    out = np.zeros(4, dtype=complex)
    for s2 in (1, -1):
        d = wigner_d_half(s2 / 2, lam_p, theta_p)
        out += d * basis_bispinor(s2 / 2, E_p, lam_p, m_e) * np.exp(-0.5j * s2 * phi_p)
    return out


def photon_polarization_vector(theta_g: float, phi_g: float, lam_g: int) -> np.ndarray:
    """Helicity polarization vector e_{k lam_g} for k at (theta_g, phi_g)."""
    if doubled(lam_g) not in (-2, 2):
        raise DomainError(f"photon helicity must be +-1, got {lam_g!r}")
    out = np.zeros(3, dtype=complex)
    for sg in (-1, 0, 1):
        out += wigner_d_one(sg, lam_g, theta_g) * CHI[sg] * np.exp(-1j * sg * phi_g)
    return out


def linear_polarizations(theta_g: float, phi_g: float):
    """Real linear polarizations (e_par, e_perp): in and out of the (z, k) plane."""
    ct, st = math.cos(theta_g), math.sin(theta_g)
    cp, sp = math.cos(phi_g), math.sin(phi_g)
    e_par = np.array([ct * cp, ct * sp, -st])
    e_perp = np.array([-sp, cp, 0.0])
    return e_par, e_perp


def helicity_to_linear(w_plus: complex, w_minus: complex):
    """Map weights on e_{+1}, e_{-1} to weights on (e_par, e_perp).

    Uses e_par = -(e_+ - e_-)/sqrt2 and e_perp = i(e_+ + e_-)/sqrt2.
    """
    return (w_minus - w_plus) / SQRT2, -1j * (w_plus + w_minus) / SQRT2
