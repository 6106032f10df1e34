"""
Cone-overlap geometry for a twisted (Bessel) initial electron.

A Bessel electron is a superposition of plane waves on a cone of half-angle
theta.  For a photon at polar angle theta_g only the two plane-wave
components at azimuth phi_g +- delta satisfy the Cherenkov condition; the
weight of that pair is F(theta, theta_g, theta0).

delta is evaluated with half-angle products rather than an arccos so that it
stays accurate next to the interval borders, where the arccos argument
approaches +-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, OutsideOverlap
from .kinematics import COS_CLAMP, M_E, MediumModel, cherenkov_cos_angle, momentum


def _arccos_argument(theta: float, theta_g: float, theta0: float) -> float:
    den = math.sin(theta_g) * math.sin(theta)
    if den <= 0:
        raise DomainError(f"degenerate geometry: sin(theta_g) sin(theta) = {den}")
    return (math.cos(theta0) - math.cos(theta_g) * math.cos(theta)) / den


def _delta(theta: float, theta_g: float, theta0: float) -> float:
    arg = _arccos_argument(theta, theta_g, theta0)
    if abs(arg) > 1 + COS_CLAMP:
        raise OutsideOverlap(
            f"theta_g = {theta_g} outside the overlap of cones theta = {theta}, theta0 = {theta0}"
        )
    a = math.sin((theta0 + theta_g - theta) / 2) * math.sin((theta0 - theta_g + theta) / 2)
    b = math.sin((theta_g + theta + theta0) / 2) * math.sin((theta_g + theta - theta0) / 2)
    return 2 * math.atan2(math.sqrt(max(a, 0.0)), math.sqrt(max(b, 0.0)))


def delta_angle(theta: float, theta_g: float, theta0: float) -> float:
    """Azimuth offset delta in [0, pi] between the photon and the contributing electron component.

    cos(delta) = (cos theta0 - cos theta_g cos theta)/(sin theta_g sin theta).
    Raises :class:`OutsideOverlap` if the argument leaves [-1, 1] by more than 1e-12.
    """
    return _delta(theta, theta_g, theta0)


def delta_prime(theta_p: float, theta_g: float, theta_kpp: float) -> float:
    """Azimuth offset delta' of the final electron, same construction as delta."""
    if math.sin(theta_p) <= 0:
        raise DomainError("delta' is undefined for a final electron along the z axis")
    return _delta(theta_p, theta_g, theta_kpp)


def _f_product(theta, theta_g, theta0):
    s = theta + theta0
    d = theta - theta0
    return (4 * np.sin((s + theta_g) / 2) * np.sin((s - theta_g) / 2)
            * np.sin((theta_g + d) / 2) * np.sin((theta_g - d) / 2))


def weight_F(theta, theta_g, theta0):
    """Overlap weight F = {[cos theta_g - cos(theta + theta0)][cos(theta - theta0) - cos theta_g]}^(-1/2) / pi.

    Accepts arrays in ``theta_g``.  Every point must lie strictly inside the
    overlap interval; F diverges (integrably) at the borders.
    """
    prod = _f_product(theta, np.asarray(theta_g, dtype=float), theta0)
    if np.any(~(prod > 0)):
        raise OutsideOverlap("weight_F evaluated at or outside the overlap interval")
    out = 1 / (math.pi * np.sqrt(prod))
    return float(out) if np.ndim(out) == 0 else out


def weight_F_from_delta(theta: float, theta_g: float, theta0: float) -> float:
    """F = 1/(pi sin theta_g sin theta |sin delta|); equivalent to :func:`weight_F`."""
    d = delta_angle(theta, theta_g, theta0)
    s = math.sin(theta_g) * math.sin(theta) * abs(math.sin(d))
    if s <= 0:
        raise OutsideOverlap("weight_F evaluated on the overlap border")
    return 1 / (math.pi * s)


# -----------------------------------------------------------------------------
# Full geometry with the final electron
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class AngularGeometry:
    theta: float
    theta_g: float
    theta0: float
    theta_p: float
    delta: float
    delta_p: float
    F: float
    theta_kpp: float = float("nan")
    p_f: float = float("nan")
    k: float = float("nan")

    def __post_init__(self):
        for name in ("delta", "delta_p"):
            d = getattr(self, name)
            if not (0 <= d <= math.pi):
                raise DomainError(f"{name} = {d} outside [0, pi]")
        if not self.F > 0:
            raise OutsideOverlap("F must be positive inside the overlap")


def final_electron(p: float, theta: float, delta: float, k: float, theta_g: float):
    """Final electron p' = p - k for the first stationary point.

    The initial component sits at azimuth +delta, the photon at azimuth 0.
    Returns (|p'|, theta', delta', theta_kp'); delta' is the azimuth of p'
    and lies in [0, pi] because p'_y = p sin(theta) sin(delta) >= 0.
    """
    pv = p * np.array([math.sin(theta) * math.cos(delta), math.sin(theta) * math.sin(delta),
                       math.cos(theta)])
    kv = k * np.array([math.sin(theta_g), 0.0, math.cos(theta_g)])
    pf = pv - kv
    pf_perp = math.hypot(pf[0], pf[1])
    p_f = math.hypot(pf_perp, pf[2])
    theta_p = math.atan2(pf_perp, pf[2])
    delta_p = math.atan2(pf[1], pf[0]) if pf_perp > 0 else math.pi
    if delta_p < 0:
        # p'_y is non-negative; a tiny negative zero can only come from rounding
        delta_p = abs(delta_p)
    khat = kv / k
    cross = np.linalg.norm(np.cross(khat, pf))
    theta_kpp = math.atan2(cross, float(np.dot(khat, pf)))
    return p_f, theta_p, delta_p, theta_kpp


def cone_geometry(E: float, omega: float, theta: float, theta_g: float, medium: MediumModel,
                  m_e: float = M_E, theta0: float = None, k: float = None) -> AngularGeometry:
    """Geometry for emission at (omega, theta_g) by a Bessel electron of opening angle theta.

    theta0 is the Cherenkov angle at omega unless given explicitly (used by the
    equivalent-photon variant, where the emission angle is free).  The photon
    momentum modulus is omega n unless ``k`` is given.
    """
    if theta0 is None:
        theta0 = math.acos(cherenkov_cos_angle(E, omega, medium, m_e))
    d = delta_angle(theta, theta_g, theta0)
    F = weight_F(theta, theta_g, theta0)
    if k is None:
        k = omega * medium.n(omega)
    p_f, theta_p, delta_p, theta_kpp = final_electron(momentum(E, m_e), theta, d, k, theta_g)
    return AngularGeometry(theta=theta, theta_g=theta_g, theta0=theta0, theta_p=theta_p,
                           delta=d, delta_p=delta_p, F=F, theta_kpp=theta_kpp, p_f=p_f, k=k)


def soft_geometry(theta: float, theta_g: float, theta0: float) -> AngularGeometry:
    """Soft-photon geometry: the final electron inherits theta' = theta, delta' = delta."""
    d = delta_angle(theta, theta_g, theta0)
    return AngularGeometry(theta=theta, theta_g=theta_g, theta0=theta0, theta_p=theta,
                           delta=d, delta_p=d, F=weight_F(theta, theta_g, theta0))


def azimuthal_average(f: Callable[[float, float], complex], geometry: AngularGeometry,
                      phi_g: float = 0.0) -> complex:
    """Two-point value of int dphi/2pi delta(cos theta_kp - cos theta0) f(phi, phi').

    Equals (1/2)[f(phi_g + delta, phi_g + delta') + f(phi_g - delta, phi_g - delta')] F.
    """
    g = geometry
    return 0.5 * (f(phi_g + g.delta, phi_g + g.delta_p) + f(phi_g - g.delta, phi_g - g.delta_p)) * g.F
