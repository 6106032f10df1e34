"""
Three-scalar toy model: phi(M) -> phi(mu1) + phi(mu2).

The evolved two-particle state of a scalar decay is expanded over
cylindrical waves exactly like the Cherenkov electron-photon state, without
spin.  Because every step (phase-space reduction, azimuthal collapse,
mode-sum pairing) can also be done by brute-force quadrature, this model is
the structural check of the spin-carrying code.

Units are arbitrary but consistent (the tests use units of the final mass).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .angular import delta_angle, weight_F
from .errors import DomainError, KinematicallyForbidden
from .evolved import SpaceTimePoint
from .numerics import bessel_j_orders, gauss_legendre


@dataclass(frozen=True)
class ScalarDecayConfig:
    """Decay of a scalar of mass ``M`` and energy ``E`` moving along z.

    ``E1`` is the energy of the first final particle (mass ``mu1``);
    ``coupling`` is the cubic coupling constant.
    """

    M: float
    mu1: float
    mu2: float
    E: float
    E1: Optional[float] = None
    coupling: float = 1.0

    def __post_init__(self):
        if min(self.M, self.mu1, self.mu2) <= 0:
            raise DomainError("masses must be positive")
        if self.mu1 + self.mu2 > self.M:
            raise DomainError("decay closed: mu1 + mu2 > M")
        if self.E < self.M:
            raise DomainError("E must be at least M")
        if self.E1 is not None:
            lo, hi = scalar_energy_range(self)
            if not lo - 1e-12 * hi <= self.E1 <= hi + 1e-12 * hi:
                raise KinematicallyForbidden(
                    f"E1 = {self.E1} outside the two-body range [{lo}, {hi}]")

    @property
    def p(self) -> float:
        return math.sqrt((self.E - self.M) * (self.E + self.M))

    @property
    def v(self) -> float:
        return self.p / self.E

    @property
    def E2(self) -> float:
        if self.E1 is None:
            raise DomainError("E1 is not set")
        return self.E - self.E1

    def with_E1(self, E1: float) -> "ScalarDecayConfig":
        return ScalarDecayConfig(self.M, self.mu1, self.mu2, self.E, E1, self.coupling)


def _rest_frame(cfg: ScalarDecayConfig) -> Tuple[float, float]:
    e_star = (cfg.M ** 2 + cfg.mu1 ** 2 - cfg.mu2 ** 2) / (2 * cfg.M)
    return e_star, math.sqrt(max(e_star * e_star - cfg.mu1 ** 2, 0.0))


def scalar_energy_range(cfg: ScalarDecayConfig) -> Tuple[float, float]:
    """Lab-frame range of E1: gamma E* -+ gamma v p*."""
    e_star, p_star = _rest_frame(cfg)
    g, gv = cfg.E / cfg.M, cfg.p / cfg.M
    return g * e_star - gv * p_star, g * e_star + gv * p_star


def scalar_cos_theta0(cfg: ScalarDecayConfig, E1: Optional[float] = None) -> float:
    """Opening angle of particle 1: cos theta0 = (1 - (M^2 + mu1^2 - mu2^2)/(2 E E1))/(v v1)."""
    E1 = cfg.E1 if E1 is None else E1
    if E1 is None:
        raise DomainError("E1 is not set")
    v = cfg.v
    if E1 <= cfg.mu1:
        raise DomainError("particle 1 must be moving (E1 > mu1)")
    v1 = math.sqrt((E1 - cfg.mu1) * (E1 + cfg.mu1)) / E1
    if v == 0:
        raise DomainError("initial particle at rest: the opening angle is undefined")
    c = (1 - (cfg.M ** 2 + cfg.mu1 ** 2 - cfg.mu2 ** 2) / (2 * cfg.E * E1)) / (v * v1)
    if abs(c) > 1 + 1e-12:
        raise KinematicallyForbidden(f"cos theta0 = {c} outside [-1, 1]")
    return max(-1.0, min(1.0, c))


def scalar_closure(cfg: ScalarDecayConfig, E1: Optional[float] = None) -> float:
    """E2 reconstructed from |p - p1| by the law of cosines; equals E - E1."""
    E1 = cfg.E1 if E1 is None else E1
    c = scalar_cos_theta0(cfg, E1)
    p, p1 = cfg.p, math.sqrt((E1 - cfg.mu1) * (E1 + cfg.mu1))
    p2sq = p * p + p1 * p1 - 2 * p * p1 * c
    return math.sqrt(p2sq + cfg.mu2 ** 2)


# -----------------------------------------------------------------------------
# Cylindrical modes
# -----------------------------------------------------------------------------


def scalar_mode(p_perp: float, p_z: float, m: int, x: SpaceTimePoint,
                mass: Optional[float] = None, energy: Optional[float] = None) -> complex:
    """Cylindrical wave exp(-i E t) J_m(p_perp r) exp(i (m phi_r + p_z z)).

    The energy is ``energy`` if given, else the on-shell value for ``mass``.
    """
    if p_perp < 0:
        raise DomainError("p_perp must be non-negative")
    if energy is None:
        if mass is None:
            raise DomainError("scalar_mode needs a mass or an energy")
        energy = math.sqrt(p_perp * p_perp + p_z * p_z + mass * mass)
    jm = bessel_j_orders(abs(m), p_perp * x.r_perp)[abs(m)]
    if m < 0 and m % 2:
        jm = -jm
    return jm * np.exp(1j * (m * x.phi_r + p_z * x.z - energy * x.t))


def plane_wave(p_vec: Sequence[float], energy: float, x: SpaceTimePoint) -> complex:
    """exp(-i p x) = exp(-i (E t - p.r))."""
    r = x.cartesian()
    return complex(np.exp(-1j * (energy * x.t - float(np.dot(p_vec, r)))))


def jacobi_anger(p_perp: float, p_z: float, phi_p: float, x: SpaceTimePoint, max_abs_m: int,
                 energy: float) -> complex:
    """Sum_{|m| <= M} i^m exp(-i m phi_p) mode_m(x); converges to the plane wave."""
    total = 0.0 + 0.0j
    for m in range(-max_abs_m, max_abs_m + 1):
        total += 1j ** (m % 4) * np.exp(-1j * m * phi_p) * scalar_mode(p_perp, p_z, m, x, energy=energy)
    return total


# -----------------------------------------------------------------------------
# Evolved-state coefficients
# -----------------------------------------------------------------------------


class ScalarCoefficient(NamedTuple):
    m: int
    E1: float
    weight: complex


def _prefactor(cfg: ScalarDecayConfig) -> complex:
    # -i lambda/(4 pi v (2E)^(3/2)); the sign follows S_fi = -i lambda N (2 pi)^4 delta
    return -1j * cfg.coupling / (4 * math.pi * cfg.v * (2 * cfg.E) ** 1.5)


def _p1(cfg: ScalarDecayConfig, E1: float) -> float:
    return math.sqrt((E1 - cfg.mu1) * (E1 + cfg.mu1))


def scalar_evolved_coefficients(cfg: ScalarDecayConfig, max_abs_m: int = 32,
                                E1_values: Optional[Sequence[float]] = None) -> List[ScalarCoefficient]:
    """Mode weights -i lambda/(4 pi v (2E)^(3/2)) (p1/E1) (-1)^m.

    Mode m is carried by particle 1 and -m by particle 2.  Integration over
    |p1| is left to the caller (see :func:`scalar_state_modesum`).  Energies
    default to ``cfg.E1``.
    """
    if E1_values is None:
        if cfg.E1 is None:
            raise DomainError("no E1 values given")
        E1_values = (cfg.E1,)
    pref = _prefactor(cfg)
    out = []
    for E1 in E1_values:
        scalar_cos_theta0(cfg, E1)
        w = pref * _p1(cfg, E1) / E1
        for m in range(-max_abs_m, max_abs_m + 1):
            out.append(ScalarCoefficient(m, float(E1), w * (-1) ** (m % 2)))
    return out


def _kinematics(cfg: ScalarDecayConfig, E1: float):
    c = scalar_cos_theta0(cfg, E1)
    s = math.sqrt(max((1 - c) * (1 + c), 0.0))
    p1 = _p1(cfg, E1)
    return p1, p1 * s, p1 * c, cfg.p - p1 * c


def _p1_grid(cfg: ScalarDecayConfig, n_p: int):
    lo, hi = scalar_energy_range(cfg)
    p_lo, p_hi = _p1(cfg, lo), _p1(cfg, hi)
    panels = max(1, math.ceil(n_p / 16))
    return gauss_legendre(p_lo, p_hi, panels)


def _E1_of_p1(cfg: ScalarDecayConfig, p1: float) -> float:
    return math.sqrt(p1 * p1 + cfg.mu1 ** 2)


def scalar_state_modesum(cfg: ScalarDecayConfig, x1: SpaceTimePoint, x2: SpaceTimePoint,
                         max_abs_m: int = 40, n_p: int = 64) -> complex:
    """Evolved state at (x1, x2) from the mode sum, |p1| integrated by Gauss-Legendre.

    Integrates d|p1| over the full two-body range (p1/E1 dp1 = dE1).
    """
    nodes, weights = _p1_grid(cfg, n_p)
    pref = _prefactor(cfg)
    total = 0.0 + 0.0j
    for p1, w in zip(nodes, weights):
        E1 = _E1_of_p1(cfg, float(p1))
        _, p_perp, p1z, p2z = _kinematics(cfg, E1)
        E2 = cfg.E - E1
        acc = 0.0 + 0.0j
        for m in range(-max_abs_m, max_abs_m + 1):
            acc += ((-1) ** (m % 2) * scalar_mode(p_perp, p1z, m, x1, energy=E1)
                    * scalar_mode(p_perp, p2z, -m, x2, energy=E2))
        total += w * pref * (p1 / E1) * acc
    return total


def scalar_state_direct(cfg: ScalarDecayConfig, x1: SpaceTimePoint, x2: SpaceTimePoint,
                        n_p: int = 64, n_phi: int = 256) -> complex:
    """Evolved state at (x1, x2) by direct quadrature over plane waves.

    Uses the phase-space reduction to the cone cos theta1 = cos theta0(|p1|)
    and integrates the product of plane waves over |p1| (Gauss-Legendre) and
    the azimuth phi1 (trapezoid, spectrally accurate for periodic integrands),
    with p2 = p - p1.  No cylindrical-wave expansion is involved.
    """
    nodes, weights = _p1_grid(cfg, n_p)
    # -i lambda/(8 pi p sqrt(2E)) int p1 dp1/E1 int dphi1/(2 pi)
    pref = -1j * cfg.coupling / (8 * math.pi * cfg.p * math.sqrt(2 * cfg.E))
    phis = 2 * math.pi * np.arange(n_phi) / n_phi
    r1, r2 = x1.cartesian(), x2.cartesian()
    total = 0.0 + 0.0j
    for p1, w in zip(nodes, weights):
        E1 = _E1_of_p1(cfg, float(p1))
        _, p_perp, p1z, p2z = _kinematics(cfg, E1)
        E2 = cfg.E - E1
        px, py = p_perp * np.cos(phis), p_perp * np.sin(phis)
        ph1 = px * r1[0] + py * r1[1] + p1z * r1[2] - E1 * x1.t
        ph2 = -px * r2[0] - py * r2[1] + p2z * r2[2] - E2 * x2.t
        total += w * pref * (p1 / E1) * np.mean(np.exp(1j * (ph1 + ph2)))
    return total


# -----------------------------------------------------------------------------
# Twisted initial scalar
# -----------------------------------------------------------------------------


class TwistedScalarCoefficient(NamedTuple):
    m1: int
    m2: int
    weight: complex
    p1_perp: float
    p1_z: float
    p2_perp: float
    p2_z: float


def scalar_twisted_coefficients(cfg: ScalarDecayConfig, theta: float, m: int, E1: float,
                                theta1: float, max_abs_m: int = 32) -> List[TwistedScalarCoefficient]:
    """Mode weights for an initial Bessel scalar (cone angle ``theta``, OAM ``m``).

    At fixed (|p1|, theta1) only the two initial plane-wave components at
    azimuth phi1 +- delta contribute.  Their sum gives

        weight = -i lambda/(4 pi v (2E)^(3/2)) (p1/E1) F(theta, theta1, theta0) cos(m delta - m2 psi),

    where psi is the azimuth of p2 relative to p1, with m1 + m2 = m.  The
    caller integrates dp1 and sin(theta1) dtheta1.
    """
    theta0 = math.acos(scalar_cos_theta0(cfg, E1))
    d = delta_angle(theta, theta1, theta0)
    F = weight_F(theta, theta1, theta0)
    p, p1 = cfg.p, _p1(cfg, E1)
    # p1 at azimuth 0, initial component at azimuth +delta
    p2x = p * math.sin(theta) * math.cos(d) - p1 * math.sin(theta1)
    p2y = p * math.sin(theta) * math.sin(d)
    p2_perp = math.hypot(p2x, p2y)
    psi = math.atan2(p2y, p2x)
    p2_z = p * math.cos(theta) - p1 * math.cos(theta1)
    pref = _prefactor(cfg) * (p1 / E1) * F
    out = []
    for m1 in range(-max_abs_m, max_abs_m + 1):
        m2 = m - m1
        out.append(TwistedScalarCoefficient(m1, m2, pref * math.cos(m * d - m2 * psi),
                                            p1 * math.sin(theta1), p1 * math.cos(theta1), p2_perp, p2_z))
    return out
