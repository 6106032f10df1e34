"""
Evolved electron-photon states.

Final states are expanded over Bessel modes of the electron and the photon.
Each term of the expansion is an :class:`EvolvedCoefficient`: quantum labels
(m', lam', m_g, lam_g), a complex weight and the kinematic tags needed to
evaluate the two mode functions.  The global phase-space volume factor is
set to one, so weights are defined up to that constant.

Weights are pointwise integrand values.  Quadrature over omega (and over the
photon polar angle for a twisted initial electron) enters through the
``measure`` field, which the grid builders fill in and
:func:`sample_wavefunction` multiplies back.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .amplitudes import (
    _m_coeff,
    _pw_pair,
    branch_for_phi,
    branch_sign,
    helicity_sum_S,
    twisted_C,
)
from .angular import cone_geometry, delta_angle, delta_prime, weight_F
from .errors import ConvergenceError, DomainError
from .kinematics import (
    M_E,
    MediumModel,
    cherenkov_cos_angle,
    emission_omega_range,
    momentum,
    overlap_interval,
    speed,
)
from .numerics import (
    HalfInt,
    bessel_j_orders,
    doubled,
    gauss_legendre,
    i_power,
    sqrt_singular_nodes,
    wigner_d_half,
    wigner_d_one,
)
from .spin_basis import CHI, basis_bispinor, photon_polarization_vector

SQRT2 = math.sqrt(2.0)


# -----------------------------------------------------------------------------
# Data types
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SpaceTimePoint:
    t: float = 0.0
    r_perp: float = 0.0
    phi_r: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if self.r_perp < 0:
            raise DomainError("r_perp must be non-negative")

    def cartesian(self) -> np.ndarray:
        return np.array([self.r_perp * math.cos(self.phi_r), self.r_perp * math.sin(self.phi_r), self.z])


@dataclass(frozen=True)
class ModeTruncation:
    """Truncation of the mode sums and quadrature grids.

    ``omega_grid`` lists the photon energies at which coefficients are built;
    ``omega_weights`` are the matching quadrature weights (trapezoid weights
    are used when omitted, weight 1 for a single frequency).
    """

    max_abs_m: int = 32
    omega_grid: Tuple[float, ...] = ()
    theta_grid_size: int = 32
    omega_weights: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.max_abs_m < 1:
            raise DomainError("max_abs_m must be >= 1")
        if self.theta_grid_size < 1:
            raise DomainError("theta_grid_size must be >= 1")
        object.__setattr__(self, "omega_grid", tuple(float(w) for w in self.omega_grid))
        if self.omega_weights is not None:
            object.__setattr__(self, "omega_weights", tuple(float(w) for w in self.omega_weights))
            if len(self.omega_weights) != len(self.omega_grid):
                raise DomainError("omega_weights must match omega_grid in length")

    @classmethod
    def gauss(cls, omega_lo: float, omega_hi: float, n_omega: int, max_abs_m: int = 32,
              theta_grid_size: int = 32) -> "ModeTruncation":
        """Gauss-Legendre omega grid on [omega_lo, omega_hi] (``n_omega`` rounded up to a multiple of 16)."""
        panels = max(1, math.ceil(n_omega / 16))
        x, w = gauss_legendre(omega_lo, omega_hi, panels)
        return cls(max_abs_m=max_abs_m, omega_grid=tuple(x), theta_grid_size=theta_grid_size,
                   omega_weights=tuple(w))

    def weights(self) -> Tuple[float, ...]:
        if self.omega_weights is not None:
            return self.omega_weights
        g = self.omega_grid
        if len(g) <= 1:
            return (1.0,) * len(g)
        return tuple(np.trapezoid(np.eye(len(g)), g, axis=1)) if hasattr(np, "trapezoid") else \
            tuple(np.trapz(np.eye(len(g)), g, axis=1))

    @property
    def m_gamma_values(self) -> range:
        return range(-self.max_abs_m, self.max_abs_m + 1)


@dataclass(frozen=True)
class EvolvedCoefficient:
    """One term of the two-particle mode expansion.

    ``j_total`` is the TAM projection of the initial electron (lam for a plane
    wave along z, m for a Bessel state); construction asserts
    m' + m_g = j_total.
    """

    m_prime: HalfInt
    lambda_prime: HalfInt
    m_gamma: int
    lambda_gamma: int
    omega: float
    weight: complex
    j_total: HalfInt
    theta_g: Optional[float] = None
    branch: Optional[str] = None
    k_perp: float = 0.0
    k_z: float = 0.0
    p_perp_f: float = 0.0
    p_z_f: float = 0.0
    E_f: float = 0.0
    measure: float = 1.0
    kind: str = "pw"

    def __post_init__(self):
        object.__setattr__(self, "m_prime", HalfInt.of(self.m_prime))
        object.__setattr__(self, "lambda_prime", HalfInt.of(self.lambda_prime))
        object.__setattr__(self, "j_total", HalfInt.of(self.j_total))
        if self.m_prime.twice_value + 2 * self.m_gamma != self.j_total.twice_value:
            raise AssertionError(
                f"TAM violation: m'={self.m_prime} + m_g={self.m_gamma} != {self.j_total}"
            )

    @property
    def theta_p(self) -> float:
        return math.atan2(self.p_perp_f, self.p_z_f)


@dataclass
class WavefunctionSample:
    """Sampled two-particle amplitude: ``values[a, b]`` has bispinor index a, vector index b."""

    values: np.ndarray
    tail_estimate: float
    warning: bool
    n_terms: int

    def __array__(self, dtype=None):
        return self.values if dtype is None else self.values.astype(dtype)


# -----------------------------------------------------------------------------
# Mode functions
# -----------------------------------------------------------------------------


def _check_on_shell(p_perp, p_z):
    if p_perp < 0:
        raise DomainError("transverse momentum must be non-negative")


def electron_bessel_mode(p_perp: float, p_z: float, m_prime, lambda_prime, x: SpaceTimePoint,
                         m_e: float = M_E) -> np.ndarray:
    """Electron Bessel mode psi_{p_perp p_z m' lam'}(x), a (4,) bispinor."""
    _check_on_shell(p_perp, p_z)
    mp2 = doubled(m_prime)
    if mp2 % 2 == 0:
        raise DomainError("electron TAM projection must be half-integer")
    E_f = math.sqrt(p_perp * p_perp + p_z * p_z + m_e * m_e)
    theta_p = math.atan2(p_perp, p_z)
    arg = p_perp * x.r_perp
    orders = ((mp2 - 1) // 2, (mp2 + 1) // 2)
    tab = bessel_j_orders(max(abs(o) for o in orders), arg)
    out = np.zeros(4, dtype=complex)
    for s2 in (1, -1):
        order = (mp2 - s2) // 2
        jn = tab[abs(order)] * (-1 if order < 0 and abs(order) % 2 else 1)
        out += (i_power(-s2) * wigner_d_half(s2 / 2, lambda_prime, theta_p) * jn
                * np.exp(1j * order * x.phi_r) * basis_bispinor(s2 / 2, E_f, lambda_prime, m_e))
    return out * np.exp(-1j * (E_f * x.t - p_z * x.z))


def photon_bessel_mode(k_perp: float, k_z: float, m: int, lam_g: int, x: SpaceTimePoint,
                       omega: Optional[float] = None) -> np.ndarray:
    """Photon Bessel mode A_{k_perp k_z m lam_g}(x), a (3,) vector.

    ``omega`` sets the time dependence; it defaults to |k| (vacuum).
    """
    if doubled(lam_g) not in (-2, 2):
        raise DomainError(f"photon helicity must be +-1, got {lam_g!r}")
    _check_on_shell(k_perp, k_z)
    if omega is None:
        omega = math.hypot(k_perp, k_z)
    theta_g = math.atan2(k_perp, k_z)
    arg = k_perp * x.r_perp
    tab = bessel_j_orders(abs(m) + 1, arg)
    out = np.zeros(3, dtype=complex)
    for sg in (-1, 0, 1):
        order = m - sg
        jn = tab[abs(order)] * (-1 if order < 0 and abs(order) % 2 else 1)
        out += (i_power(-2 * sg) * wigner_d_one(sg, lam_g, theta_g) * jn
                * np.exp(1j * order * x.phi_r) * CHI[sg])
    return out * np.exp(-1j * (omega * x.t - k_z * x.z))


def photon_linear_mode(k_perp: float, k_z: float, m: int, pol: str, x: SpaceTimePoint,
                       omega: Optional[float] = None) -> np.ndarray:
    """Photon Bessel mode with linear polarization ``pol`` in {'parallel', 'perp'}."""
    a_plus = photon_bessel_mode(k_perp, k_z, m, 1, x, omega)
    a_minus = photon_bessel_mode(k_perp, k_z, m, -1, x, omega)
    if pol == "parallel":
        return -(a_plus - a_minus) / SQRT2
    if pol == "perp":
        return 1j * (a_plus + a_minus) / SQRT2
    raise DomainError(f"linear polarization must be 'parallel' or 'perp', got {pol!r}")


# -----------------------------------------------------------------------------
# Coefficient tables
# -----------------------------------------------------------------------------


def _pw_kinematics(E: float, omega: float, medium: MediumModel, m_e: float):
    cos0 = cherenkov_cos_angle(E, omega, medium, m_e)
    n = medium.n(omega)
    k = omega * n
    sin0 = math.sqrt((1 - cos0) * (1 + cos0))
    k_perp, k_z = k * sin0, k * cos0
    p_z_f = momentum(E, m_e) - k_z
    return dict(theta0=math.acos(cos0), n=n, k_perp=k_perp, k_z=k_z, p_perp_f=k_perp,
                p_z_f=p_z_f, theta_p=math.atan2(k_perp, p_z_f), E_f=E - omega)


def evolved_pw_coefficients(E: float, lam, medium: MediumModel, omega: float,
                            truncation: Optional[ModeTruncation] = None, m_e: float = M_E,
                            branch: str = "plus", measure: float = 1.0) -> List[EvolvedCoefficient]:
    """Mode-expansion coefficients for a plane-wave initial electron along z.

    weight = i^(lam+1) / (v (2E)^(3/2)) (-1)^m_g (M_{lam,0} - M_{lam,2lam}), with
    m' = lam - m_g.  The weight does not depend on the azimuthal branch; the
    tag is carried for downstream bookkeeping.
    """
    truncation = truncation or ModeTruncation()
    branch_sign(branch)
    l2 = doubled(lam)
    if l2 not in (-1, 1):
        raise DomainError("electron helicity must be +-1/2")
    kin = _pw_kinematics(E, omega, medium, m_e)
    pref = i_power(l2 + 2) / (speed(E, m_e) * (2 * E) ** 1.5)
    out = []
    for lp2 in (1, -1):
        for lg in (1, -1):
            m0, m2 = _pw_pair(l2, lp2, lg, E, kin["E_f"], kin["theta_p"], kin["theta0"], m_e)
            for mg in truncation.m_gamma_values:
                out.append(EvolvedCoefficient(
                    m_prime=HalfInt(l2 - 2 * mg), lambda_prime=HalfInt(lp2), m_gamma=mg,
                    lambda_gamma=lg, omega=omega, weight=pref * (-1) ** mg * (m0 - m2),
                    j_total=HalfInt(l2), theta_g=kin["theta0"], branch=branch,
                    k_perp=kin["k_perp"], k_z=kin["k_z"], p_perp_f=kin["p_perp_f"],
                    p_z_f=kin["p_z_f"], E_f=kin["E_f"], measure=measure, kind="pw"))
    return out


def evolved_tw_coefficients(E: float, lam, m, theta: float, medium: MediumModel, omega: float,
                            theta_g: float, truncation: Optional[ModeTruncation] = None,
                            m_e: float = M_E, measure: float = 1.0) -> List[EvolvedCoefficient]:
    """Mode-expansion coefficients for a Bessel initial electron (opening angle theta, TAM m).

    weight = i / (v (2E)^(3/2)) F(theta, theta_g, theta0) C_{lam' lam_g m_g},
    with m' = m - m_g.  Raises :class:`OutsideOverlap` if theta_g is not
    strictly inside the cone-overlap interval.
    """
    truncation = truncation or ModeTruncation()
    l2 = doubled(lam)
    m2 = doubled(m)
    if l2 not in (-1, 1):
        raise DomainError("electron helicity must be +-1/2")
    if m2 % 2 == 0:
        raise DomainError("electron TAM projection must be half-integer")
    geo = cone_geometry(E, omega, theta, theta_g, medium, m_e)
    pref = 1j / (speed(E, m_e) * (2 * E) ** 1.5) * geo.F
    p_perp_f = geo.p_f * math.sin(geo.theta_p)
    p_z_f = geo.p_f * math.cos(geo.theta_p)
    out = []
    for lp2 in (1, -1):
        for lg in (1, -1):
            for mg in truncation.m_gamma_values:
                c = twisted_C(l2 / 2, lp2 / 2, lg, m2 / 2, mg, E, omega, theta, geo.theta_p,
                              theta_g, geo.delta, geo.delta_p, m_e)
                out.append(EvolvedCoefficient(
                    m_prime=HalfInt(m2 - 2 * mg), lambda_prime=HalfInt(lp2), m_gamma=mg,
                    lambda_gamma=lg, omega=omega, weight=pref * c, j_total=HalfInt(m2),
                    theta_g=theta_g, k_perp=geo.k * math.sin(theta_g),
                    k_z=geo.k * math.cos(theta_g), p_perp_f=p_perp_f, p_z_f=p_z_f,
                    E_f=E - omega, measure=measure, kind="tw"))
    return out


def _omega_measure(medium: MediumModel, omega: float, w: float) -> float:
    # d(omega n)/n = (d(omega n)/d omega) d omega / n
    return w * medium.d_omega_n(omega) / medium.n(omega)


def evolved_pw_state(E: float, lam, medium: MediumModel, truncation: ModeTruncation,
                     m_e: float = M_E) -> List[EvolvedCoefficient]:
    """Coefficients on the omega grid with quadrature measures attached."""
    if not truncation.omega_grid:
        raise DomainError("truncation.omega_grid is empty")
    out = []
    for omega, w in zip(truncation.omega_grid, truncation.weights()):
        out.extend(evolved_pw_coefficients(E, lam, medium, omega, truncation, m_e,
                                           measure=_omega_measure(medium, omega, w)))
    return out


def evolved_tw_state(E: float, lam, m, theta: float, medium: MediumModel,
                     truncation: ModeTruncation, m_e: float = M_E) -> List[EvolvedCoefficient]:
    """Coefficients on the (omega, theta_g) grid with quadrature measures attached.

    theta_g nodes come from the sine-substituted rule on the overlap interval,
    so the integrable border singularity of F is never sampled.
    """
    if not truncation.omega_grid:
        raise DomainError("truncation.omega_grid is empty")
    out = []
    for omega, w in zip(truncation.omega_grid, truncation.weights()):
        theta0 = math.acos(cherenkov_cos_angle(E, omega, medium, m_e))
        nodes, weights = sqrt_singular_nodes(overlap_interval(theta, theta0), 1,
                                             truncation.theta_grid_size)
        w_omega = _omega_measure(medium, omega, w)
        for tg, wt in zip(nodes, weights):
            out.extend(evolved_tw_coefficients(E, lam, m, theta, medium, omega, float(tg),
                                               truncation, m_e,
                                               measure=w_omega * wt * math.sin(tg)))
    return out


def default_omega_truncation(E: float, medium: MediumModel, omega_lo: float, omega_hi: float,
                             n_omega: int = 16, max_abs_m: int = 32, theta_grid_size: int = 32,
                             m_e: float = M_E) -> ModeTruncation:
    """Gauss-Legendre omega grid on the requested range cut to the emission region."""
    lo, hi = emission_omega_range(E, medium, omega_lo, omega_hi, m_e)
    return ModeTruncation.gauss(lo, hi, n_omega, max_abs_m, theta_grid_size)


def table_by_labels(coefficients: Iterable[EvolvedCoefficient]) -> Dict[Tuple[int, int, int], complex]:
    """Sum weight * measure per (2 lam', lam_g, m_g)."""
    out: Dict[Tuple[int, int, int], complex] = {}
    for c in coefficients:
        key = (c.lambda_prime.twice_value, c.lambda_gamma, c.m_gamma)
        out[key] = out.get(key, 0.0) + c.weight * c.measure
    return out


def tw_table_theta_integrated(E: float, lam, m, theta: float, medium: MediumModel, omega: float,
                              truncation: Optional[ModeTruncation] = None, m_e: float = M_E,
                              rtol: float = 1e-7) -> Dict[Tuple[int, int, int], complex]:
    """Twisted weights integrated over theta_g (with sin theta_g) at fixed omega.

    Keys are (2 lam', lam_g, m_g).  The whole table is integrated at once with
    the singular-endpoint rule, doubling the panel count until the largest
    entry change falls below ``rtol`` times the largest entry.  For very narrow
    overlap intervals (theta of order 1e-5 rad) the integrand carries relative
    rounding noise near 1e-8, so tighter ``rtol`` may not be reachable.
    """
    truncation = truncation or ModeTruncation()
    theta0 = math.acos(cherenkov_cos_angle(E, omega, medium, m_e))
    interval = overlap_interval(theta, theta0)
    keys = [(lp2, lg, mg) for lp2 in (1, -1) for lg in (1, -1) for mg in truncation.m_gamma_values]

    def table_at(tg: float) -> np.ndarray:
        coeffs = evolved_tw_coefficients(E, lam, m, theta, medium, omega, tg, truncation, m_e)
        d = {(c.lambda_prime.twice_value, c.lambda_gamma, c.m_gamma): c.weight for c in coeffs}
        return np.array([d[k] for k in keys]) * math.sin(tg)

    def estimate(panels: int) -> np.ndarray:
        nodes, weights = sqrt_singular_nodes(interval, panels)
        return sum(w * table_at(float(t)) for t, w in zip(nodes, weights))

    prev = estimate(1)
    panels = 2
    while True:
        cur = estimate(panels)
        scale = float(np.max(np.abs(cur)))
        if float(np.max(np.abs(cur - prev))) <= rtol * scale:
            break
        if panels >= 256:
            raise ConvergenceError("theta_g integration of the twisted table did not converge")
        prev, panels = cur, panels * 2
    return dict(zip(keys, cur))


def pw_table(E: float, lam, medium: MediumModel, omega: float,
             truncation: Optional[ModeTruncation] = None,
             m_e: float = M_E) -> Dict[Tuple[int, int, int], complex]:
    """Plane-wave weights keyed by (2 lam', lam_g, m_g)."""
    return {(c.lambda_prime.twice_value, c.lambda_gamma, c.m_gamma): c.weight
            for c in evolved_pw_coefficients(E, lam, medium, omega, truncation, m_e)}


# -----------------------------------------------------------------------------
# Momentum representation
# -----------------------------------------------------------------------------


@dataclass
class MomentumRepResult:
    """On-shell coefficient (4, 3) multiplying the conservation delta, plus residuals."""

    coefficient: np.ndarray
    residuals: Dict[str, float]
    on_shell: bool
    branch: Optional[str] = None

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def _solve_omega(k: float, medium: MediumModel) -> float:
    if medium.kind == "constant":
        return k / medium.n_const
    lo, hi = medium.omega_range
    f = lambda w: w * medium.n(w) - k
    if f(lo) * f(hi) > 0:
        raise DomainError(f"|k| = {k} eV is outside the tabulated range of omega n(omega)")
    return brentq(f, lo, hi, xtol=1e-14 * hi, rtol=1e-15)


def _norm_factor(E: float, E_f: float, omega: float, n: float) -> float:
    return math.sqrt(4 * math.pi / (2 * E * 2 * E_f * 2 * omega * n * n))


def momentum_rep_coefficient(E: float, lam, p_prime: Sequence[float], k: Sequence[float],
                             medium: MediumModel, m=None, theta: Optional[float] = None,
                             m_e: float = M_E, tol: float = 1e-9) -> MomentumRepResult:
    """Momentum-representation evolved state at (p', k).

    Plane-wave initial electron (``m`` and ``theta`` omitted): the coefficient
    is i N exp(i lam phi') S, where S is the helicity sum and N the
    normalization; the (2 pi)^4 delta is not included.  Bessel initial
    electron: the coefficient of the conservation delta after the azimuthal
    integration, built from the basis bispinors.  Off-shell input gives a zero
    coefficient and a nonzero residual report rather than an error.
    """
    p_prime = np.asarray(p_prime, dtype=float)
    kv = np.asarray(k, dtype=float)
    p = momentum(E, m_e)
    kmag = float(np.linalg.norm(kv))
    zero = np.zeros((4, 3), dtype=complex)
    if kmag == 0:
        return MomentumRepResult(zero, {"energy": math.inf}, False)
    omega = _solve_omega(kmag, medium)
    n = medium.n(omega)
    E_f = math.sqrt(float(p_prime @ p_prime) + m_e * m_e)
    res = {"energy": abs(E_f + omega - E) / E}
    twisted = m is not None
    if twisted:
        if theta is None:
            raise DomainError("a Bessel initial electron needs theta")
        total = p_prime + kv
        res["longitudinal"] = abs(total[2] - p * math.cos(theta)) / p
        res["transverse"] = abs(math.hypot(total[0], total[1]) - p * math.sin(theta)) / p
    else:
        res["momentum"] = float(np.linalg.norm(p_prime + kv - np.array([0.0, 0.0, p]))) / p
    if max(res.values()) > tol:
        return MomentumRepResult(zero, res, False)

    theta_g = math.atan2(math.hypot(kv[0], kv[1]), kv[2])
    phi_g = math.atan2(kv[1], kv[0])
    theta_p = math.atan2(math.hypot(p_prime[0], p_prime[1]), p_prime[2])
    phi_p = math.atan2(p_prime[1], p_prime[0])
    N = _norm_factor(E, E_f, omega, n)
    l2 = doubled(lam)

    if not twisted:
        S = helicity_sum_S(l2 / 2, E, E_f, theta_p, theta_g, phi_g, phi_p=phi_p, m_e=m_e)
        coef = 1j * N * np.exp(0.5j * l2 * phi_p) * S
        return MomentumRepResult(coef, res, True, branch_for_phi(phi_g))

    m2 = doubled(m)
    theta0 = math.acos(cherenkov_cos_angle(E, omega, medium, m_e))
    delta = delta_angle(theta, theta_g, theta0)
    F = weight_F(theta, theta_g, theta0)
    khat = kv / kmag
    theta_kpp = math.atan2(float(np.linalg.norm(np.cross(khat, p_prime))), float(khat @ p_prime))
    delta_p = delta_prime(theta_p, theta_g, theta_kpp)
    v = speed(E, m_e)
    pref = i_power(2 - m2) * (E - omega) * N / (v * E * omega * n) * F
    coef = np.zeros((4, 3), dtype=complex)
    for lp2 in (1, -1):
        for lg in (1, -1):
            e = photon_polarization_vector(theta_g, phi_g, lg)
            for spp2 in (1, -1):
                d_fin = wigner_d_half(spp2 / 2, lp2 / 2, theta_p)
                U = basis_bispinor(spp2 / 2, E_f, lp2 / 2, m_e)
                acc = 0.0
                for s2 in (1, -1):
                    for sg in (0, s2):
                        mc = _m_coeff(l2, lp2, lg, s2, sg, E, E_f, theta, theta_p, theta_g, m_e)
                        acc += mc * math.cos((m2 - s2) / 2 * delta
                                             + ((s2 - spp2) / 2 - sg) * delta_p)
                coef += (np.exp(0.5j * (m2 - spp2) * phi_g) * d_fin * acc) * np.outer(U, e)
    return MomentumRepResult(pref * coef, res, True)


# -----------------------------------------------------------------------------
# Space-time sampling
# -----------------------------------------------------------------------------


def _bessel_tail_bound(n: int, x: float) -> float:
    """Upper bound on |J_n(x)|, n >= 0: (x/2)^n / n!."""
    if n <= 0:
        return 1.0
    if x == 0:
        return 0.0
    return math.exp(n * math.log(x / 2) - math.lgamma(n + 1))


def _tail_estimate(coefficients: Sequence[EvolvedCoefficient], x_e: SpaceTimePoint,
                   x_g: SpaceTimePoint) -> float:
    """Rough size of the omitted |m_g| > M terms from the Bessel decay of both modes."""
    if not coefficients:
        return 0.0
    max_m = max(abs(c.m_gamma) for c in coefficients)
    per_term = sum(abs(c.weight * c.measure) for c in coefficients) / max(
        1, sum(1 for c in coefficients if c.m_gamma == 0))
    per_term /= 2 * max_m + 1
    x_e_max = max(c.p_perp_f for c in coefficients) * x_e.r_perp
    x_g_max = max(c.k_perp for c in coefficients) * x_g.r_perp
    tail = 0.0
    for j in range(max_m + 1, max_m + 200):
        b = min(_bessel_tail_bound(j - 2, x_e_max), _bessel_tail_bound(j - 2, x_g_max))
        tail += 2 * b
        if b < 1e-18 * max(tail, 1e-300):
            break
    return per_term * tail * sum(1 for c in coefficients if c.m_gamma == 0)


def sample_wavefunction(coefficients: Sequence[EvolvedCoefficient], x_e: SpaceTimePoint,
                        x_g: SpaceTimePoint, truncation: Optional[ModeTruncation] = None,
                        m_e: float = M_E, tail_tol: float = 1e-8) -> WavefunctionSample:
    """Sum weight * measure * psi_{m' lam'}(x_e) (x) A_{m_g lam_g}(x_g) over coefficients.

    Coefficients built by :func:`evolved_pw_state` / :func:`evolved_tw_state`
    carry their quadrature measure, so the sum is the omega (and theta_g)
    integral.  ``truncation`` optionally drops terms with |m_g| above its
    max_abs_m.  The result carries a tail estimate for the omitted modes and a
    warning flag when it exceeds ``tail_tol`` relative to the result.
    """
    coeffs = list(coefficients)
    if truncation is not None:
        coeffs = [c for c in coeffs if abs(c.m_gamma) <= truncation.max_abs_m]
    values = np.zeros((4, 3), dtype=complex)
    e_cache: Dict = {}
    g_cache: Dict = {}
    for c in coeffs:
        ek = (c.p_perp_f, c.p_z_f, c.m_prime.twice_value, c.lambda_prime.twice_value)
        if ek not in e_cache:
            e_cache[ek] = electron_bessel_mode(c.p_perp_f, c.p_z_f, c.m_prime, c.lambda_prime, x_e, m_e)
        gk = (c.k_perp, c.k_z, c.m_gamma, c.lambda_gamma, c.omega)
        if gk not in g_cache:
            g_cache[gk] = photon_bessel_mode(c.k_perp, c.k_z, c.m_gamma, c.lambda_gamma, x_g, c.omega)
        values += c.weight * c.measure * np.outer(e_cache[ek], g_cache[gk])
    tail = _tail_estimate(coeffs, x_e, x_g)
    scale = float(np.max(np.abs(values))) if coeffs else 0.0
    warning = tail > tail_tol * max(scale, 1e-300)
    return WavefunctionSample(values=values, tail_estimate=tail, warning=bool(warning),
                              n_terms=len(coeffs))


# -----------------------------------------------------------------------------
# Serialization
# -----------------------------------------------------------------------------

CSV_FIELDS = ("omega_eV", "theta_g_rad", "m_prime2", "lambda_prime2", "m_gamma", "lambda_gamma",
              "re_weight", "im_weight", "branch")


def coefficient_rows(coefficients: Iterable[EvolvedCoefficient]) -> List[tuple]:
    rows = []
    for c in coefficients:
        rows.append((c.omega, c.theta_g if c.theta_g is not None else float("nan"),
                     c.m_prime.twice_value, c.lambda_prime.twice_value, c.m_gamma, c.lambda_gamma,
                     c.weight.real, c.weight.imag, c.branch or ""))
    return rows


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        if math.isnan(x):
            return ""
        return "%.9g" % (x + 0.0)
    return str(x)


def coefficients_to_csv(coefficients: Iterable[EvolvedCoefficient], header_lines: Sequence[str] = ()) -> str:
    """CSV text with '#' comment header lines and the documented column schema."""
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for row in coefficient_rows(coefficients):
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()
