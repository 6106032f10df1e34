"""
Independent numerical oracles.

Each oracle recomputes a quantity by a route that shares as little code as
possible with the production path:

* azimuthal integrals by root finding (``brentq``) or by a Gaussian-regularized
  delta function integrated with ``scipy.integrate.quad``, with the final
  electron direction rebuilt from momentum vectors at each azimuth;
* the two-point formula in 40-digit arithmetic (``mpmath``) from the arccos
  definition of delta and delta';
* the scalar evolved state by direct plane-wave quadrature.

:func:`run_oracle_suite` bundles them for the command line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import mpmath as mp
import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .amplitudes import _m_coeff, twisted_C
from .angular import cone_geometry
from .evolved import SpaceTimePoint
from .kinematics import M_E, MediumModel, cherenkov_cos_angle, momentum, overlap_interval
from .scalar_oracle import (
    ScalarDecayConfig,
    jacobi_anger,
    plane_wave,
    scalar_closure,
    scalar_state_direct,
    scalar_state_modesum,
)


@dataclass(frozen=True)
class TwistedCase:
    """A twisted-emission geometry with labels, used by the azimuthal oracles."""

    E: float
    omega: float
    n: float
    theta: float
    theta_g: float
    lam2: int
    lam_p2: int
    lam_g: int
    m2: int
    m_g: int

    @property
    def medium(self) -> MediumModel:
        return MediumModel.constant(self.n)


@dataclass(frozen=True)
class OracleResult:
    name: str
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.error <= self.tolerance)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: error {self.error:.3e} (tol {self.tolerance:.1e})"


def random_twisted_cases(n_cases: int, seed: int = 12345, border_fraction: float = 0.1) -> List[TwistedCase]:
    """Random geometries with theta_g kept ``border_fraction`` of the interval away from its ends."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n_cases:
        E = M_E + rng.uniform(0.2e6, 3e6)
        n = rng.uniform(1.3, 2.0)
        omega = rng.uniform(1e-3, 0.3) * (E - M_E)
        try:
            theta0 = math.acos(cherenkov_cos_angle(E, omega, MediumModel.constant(n)))
        except Exception:
            continue
        theta = math.radians(rng.uniform(3, 50))
        iv = overlap_interval(theta, theta0)
        u = rng.uniform(border_fraction, 1 - border_fraction)
        theta_g = iv.lower + u * (iv.upper - iv.lower)
        out.append(TwistedCase(E=E, omega=omega, n=n, theta=theta, theta_g=theta_g,
                               lam2=int(rng.choice([1, -1])), lam_p2=int(rng.choice([1, -1])),
                               lam_g=int(rng.choice([1, -1])), m2=int(rng.choice([-5, -3, -1, 1, 3, 5])),
                               m_g=int(rng.integers(-4, 5))))
    return out


def production_FC(case: TwistedCase) -> float:
    """F * C from the production code path."""
    geo = cone_geometry(case.E, case.omega, case.theta, case.theta_g, case.medium)
    c = twisted_C(case.lam2 / 2, case.lam_p2 / 2, case.lam_g, case.m2 / 2, case.m_g, case.E,
                  case.omega, case.theta, geo.theta_p, case.theta_g, geo.delta, geo.delta_p)
    return geo.F * c


def _vectors(case: TwistedCase, phi: float):
    p = momentum(case.E)
    k = case.omega * case.n
    pv = p * np.array([math.sin(case.theta) * math.cos(phi), math.sin(case.theta) * math.sin(phi),
                       math.cos(case.theta)])
    kv = k * np.array([math.sin(case.theta_g), 0.0, math.cos(case.theta_g)])
    return pv, kv, pv - kv


def _integrand(case: TwistedCase, phi: float) -> complex:
    """sum_{sigma sigma_g} M(theta'(phi)) exp(i (m - sigma) phi - i (m' - sigma + sigma_g) phi'(phi))."""
    _, _, pf = _vectors(case, phi)
    theta_p = math.atan2(math.hypot(pf[0], pf[1]), pf[2])
    phi_p = math.atan2(pf[1], pf[0])
    mp2 = case.m2 - 2 * case.m_g
    E_p = case.E - case.omega
    total = 0.0 + 0.0j
    for s2 in (1, -1):
        for sg in (0, s2):
            coeff = _m_coeff(case.lam2, case.lam_p2, case.lam_g, s2, sg, case.E, E_p, case.theta,
                             theta_p, case.theta_g, M_E)
            total += coeff * np.exp(0.5j * (case.m2 - s2) * phi - 0.5j * (mp2 - s2 + 2 * sg) * phi_p)
    return total


def _cos_kp(case: TwistedCase, phi: float) -> float:
    return (math.cos(case.theta_g) * math.cos(case.theta)
            + math.sin(case.theta_g) * math.sin(case.theta) * math.cos(phi))


def _roots(case: TwistedCase) -> List[float]:
    c0 = cherenkov_cos_angle(case.E, case.omega, case.medium)
    g = lambda phi: _cos_kp(case, phi) - c0
    return [brentq(g, 0.0, math.pi, xtol=1e-15, rtol=1e-15),
            brentq(g, math.pi, 2 * math.pi, xtol=1e-15, rtol=1e-15)]


def root_oracle_FC(case: TwistedCase) -> complex:
    """Azimuthal delta integral evaluated as a sum over numerically located roots."""
    s = math.sin(case.theta_g) * math.sin(case.theta)
    return sum(_integrand(case, r) / (2 * math.pi * s * abs(math.sin(r))) for r in _roots(case))


def regularized_oracle_FC(case: TwistedCase, rel_width: float = 1e-4) -> complex:
    """Azimuthal integral with delta replaced by a narrow normalized Gaussian.

    The Gaussian width is ``rel_width * sin(theta) sin(theta_g)`` in cos(theta_kp);
    integration covers +-12 widths around each root with adaptive quadrature.
    """
    c0 = cherenkov_cos_angle(case.E, case.omega, case.medium)
    s = math.sin(case.theta_g) * math.sin(case.theta)
    eps = rel_width * s
    norm = 1 / (math.sqrt(2 * math.pi) * eps)

    def kernel(phi: float) -> float:
        u = (_cos_kp(case, phi) - c0) / eps
        return norm * math.exp(-0.5 * u * u) / (2 * math.pi)

    total = 0.0 + 0.0j
    for r in _roots(case):
        half = 12 * eps / (s * abs(math.sin(r)))
        a, b = r - half, r + half
        opts = dict(limit=200, epsabs=0.0, epsrel=1e-10, points=[r])
        re = quad(lambda ph: kernel(ph) * _integrand(case, ph).real, a, b, **opts)[0]
        im = quad(lambda ph: kernel(ph) * _integrand(case, ph).imag, a, b, **opts)[0]
        total += complex(re, im)
    return total


def mp_two_point_FC(case: TwistedCase, dps: int = 40) -> float:
    """F * C in ``dps``-digit arithmetic from the arccos definitions of delta and delta'.

    The two-point average (1/2)[exp(iA) + exp(-iA)] is evaluated as written and
    its imaginary part is checked to vanish.
    """
    with mp.workdps(dps):
        th, tg = mp.mpf(case.theta), mp.mpf(case.theta_g)
        E, w, n, me = mp.mpf(case.E), mp.mpf(case.omega), mp.mpf(case.n), mp.mpf(M_E)
        p = mp.sqrt(E * E - me * me)
        v = p / E
        c0 = 1 / (v * n) + w / (2 * E) * (n * n - 1) / (v * n)
        delta = mp.acos((c0 - mp.cos(tg) * mp.cos(th)) / (mp.sin(tg) * mp.sin(th)))
        k = w * n
        pf = [p * mp.sin(th) * mp.cos(delta) - k * mp.sin(tg), p * mp.sin(th) * mp.sin(delta),
              p * mp.cos(th) - k * mp.cos(tg)]
        pf_perp = mp.sqrt(pf[0] ** 2 + pf[1] ** 2)
        pf_abs = mp.sqrt(pf_perp ** 2 + pf[2] ** 2)
        theta_p = mp.atan2(pf_perp, pf[2])
        cos_kpp = (pf[0] * mp.sin(tg) + pf[2] * mp.cos(tg)) / pf_abs
        delta_p = mp.acos((cos_kpp - mp.cos(tg) * mp.cos(theta_p)) / (mp.sin(tg) * mp.sin(theta_p)))
        F = 1 / (mp.pi * mp.sin(tg) * mp.sin(th) * abs(mp.sin(delta)))
        E_p = E - w

        def dhalf(s2, l2, t):
            return mp.cos(t / 2) if s2 == l2 else -s2 * mp.sin(t / 2)

        def done(a, b, t):
            if a == 0 and b == 0:
                return mp.cos(t)
            if a == 0:
                return b * mp.sin(t) / mp.sqrt(2)
            if b == 0:
                return -a * mp.sin(t) / mp.sqrt(2)
            return (1 + a * b * mp.cos(t)) / 2

        l2, lp2, lg = case.lam2, case.lam_p2, case.lam_g
        e_ll = (mp.sqrt((E - me) * (E_p + me)) + l2 * lp2 * mp.sqrt((E_p - me) * (E + me)))
        mp2 = case.m2 - 2 * case.m_g
        total = mp.mpc(0)
        for s2 in (1, -1):
            for sg, kron in ((0, mp.mpf(1)), (s2, -mp.sqrt(2))):
                coeff = (-mp.sqrt(4 * mp.pi / mp.mpf("137.035999")) * s2 * l2 * e_ll
                         * dhalf(s2, l2, th) * dhalf(s2 - 2 * sg, lp2, theta_p) * done(sg, lg, tg) * kron)
                A = (mp.mpf(case.m2 - s2) / 2 * delta + mp.mpf(s2 - mp2 - 2 * sg) / 2 * delta_p)
                total += coeff * (mp.exp(1j * A) + mp.exp(-1j * A)) / 2
        if abs(mp.im(total)) > mp.mpf(10) ** (-dps + 10) * (1 + abs(total)):
            raise AssertionError("two-point sum has a nonzero imaginary part")
        return float(F * mp.re(total))


def relative_error(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


# -----------------------------------------------------------------------------
# Suite
# -----------------------------------------------------------------------------


def run_oracle_suite(n_cases: int = 50, seed: int = 12345) -> List[OracleResult]:
    """Run every oracle; tolerances match the acceptance thresholds."""
    cases = random_twisted_cases(n_cases, seed)
    results = []
    prod = [production_FC(c) for c in cases]
    # the scale of C is set by the largest coefficient at that geometry
    results.append(OracleResult(
        "azimuthal roots vs two-point formula",
        max(abs(root_oracle_FC(c) - p) / _case_scale(c) for c, p in zip(cases, prod)), 1e-8))
    results.append(OracleResult(
        "regularized delta vs two-point formula",
        max(abs(regularized_oracle_FC(c) - p) / _case_scale(c) for c, p in zip(cases, prod)), 1e-4))
    results.append(OracleResult(
        "40-digit two-point formula vs production",
        max(abs(mp_two_point_FC(c) - p) / _case_scale(c) for c, p in zip(cases, prod)), 1e-10))

    cfg = ScalarDecayConfig(M=3.0, mu1=1.0, mu2=1.0, E=5.0, E1=2.5)
    results.append(OracleResult("scalar energy closure", abs(scalar_closure(cfg) - 2.5) / 2.5, 1e-12))
    x1 = SpaceTimePoint(0.3, 1.2, 0.4, 0.5)
    x2 = SpaceTimePoint(0.1, 0.8, 2.0, -0.3)
    results.append(OracleResult(
        "scalar mode sum vs direct quadrature",
        relative_error(scalar_state_modesum(cfg, x1, x2), scalar_state_direct(cfg, x1, x2)), 1e-4))
    ja = 0.0
    rng = np.random.default_rng(seed)
    for _ in range(20):
        p_perp = rng.uniform(0.1, 2.0)
        x = SpaceTimePoint(rng.uniform(-1, 1), rng.uniform(0, 10 / p_perp), rng.uniform(0, 2 * math.pi),
                           rng.uniform(-1, 1))
        phi_p, p_z = rng.uniform(0, 2 * math.pi), rng.uniform(-1, 1)
        energy = math.sqrt(p_perp ** 2 + p_z ** 2 + 1)
        exact = plane_wave([p_perp * math.cos(phi_p), p_perp * math.sin(phi_p), p_z], energy, x)
        ja = max(ja, abs(jacobi_anger(p_perp, p_z, phi_p, x, 40, energy) - exact))
    results.append(OracleResult("Jacobi-Anger reconstruction |m| <= 40", ja, 1e-10))
    return results


def _case_scale(case: TwistedCase) -> float:
    """F times the largest |M| at the geometry; a natural scale for errors in F * C."""
    geo = cone_geometry(case.E, case.omega, case.theta, case.theta_g, case.medium)
    E_p = case.E - case.omega
    mmax = max(abs(_m_coeff(case.lam2, case.lam_p2, case.lam_g, s2, sg, case.E, E_p, case.theta,
                            geo.theta_p, case.theta_g, M_E))
               for s2 in (1, -1) for sg in (0, s2))
    return geo.F * max(mmax, 1e-300)
