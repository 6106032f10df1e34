"""
Medium model, electron and photon kinematics, and the Cherenkov cone.

All energies and momenta are in eV (hbar = c = 1); angles are in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError, NoCherenkovEmission
from .numerics import HalfInt, SingularInterval, doubled

M_E = 510998.95
ALPHA = 1 / 137.035999

COS_CLAMP = 1e-12


def clamp_cos(c: float, what: str = "cosine") -> float:
    """Clamp a cosine within 1e-12 of [-1, 1]; raise beyond that."""
    if not math.isfinite(c) or abs(c) > 1 + COS_CLAMP:
        raise DomainError(f"{what} = {c!r} lies outside [-1, 1]")
    return min(1.0, max(-1.0, c))


def speed(E: float, m_e: float = M_E) -> float:
    """Electron speed v = |p|/E."""
    if E < m_e:
        raise DomainError(f"energy {E} eV is below the rest mass {m_e} eV")
    return math.sqrt((E - m_e) * (E + m_e)) / E


def momentum(E: float, m_e: float = M_E) -> float:
    if E < m_e:
        raise DomainError(f"energy {E} eV is below the rest mass {m_e} eV")
    return math.sqrt((E - m_e) * (E + m_e))


def total_energy(kinetic: float, m_e: float = M_E) -> float:
    if kinetic < 0:
        raise DomainError("kinetic energy must be non-negative")
    return kinetic + m_e


# -----------------------------------------------------------------------------
# Medium
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class MediumModel:
    """Refractive index n(omega), constant or tabulated.

    Tabulated values are linearly interpolated; requests outside the table
    range raise :class:`DomainError` rather than extrapolate.
    """

    kind: str = "constant"
    n_const: float = 1.0
    omega_table: Optional[tuple] = None
    n_table: Optional[tuple] = None
    weak_dispersion: bool = True

    def __post_init__(self):
        if self.kind == "constant":
            if not (self.n_const > 0 and math.isfinite(self.n_const)):
                raise DomainError(f"refractive index must be positive, got {self.n_const}")
        elif self.kind == "tabulated":
            w = np.asarray(self.omega_table, dtype=float)
            n = np.asarray(self.n_table, dtype=float)
            if w.ndim != 1 or w.shape != n.shape or w.size < 2:
                raise DomainError("table needs at least two (omega, n) rows")
            if np.any(np.diff(w) <= 0):
                raise DomainError("table omega values must be strictly increasing")
            if np.any(n <= 0) or not np.all(np.isfinite(n)):
                raise DomainError("tabulated refractive index must be positive")
        else:
            raise DomainError(f"unknown medium kind {self.kind!r}")

    @classmethod
    def constant(cls, n: float, weak_dispersion: bool = True) -> "MediumModel":
        return cls(kind="constant", n_const=float(n), weak_dispersion=weak_dispersion)

    @classmethod
    def tabulated(cls, omega: Sequence[float], n: Sequence[float],
                  weak_dispersion: bool = False) -> "MediumModel":
        return cls(kind="tabulated", omega_table=tuple(float(x) for x in omega),
                   n_table=tuple(float(x) for x in n), weak_dispersion=weak_dispersion)

    @classmethod
    def from_table_file(cls, path: Union[str, Path], weak_dispersion: bool = False) -> "MediumModel":
        """Load a two-column (omega_eV, n) text table; '#' starts a comment."""
        omega, n = [], []
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise DomainError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
            omega.append(float(parts[0]))
            n.append(float(parts[1]))
        return cls.tabulated(omega, n, weak_dispersion=weak_dispersion)

    @property
    def omega_range(self) -> tuple:
        if self.kind == "constant":
            return (0.0, math.inf)
        return (self.omega_table[0], self.omega_table[-1])

    def n(self, omega: float) -> float:
        if self.kind == "constant":
            return self.n_const
        lo, hi = self.omega_range
        if not (lo <= omega <= hi):
            raise DomainError(f"omega = {omega} eV outside the refractive-index table [{lo}, {hi}]")
        return float(np.interp(omega, self.omega_table, self.n_table))

    def d_omega_n(self, omega: float) -> float:
        """d(omega n)/d omega; equals n under the weak-dispersion flag."""
        n = self.n(omega)
        if self.weak_dispersion or self.kind == "constant":
            return n
        lo, hi = self.omega_range
        h = 1e-6 * max(omega, hi - lo)
        a, b = max(lo, omega - h), min(hi, omega + h)
        return (b * self.n(b) - a * self.n(a)) / (b - a)

    def describe(self) -> str:
        if self.kind == "constant":
            return f"constant n={self.n_const:.9g}"
        return f"tabulated {len(self.omega_table)} rows in [{self.omega_table[0]:.9g}, {self.omega_table[-1]:.9g}] eV"


# -----------------------------------------------------------------------------
# Particle states
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class ElectronState:
    """Initial electron: plane wave along z or a Bessel (twisted) state."""

    energy: float
    helicity: HalfInt
    mass: float = M_E
    shape: str = "plane_wave"
    p_perp: float = 0.0
    p_z: float = 0.0
    tam_m: Optional[HalfInt] = None

    def __post_init__(self):
        object.__setattr__(self, "helicity", HalfInt.of(self.helicity))
        if abs(self.helicity.twice_value) != 1:
            raise DomainError("electron helicity must be +-1/2")
        if not (self.mass > 0 and self.energy >= self.mass):
            raise DomainError(f"need E >= m_e > 0, got E={self.energy}, m_e={self.mass}")
        p = momentum(self.energy, self.mass)
        if self.shape == "plane_wave":
            object.__setattr__(self, "p_perp", 0.0)
            object.__setattr__(self, "p_z", p)
            object.__setattr__(self, "tam_m", self.helicity)
        elif self.shape == "bessel":
            if self.tam_m is None:
                raise DomainError("a Bessel electron needs a TAM projection m")
            object.__setattr__(self, "tam_m", HalfInt.of(self.tam_m))
            if self.tam_m.is_integer:
                raise DomainError("electron TAM projection must be half-integer")
            if self.p_perp < 0:
                raise DomainError("p_perp must be non-negative")
            if abs(math.hypot(self.p_perp, self.p_z) - p) > 1e-9 * max(p, 1.0):
                raise DomainError("Bessel electron is off shell: p_perp^2 + p_z^2 != E^2 - m_e^2")
        else:
            raise DomainError(f"unknown electron shape {self.shape!r}")

    @classmethod
    def plane_wave(cls, energy: float, helicity, mass: float = M_E) -> "ElectronState":
        return cls(energy=energy, helicity=helicity, mass=mass)

    @classmethod
    def bessel(cls, energy: float, helicity, theta: float, m, mass: float = M_E) -> "ElectronState":
        """Bessel electron with opening angle ``theta`` and TAM projection ``m``."""
        p = momentum(energy, mass)
        return cls(energy=energy, helicity=helicity, mass=mass, shape="bessel",
                   p_perp=p * math.sin(theta), p_z=p * math.cos(theta), tam_m=m)

    @property
    def v(self) -> float:
        return speed(self.energy, self.mass)

    @property
    def p(self) -> float:
        return momentum(self.energy, self.mass)

    @property
    def theta(self) -> float:
        return math.atan2(self.p_perp, self.p_z)


POLARIZATIONS = (1, -1, "parallel", "perp")


@dataclass(frozen=True)
class PhotonMode:
    """Photon Bessel mode; ``n`` is the refractive index at ``omega``."""

    omega: float
    k_perp: float
    k_z: float
    tam_mgamma: int = 0
    pol: Union[int, str] = 1
    n: float = 1.0

    def __post_init__(self):
        if self.pol not in POLARIZATIONS:
            raise DomainError(f"photon polarization must be one of {POLARIZATIONS}, got {self.pol!r}")
        if doubled(self.tam_mgamma) % 2:
            raise DomainError("photon TAM projection must be an integer")
        k = self.omega * self.n
        if not (self.omega > 0 and self.k_perp > 0):
            raise DomainError("photon needs omega > 0 and k_perp > 0")
        if abs(math.hypot(self.k_perp, self.k_z) - k) > 1e-12 * k:
            raise DomainError("photon mode violates k_perp^2 + k_z^2 = (omega n)^2")

    @classmethod
    def from_angle(cls, omega: float, theta_g: float, medium: MediumModel, m_gamma: int = 0,
                   pol: Union[int, str] = 1) -> "PhotonMode":
        if not (0 < theta_g < math.pi):
            raise DomainError("photon polar angle must lie in (0, pi)")
        n = medium.n(omega)
        k = omega * n
        return cls(omega=omega, k_perp=k * math.sin(theta_g), k_z=k * math.cos(theta_g),
                   tam_mgamma=int(m_gamma), pol=pol, n=n)

    @property
    def theta_g(self) -> float:
        return math.atan2(self.k_perp, self.k_z)


# -----------------------------------------------------------------------------
# Cherenkov cone
# -----------------------------------------------------------------------------


def cherenkov_cos_angle(E: float, omega: float, medium: MediumModel, m_e: float = M_E) -> float:
    """Cosine of the angle between photon and initial electron momenta.

    cos theta_kp = 1/(v n) + (omega / 2E) (n^2 - 1)/(v n), including the recoil term.
    Raises :class:`NoCherenkovEmission` when the result is not in (0, 1).
    """
    if not (0 < omega < E - m_e):
        raise DomainError(f"need 0 < omega < E - m_e, got omega={omega}, E - m_e={E - m_e}")
    v = speed(E, m_e)
    n = medium.n(omega)
    c = 1 / (v * n) + (omega / (2 * E)) * (n * n - 1) / (v * n)
    if not (0 < c < 1):
        raise NoCherenkovEmission(f"no Cherenkov emission: cos(theta_kp) = {c:.12g}", value=c)
    return c


def cherenkov_angle(E: float, omega: float, medium: MediumModel, m_e: float = M_E) -> float:
    return math.acos(cherenkov_cos_angle(E, omega, medium, m_e))


def sin_theta0_soft(v: float, n: float) -> float:
    """Soft-photon cone angle: sqrt(1 - 1/(v n)^2)."""
    vn = v * n
    if vn <= 1:
        raise NoCherenkovEmission(f"v n = {vn} <= 1, below threshold", value=vn)
    return math.sqrt(1 - 1 / (vn * vn))


def emission_omega_range(E: float, medium: MediumModel, lo: float, hi: float,
                         m_e: float = M_E) -> tuple:
    """Intersect [lo, hi] with the region where Cherenkov emission is allowed.

    For a constant index the allowed set is an interval (0, omega_max); for a
    tabulated index the endpoints are found on a fine scan, so the returned
    interval is the one containing the most allowed scan points.
    """
    w_lo, w_hi = medium.omega_range
    lo, hi = max(lo, w_lo), min(hi, w_hi, E - m_e)
    if not hi > lo:
        raise DomainError("empty omega range after intersecting with the medium table and E - m_e")
    grid = np.linspace(lo, hi, 2001)[1:-1] if lo == 0 else np.linspace(lo, hi, 2001)

    def ok(w):
        try:
            cherenkov_cos_angle(E, w, medium, m_e)
            return True
        except DomainError:
            return False

    mask = np.array([ok(w) for w in grid])
    if not mask.any():
        raise NoCherenkovEmission("no Cherenkov emission anywhere in the requested omega range")
    # longest run of allowed points
    best, start = (0, 0), None
    for i, good in enumerate(np.append(mask, False)):
        if good and start is None:
            start = i
        elif not good and start is not None:
            if i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    a, b = grid[best[0]], grid[best[1] - 1]
    if a == b:
        raise NoCherenkovEmission("allowed omega range is too narrow to integrate")
    return float(a), float(b)


# -----------------------------------------------------------------------------
# Cone overlap and phase space
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class ConeGeometry:
    theta0: float
    theta: float
    interval: SingularInterval = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "interval", overlap_interval(self.theta, self.theta0))


def overlap_interval(theta: float, theta0: float) -> SingularInterval:
    """Photon polar angles reachable from a cone of half-angle ``theta``.

    The lower edge is |theta - theta0|.  The upper edge is theta + theta0 while
    that stays below pi; beyond, the cone wraps around the -z axis and the edge
    becomes 2 pi - theta - theta0.
    """
    for name, x in (("theta", theta), ("theta0", theta0)):
        if not (0 <= x < math.pi):
            raise DomainError(f"{name} = {x} must lie in [0, pi)")
    if theta == 0 or theta0 == 0:
        raise DomainError("degenerate cone: theta and theta0 must both be positive")
    lower = abs(theta - theta0)
    upper = min(theta + theta0, 2 * math.pi - theta - theta0)
    return SingularInterval(lower, upper)


def phase_space_weight(E: float, omega: float, medium: MediumModel, m_e: float = M_E,
                       per_omega: bool = False) -> float:
    """Phase-space reduction factor (E - omega) omega n / (v E).

    This multiplies d(omega n)/(2 pi) dphi_g/(2 pi).  With ``per_omega`` the
    Jacobian d(omega n)/d omega is folded in, so the factor multiplies d omega
    instead (n under weak dispersion, a finite difference otherwise).
    """
    if not (0 < omega < E - m_e):
        raise DomainError(f"need 0 < omega < E - m_e, got omega={omega}")
    v = speed(E, m_e)
    n = medium.n(omega)
    w = (E - omega) * omega * n / (v * E)
    if per_omega:
        w *= medium.d_omega_n(omega)
    return w
