"""
Photon polarization observables.

P_l is the degree of linear polarization between the in-plane (parallel) and
out-of-plane (perp) components.  For a plane-wave electron it comes from the
ultra-relativistic factors (g1, g2), for a twisted electron in the soft
limit from (G1, G2).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, TypeVar

import numpy as np

from .amplitudes import soft_G1_G2
from .angular import delta_angle
from .errors import DomainError, OutsideOverlap
from .kinematics import overlap_interval

BORDER_MARGIN = 1e-9
T = TypeVar("T")


def thread_count() -> int:
    """Worker count from VC_TWIST_THREADS (default: CPU count, at least 1)."""
    raw = os.environ.get("VC_TWIST_THREADS")
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise DomainError(f"VC_TWIST_THREADS must be an integer, got {raw!r}")
        return max(1, n)
    return max(1, os.cpu_count() or 1)


def parallel_map(f: Callable[..., T], items: Iterable, threads: Optional[int] = None) -> List[T]:
    """Ordered map over ``items``; serial when one worker is allowed."""
    items = list(items)
    threads = thread_count() if threads is None else max(1, threads)
    if threads == 1 or len(items) < 2:
        return [f(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(f, items))


def _ratio(a: float, b: float, what: str) -> float:
    den = a * a + b * b
    if den == 0:
        raise DomainError(f"{what}: both factors vanish")
    return (a * a - b * b) / den


def pl_planewave(g1: float, g2: float) -> float:
    """(g1^2 - g2^2)/(g1^2 + g2^2)."""
    return _ratio(g1, g2, "pl_planewave")


def pl_planewave_reference(E: float, omega: float, n: float, theta0: float) -> float:
    """Small-recoil form 1 - omega^2 (n^2 - 1)/(2 (E sin theta0)^2)."""
    return 1 - omega ** 2 * (n * n - 1) / (2 * (E * math.sin(theta0)) ** 2)


def pl_twisted(theta: float, theta_g: float, theta0: float, m_g: int) -> float:
    """Soft-photon P_l for a twisted electron: (G1^2 - G2^2)/(G1^2 + G2^2)."""
    d = delta_angle(theta, theta_g, theta0)
    g1, g2 = soft_G1_G2(0.5, m_g, theta, theta_g, d)
    return _ratio(g1, g2, "pl_twisted")


def epa_mean_helicity(g1: float, g2: float) -> float:
    """(|g1+g2|^2 - |g1-g2|^2)/(|g1+g2|^2 + |g1-g2|^2) = 2 g1 g2/(g1^2 + g2^2)."""
    a, b = abs(g1 + g2) ** 2, abs(g1 - g2) ** 2
    if a + b == 0:
        raise DomainError("epa_mean_helicity: both factors vanish")
    return (a - b) / (a + b)


@dataclass(frozen=True)
class PolarizationPoint:
    theta: float
    theta_g: float
    theta0: float
    m_gamma: int
    P_l: float

    def __post_init__(self):
        if not -1 - 1e-12 <= self.P_l <= 1 + 1e-12:
            raise DomainError(f"P_l = {self.P_l} outside [-1, 1]")


def pl_curve(theta: float, theta0: float, m_g: int, n_points: int = 201,
             margin: float = BORDER_MARGIN) -> List[PolarizationPoint]:
    """P_l on ``n_points`` uniformly spaced theta_g inside the overlap interval.

    The two end points sit ``margin`` rad inside the borders.
    """
    if n_points < 2:
        raise DomainError("n_points must be >= 2")
    iv = overlap_interval(theta, theta0)
    grid = np.linspace(iv.lower + margin, iv.upper - margin, n_points)
    return [PolarizationPoint(theta, float(tg), theta0, m_g, pl_twisted(theta, float(tg), theta0, m_g))
            for tg in grid]


@dataclass
class MapGrid:
    """P_l on a (theta, theta_g) grid; ``values[i, j]`` belongs to (theta[i], theta_g[j]).

    Cells outside the overlap region are NaN.
    """

    theta: np.ndarray
    theta_g: np.ndarray
    values: Optional[np.ndarray] = None
    theta0: float = float("nan")
    m_gamma: int = 0

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.theta_g = np.asarray(self.theta_g, dtype=float)
        for name, ax in (("theta", self.theta), ("theta_g", self.theta_g)):
            if ax.ndim != 1 or ax.size < 1:
                raise DomainError(f"{name} axis must be a nonempty 1-D list")
            if ax.size > 1 and not (np.all(np.diff(ax) > 0) or np.all(np.diff(ax) < 0)):
                raise DomainError(f"{name} axis must be strictly monotone")
        if self.values is not None:
            self.values = np.asarray(self.values, dtype=float)
            if self.values.shape != (self.theta.size, self.theta_g.size):
                raise DomainError("values shape does not match the axes")

    @property
    def inside_mask(self) -> np.ndarray:
        return np.isfinite(self.values)


def _cell(theta: float, theta_g: float, theta0: float, m_g: int) -> float:
    if theta <= 0 or theta_g <= 0:
        return math.nan
    iv_lo = abs(theta - theta0)
    iv_hi = min(theta + theta0, 2 * math.pi - theta - theta0)
    if not iv_lo < theta_g < iv_hi:
        return math.nan
    try:
        return pl_twisted(theta, theta_g, theta0, m_g)
    except (OutsideOverlap, DomainError):
        return math.nan


def pl_map(theta0: float, m_g: int, grid: MapGrid, threads: Optional[int] = None) -> MapGrid:
    """Evaluate P_l over the axes of ``grid``; rows are computed in parallel."""
    def row(th: float) -> List[float]:
        return [_cell(float(th), float(tg), theta0, m_g) for tg in grid.theta_g]

    values = np.array(parallel_map(row, grid.theta, threads), dtype=float)
    return MapGrid(theta=grid.theta.copy(), theta_g=grid.theta_g.copy(), values=values,
                   theta0=theta0, m_gamma=m_g)
