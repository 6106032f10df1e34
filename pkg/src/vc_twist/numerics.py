"""
Special functions and quadrature.

Small Wigner matrices for J = 1/2 and J = 1, integer-order Bessel functions of
the first kind, and a Gauss-Legendre rule for integrands with inverse
square-root behaviour at both ends of an interval.

Half-integer quantum numbers are handled through their doubled integer value
(``2*m``) so that parity and equality checks are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError

# -----------------------------------------------------------------------------
# Half-integers
# -----------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class HalfInt:
    """A number from Z/2 stored as twice its value."""

    twice_value: int

    @classmethod
    def of(cls, x) -> "HalfInt":
        if isinstance(x, HalfInt):
            return x
        return cls(doubled(x))

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __float__(self) -> float:
        return self.twice_value / 2

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice_value)

    def __add__(self, other) -> "HalfInt":
        return HalfInt(self.twice_value + HalfInt.of(other).twice_value)

    def __sub__(self, other) -> "HalfInt":
        return HalfInt(self.twice_value - HalfInt.of(other).twice_value)

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"


def doubled(x) -> int:
    """Return ``2*x`` as an exact int; raise if ``x`` is not in Z/2."""
    if isinstance(x, HalfInt):
        return x.twice_value
    if isinstance(x, (int, np.integer)):
        return 2 * int(x)
    if isinstance(x, (float, np.floating)):
        t2 = 2.0 * float(x)
        r = round(t2)
        if abs(t2 - r) > 1e-12:
            raise DomainError(f"{x!r} is not an integer or half-integer")
        return int(r)
    if isinstance(x, str):
        x = Fraction(x)
    t = 2 * Fraction(x).limit_denominator(4) if not isinstance(x, Fraction) else 2 * x
    if t.denominator != 1 or abs(float(t) - 2 * float(x)) > 1e-12:
        raise DomainError(f"{x!r} is not an integer or half-integer")
    return int(t)


def i_power(twice_exponent: int) -> complex:
    """``i**(k/2)`` on the principal branch, for the doubled exponent ``k``."""
    k = twice_exponent % 8
    return complex(math.cos(math.pi * k / 4), math.sin(math.pi * k / 4))


# -----------------------------------------------------------------------------
# Wigner small-d matrices
# -----------------------------------------------------------------------------


def _spin_half_label(x) -> int:
    t = doubled(x)
    if t not in (-1, 1):
        raise DomainError(f"spin-1/2 label must be +-1/2, got {x!r}")
    return t


def _spin_one_label(x) -> int:
    t = doubled(x)
    if t not in (-2, 0, 2):
        raise DomainError(f"spin-1 label must be -1, 0 or 1, got {x!r}")
    return t // 2


def wigner_d_half(sigma, lam, theta):
    """d^{1/2}_{sigma, lam}(theta); ``theta`` may be an array."""
    s = _spin_half_label(sigma)
    l = _spin_half_label(lam)
    theta = np.asarray(theta, dtype=float)
    if s == l:
        out = np.cos(theta / 2)
    else:
        out = -s * np.sin(theta / 2)
    return float(out) if out.ndim == 0 else out


def wigner_d_one(sigma_g, lambda_g, theta):
    """d^1_{sigma_g, lambda_g}(theta), full 3x3 matrix in the standard convention."""
    a = _spin_one_label(sigma_g)
    b = _spin_one_label(lambda_g)
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    if a == 0 and b == 0:
        out = c
    elif a == 0:
        out = b * s / math.sqrt(2)
    elif b == 0:
        out = -a * s / math.sqrt(2)
    else:
        out = (1 + a * b * c) / 2
    return float(out) if out.ndim == 0 else out


# -----------------------------------------------------------------------------
# Bessel functions of the first kind
# -----------------------------------------------------------------------------

SERIES_LIMIT = 12.0
_BIG = 1e250


def _series_j(n: int, x: float) -> float:
    half = x / 2
    term = half**n / math.factorial(n)
    total = term
    k = 0
    while True:
        k += 1
        term *= -half * half / (k * (k + n))
        total += term
        if abs(term) <= 1e-17 * abs(total) and k > half:
            return total
        if term == 0.0:
            return total


def _miller_table(nmax: int, x: float) -> np.ndarray:
    """J_0..J_nmax at x > 0 by backward recurrence, normalised by J0 + 2 sum J_2k = 1."""
    start = max(nmax, int(x)) + 30 + int(8 * x ** (1 / 3))
    start += start % 2
    out = np.zeros(nmax + 1)
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    for k in range(start, 0, -1):
        j_prev = 2 * k / x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if abs(j_cur) > _BIG:
            j_cur /= _BIG
            j_next /= _BIG
            out /= _BIG
            norm /= _BIG
        if k - 1 <= nmax:
            out[k - 1] = j_cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2 * j_cur
    norm += j_cur  # k - 1 == 0 term, J_0
    return out / norm


@lru_cache(maxsize=8192)
def _table(nmax: int, x: float) -> np.ndarray:
    if x < SERIES_LIMIT:
        return np.array([_series_j(n, x) for n in range(nmax + 1)])
    return _miller_table(nmax, x)


def bessel_j_orders(nmax: int, x: float) -> np.ndarray:
    """Return J_0(x), ..., J_nmax(x) as an array (read-only, cached)."""
    if nmax < 0:
        raise DomainError("nmax must be non-negative")
    x = float(x)
    if x == 0.0:
        out = np.zeros(nmax + 1)
        out[0] = 1.0
        return out
    sign = 1.0
    if x < 0:
        x, sign = -x, -1.0
    tab = _table(int(nmax), x)
    if sign < 0:
        tab = tab * np.where(np.arange(nmax + 1) % 2 == 0, 1.0, -1.0)
    return tab


def bessel_j(n: int, x: float) -> float:
    """J_n(x) for integer n and real x.

    Ascending series for |x| < 12, Miller's backward recurrence above.
    Negative orders use J_{-n} = (-1)^n J_n.
    """
    n = int(n)
    m = abs(n)
    val = float(bessel_j_orders(m, x)[m])
    if n < 0 and m % 2:
        val = -val
    return val


# -----------------------------------------------------------------------------
# Quadrature
# -----------------------------------------------------------------------------

_GL_ORDER = 16
MAX_NODES = 2**20


@dataclass(frozen=True)
class SingularInterval:
    lower: float
    upper: float

    def __post_init__(self):
        if not (0.0 <= self.lower < self.upper <= math.pi + 1e-15):
            raise DomainError(
                f"invalid interval ({self.lower}, {self.upper}); need 0 <= lower < upper <= pi"
            )

    @property
    def center(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.upper - self.lower)

    def contains(self, x, strict: bool = True):
        x = np.asarray(x)
        if strict:
            return (x > self.lower) & (x < self.upper)
        return (x >= self.lower) & (x <= self.upper)


@lru_cache(maxsize=None)
def _gl_reference(order: int):
    return np.polynomial.legendre.leggauss(order)


def gauss_legendre(a: float, b: float, n_panels: int = 1, order: int = _GL_ORDER):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x_ref, w_ref = _gl_reference(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x_ref[None, :]).ravel()
    weights = (half[:, None] * w_ref[None, :]).ravel()
    return nodes, weights


def sqrt_singular_nodes(interval: SingularInterval, n_panels: int = 1, order: int = _GL_ORDER):
    """Nodes and weights for int f(x) dx over ``interval`` after x = c + h sin t.

    The Jacobian h cos t cancels an inverse square-root at either end, so the
    rule is exponentially convergent for f ~ 1/sqrt((x - a)(b - x)) g(x), g smooth.
    """
    t, wt = gauss_legendre(-math.pi / 2, math.pi / 2, n_panels, order)
    c, h = interval.center, interval.half_width
    return c + h * np.sin(t), wt * h * np.cos(t)


def _evaluate(f: Callable, nodes: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(f(nodes), dtype=float)
    except (TypeError, ValueError):
        vals = None
    if vals is None or vals.shape != nodes.shape:
        vals = np.array([float(f(x)) for x in nodes])
    return vals


def _doubling(estimate: Callable[[int], float], rtol: float, atol: float) -> float:
    panels = 1
    prev = estimate(panels)
    while True:
        panels *= 2
        if panels * _GL_ORDER > MAX_NODES:
            raise ConvergenceError(
                f"quadrature did not converge within {MAX_NODES} nodes (last estimate {prev!r})"
            )
        cur = estimate(panels)
        if abs(cur - prev) <= max(rtol * abs(cur), atol):
            return cur
        prev = cur


def integrate_sqrt_singular(f: Callable, interval: SingularInterval, rtol: float = 1e-11,
                            atol: float = 0.0) -> float:
    """Integrate ``f`` over ``interval`` allowing 1/sqrt endpoint singularities.

    The node count doubles until two successive estimates agree to ``rtol``;
    :class:`ConvergenceError` is raised past 2**20 nodes.
    """
    if not isinstance(interval, SingularInterval):
        interval = SingularInterval(*interval)

    def estimate(panels):
        x, w = sqrt_singular_nodes(interval, panels)
        return float(np.dot(w, _evaluate(f, x)))

    return _doubling(estimate, rtol, atol)


def integrate_smooth(f: Callable, a: float, b: float, rtol: float = 1e-11, atol: float = 0.0) -> float:
    """Composite Gauss-Legendre integral of a smooth ``f`` over [a, b]."""
    if not b > a:
        raise DomainError(f"empty integration range ({a}, {b})")

    def estimate(panels):
        x, w = gauss_legendre(a, b, panels)
        return float(np.dot(w, _evaluate(f, x)))

    return _doubling(estimate, rtol, atol)
