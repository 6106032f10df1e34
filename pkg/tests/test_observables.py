import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vc_twist.errors import DomainError
from vc_twist.observables import (
    MapGrid,
    PolarizationPoint,
    epa_mean_helicity,
    parallel_map,
    pl_curve,
    pl_map,
    pl_planewave,
    pl_twisted,
    thread_count,
)

D = math.radians
T0 = D(14.5)


def test_pl_planewave_limits():
    assert pl_planewave(1.0, 0.0) == 1.0
    assert pl_planewave(0.0, 1.0) == -1.0
    with pytest.raises(DomainError):
        pl_planewave(0.0, 0.0)


def test_mean_helicity_form():
    assert epa_mean_helicity(0.3, 0.1) == pytest.approx(2 * 0.3 * 0.1 / (0.09 + 0.01))


def test_curve_endpoints_and_mgamma_zero():
    pts = pl_curve(D(12), T0, 0, n_points=21)
    assert all(p.P_l == pytest.approx(1.0) for p in pts)
    for mg in range(6):
        pts = pl_curve(D(12), T0, mg, n_points=11)
        assert pts[0].P_l == pytest.approx(1.0, abs=1e-6)
        assert pts[-1].P_l == pytest.approx(1.0, abs=1e-6)


def test_point_validation():
    with pytest.raises(DomainError):
        PolarizationPoint(0.1, 0.1, 0.1, 1, 1.5)


def test_map_nan_outside_and_thread_independent():
    grid = MapGrid(theta=np.linspace(D(1), D(30), 12), theta_g=np.linspace(D(1), D(45), 17))
    a = pl_map(T0, 2, grid, threads=1)
    b = pl_map(T0, 2, grid, threads=4)
    assert np.array_equal(np.isnan(a.values), np.isnan(b.values))
    assert np.array_equal(a.values[a.inside_mask], b.values[b.inside_mask])
    th, tg = np.meshgrid(grid.theta, grid.theta_g, indexing="ij")
    outside = (tg <= np.abs(th - T0)) | (tg >= th + T0)
    assert np.all(np.isnan(a.values[outside]))
    assert np.all(np.abs(a.values[a.inside_mask]) <= 1 + 1e-12)


def test_map_grid_validation():
    with pytest.raises(DomainError):
        MapGrid(theta=[0.1, 0.3, 0.2], theta_g=[0.1])
    with pytest.raises(DomainError):
        MapGrid(theta=[0.1], theta_g=[0.1], values=np.zeros((2, 2)))


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("VC_TWIST_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("VC_TWIST_THREADS", "x")
    with pytest.raises(DomainError):
        thread_count()
    assert parallel_map(lambda v: v * v, range(5), threads=3) == [0, 1, 4, 9, 16]


def _inside(theta, frac):
    lo, hi = abs(theta - T0), theta + T0
    return lo + frac * (hi - lo)


angles = st.floats(min_value=D(1), max_value=D(40))
fracs = st.floats(min_value=0.01, max_value=0.99)


@settings(max_examples=60, deadline=None)
@given(theta=angles, frac=fracs, m_g=st.integers(0, 8))
def test_pl_bounded_and_even_in_mgamma(theta, frac, m_g):
    tg = _inside(theta, frac)
    a = pl_twisted(theta, tg, T0, m_g)
    assert -1 - 1e-12 <= a <= 1 + 1e-12
    assert pl_twisted(theta, tg, T0, -m_g) == pytest.approx(a, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(g1=st.floats(-10, 10), g2=st.floats(-10, 10), s=st.floats(1e-3, 1e3))
def test_pl_planewave_scale_invariant(g1, g2, s):
    if g1 * g1 + g2 * g2 < 1e-12:
        return
    assert pl_planewave(s * g1, s * g2) == pytest.approx(pl_planewave(g1, g2), abs=1e-12)
