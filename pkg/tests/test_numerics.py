import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import jv

from vc_twist.errors import ConvergenceError, DomainError
from vc_twist.numerics import (
    HalfInt,
    SingularInterval,
    bessel_j,
    bessel_j_orders,
    doubled,
    gauss_legendre,
    i_power,
    integrate_smooth,
    integrate_sqrt_singular,
    wigner_d_half,
    wigner_d_one,
)


class TestHalfInt:
    def test_doubled_inputs(self):
        assert doubled(0.5) == 1
        assert doubled("-3/2") == -3
        assert doubled(Fraction(5, 2)) == 5
        assert doubled(HalfInt(7)) == 7
        assert doubled(2) == 4

    def test_rejects_thirds(self):
        with pytest.raises(DomainError):
            doubled(1 / 3)
        with pytest.raises(DomainError):
            doubled("1/3")

    def test_arithmetic(self):
        a = HalfInt.of("1/2")
        assert (a - 1).twice_value == -1
        assert (a + HalfInt.of(0.5)).is_integer
        assert str(HalfInt(-3)) == "-3/2"
        assert float(-a) == -0.5

    def test_i_power(self):
        assert i_power(2) == pytest.approx(1j)
        assert i_power(-1) == pytest.approx(np.exp(-1j * math.pi / 4))
        assert i_power(8) == pytest.approx(1)


class TestWigner:
    thetas = np.linspace(0.0, math.pi, 13)

    def test_half_known_values(self):
        t = 0.7
        assert wigner_d_half(0.5, 0.5, t) == pytest.approx(math.cos(t / 2))
        assert wigner_d_half(0.5, -0.5, t) == pytest.approx(-math.sin(t / 2))
        assert wigner_d_half(-0.5, 0.5, t) == pytest.approx(math.sin(t / 2))

    def test_half_unitarity(self):
        for t in self.thetas:
            d = np.array([[wigner_d_half(s, l, t) for l in (0.5, -0.5)] for s in (0.5, -0.5)])
            assert np.allclose(d @ d.T, np.eye(2), atol=1e-14)

    def test_one_unitarity_and_symmetry(self):
        labels = (1, 0, -1)
        for t in self.thetas:
            d = np.array([[wigner_d_one(a, b, t) for b in labels] for a in labels])
            assert np.allclose(d @ d.T, np.eye(3), atol=1e-14)
            for i, a in enumerate(labels):
                for j, b in enumerate(labels):
                    # d_ab = (-1)^(a-b) d_ba
                    assert d[i, j] == pytest.approx((-1) ** (a - b) * d[j, i], abs=1e-15)

    def test_one_composition(self):
        # d(a) d(b) = d(a + b) for rotations about the same axis
        labels = (1, 0, -1)
        m = lambda t: np.array([[wigner_d_one(a, b, t) for b in labels] for a in labels])
        assert np.allclose(m(0.3) @ m(0.9), m(1.2), atol=1e-14)

    def test_array_input(self):
        out = wigner_d_one(0, 1, np.array([0.1, 0.2]))
        assert out.shape == (2,)

    def test_bad_labels(self):
        with pytest.raises(DomainError):
            wigner_d_half(1, 0.5, 0.1)
        with pytest.raises(DomainError):
            wigner_d_one(2, 1, 0.1)


class TestBessel:
    def test_against_scipy(self):
        for x in (0.0, 1e-8, 0.3, 5.0, 11.9, 12.1, 30.0, 99.0):
            tab = bessel_j_orders(60, x)
            ref = jv(np.arange(61), x)
            assert np.max(np.abs(tab - ref)) < 1e-12

    def test_negative_orders(self):
        assert bessel_j(-3, 2.5) == pytest.approx(-jv(3, 2.5), abs=1e-15)
        assert bessel_j(-4, 2.5) == pytest.approx(jv(4, 2.5), abs=1e-15)

    def test_recurrence(self):
        x = 7.3
        for n in range(1, 40):
            lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x)
            assert lhs == pytest.approx(2 * n / x * bessel_j(n, x), abs=1e-13)

    def test_known_zeros(self):
        assert abs(bessel_j(0, 2.404825557695773)) < 1e-14
        assert abs(bessel_j(1, 3.831705970207512)) < 1e-14
        assert abs(bessel_j(2, 5.135622301840683)) < 1e-14

    def test_sum_rule(self):
        x = 17.0
        tab = bessel_j_orders(80, x)
        assert tab[0] ** 2 + 2 * np.sum(tab[1:] ** 2) == pytest.approx(1.0, abs=1e-13)


class TestQuadrature:
    def test_gauss_legendre_polynomial(self):
        x, w = gauss_legendre(0.0, 2.0, 3)
        assert np.sum(w * x ** 31) == pytest.approx(2 ** 32 / 32, rel=1e-13)

    def test_sqrt_singular(self):
        iv = SingularInterval(0.0, 1.0)
        val = integrate_sqrt_singular(lambda x: 1 / np.sqrt(x * (1 - x)), iv)
        assert val == pytest.approx(math.pi, rel=1e-12)

    def test_smooth(self):
        assert integrate_smooth(np.exp, 0.0, 1.0) == pytest.approx(math.e - 1, rel=1e-13)

    def test_interval_validation(self):
        with pytest.raises(DomainError):
            SingularInterval(0.5, 0.2)
        with pytest.raises(DomainError):
            SingularInterval(-0.1, 0.2)

    def test_non_convergence_raises(self):
        iv = SingularInterval(0.0, 1.0)
        with pytest.raises(ConvergenceError):
            # 1/x has a non-integrable endpoint singularity
            integrate_sqrt_singular(lambda x: 1 / x, iv)
