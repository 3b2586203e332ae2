"""Tests for rational functions, the ladder system, the ODE and the electrostatic model."""

import math

import numpy as np
import pytest

from freudsobolev.exceptions import DomainError, UnexpectedRegimeError
from freudsobolev.holonomic import (
    biquartic,
    biquartic_hp,
    biquartic_roots_hp,
    closed_form_R,
    electrostatic_residual,
    external_potential,
    imaginary_residual,
    ladder_system,
    lowering_residual,
    ode_coeffs,
    ode_coeffs_at,
    ode_residual,
    pole_avoiding_samples,
    raising_residual,
    u4_asymptotic,
    u_roots,
    z_asymptotics,
)
from freudsobolev.models import SobolevParams
from freudsobolev.rational import RationalFn
from freudsobolev.sobolev import build_sobolev_table

SAMPLES = np.array([0.3, 0.9, 1.7])


class TestRationalFn:
    """Test rational function arithmetic."""

    def test_monic_denominator(self):
        """Test that the denominator is normalized to be monic."""
        f = RationalFn([2.0, 4.0], [0.0, 2.0])
        assert f.den.coef[-1] == 1.0
        assert f(2.0) == pytest.approx(2.5)

    def test_cancels_common_powers(self):
        """Test x^2 / x^3 = 1/x."""
        f = RationalFn([0.0, 0.0, 1.0], [0.0, 0.0, 0.0, 1.0])
        assert f.degrees == (0, 1)

    def test_arithmetic(self):
        """Test sums, products and quotients pointwise."""
        f = RationalFn([1.0, 1.0], [0.0, 1.0])
        g = RationalFn([0.0, 0.0, 3.0])
        x = np.array([0.5, 1.5, -2.0])
        np.testing.assert_allclose((f + g)(x), f(x) + g(x))
        np.testing.assert_allclose((f * g)(x), f(x) * g(x))
        np.testing.assert_allclose((f / g)(x), f(x) / g(x))
        np.testing.assert_allclose((2.0 - f)(x), 2.0 - f(x))

    def test_exact_cancellation(self):
        """Test f - f is identically zero."""
        f = RationalFn([1.0, -3.0, 0.5], [2.0, 0.0, 1.0])
        assert (f - f).is_zero()
        assert (RationalFn([1.0, 0.1 + 0.2]) - RationalFn([1.0, 0.3])).is_zero()

    def test_small_low_order_terms_survive(self):
        """Test that tiny constant terms are neither trimmed nor cancelled as powers of x."""
        f = RationalFn([1e-14, 1.0], [1e-14, 0.0, 1.0])
        assert f.degrees == (1, 2)
        assert f.num.coef[0] == 1e-14
        g = RationalFn([1e-13, 0.0, 1.0]) + RationalFn([0.0, 1e3])
        assert g.num.coef.tolist() == [1e-13, 1e3, 1.0]
        h = RationalFn([1e-13, 0.0, 1.0], [0.0, 1.0]).deriv()
        assert h(1e-3) == pytest.approx(1.0 - 1e-13 / 1e-6)

    def test_derivatives(self):
        """Test the quotient rule and the logarithmic derivative."""
        f = RationalFn([1.0, 0.0, 1.0], [1.0, 1.0])
        x = 0.7
        df = (2 * x * (1 + x) - (1 + x * x)) / (1 + x) ** 2
        assert f.deriv()(x) == pytest.approx(df)
        assert f.log_derivative()(x) == pytest.approx(df / f(x))

    def test_poles_and_equality(self):
        """Test real poles and cross-multiplied comparison."""
        f = RationalFn([1.0], [-1.0, 0.0, 1.0])
        assert np.allclose(f.poles(), [-1.0, 1.0])
        g = RationalFn([3.0, 3.0], [-3.0, 0.0, 3.0]) * RationalFn([1.0], [1.0, 1.0])
        assert f.equals(g)
        assert f.mismatch(RationalFn([1.0], [-1.0, 0.0, 1.01])) > 1e-4

    def test_zero_denominator(self):
        """Test that a zero denominator is refused."""
        with pytest.raises(ZeroDivisionError):
            RationalFn([1.0], [0.0])


class TestLadder:
    """Test the lowering and raising relations."""

    @pytest.mark.parametrize("n", [2, 3, 6, 7, 12])
    def test_lowering_and_raising(self, st, small_ft, n):
        """Test both ladder relations at sample points."""
        ls = ladder_system(st, small_ft, n)
        assert np.max(lowering_residual(ls, st, small_ft, SAMPLES)) <= 1e-8
        assert np.max(raising_residual(ls, st, small_ft, SAMPLES)) <= 1e-8

    def test_domain(self, st, small_ft):
        """Test that n < 2 is rejected."""
        with pytest.raises(DomainError):
            ladder_system(st, small_ft, 1)


class TestODE:
    """Test the holonomic second-order equation."""

    @pytest.mark.parametrize("M", [0.0, 0.1, 1.0, 10.0])
    def test_residual(self, small_ft, M):
        """Test Q_n'' + R Q_n' + S Q_n = 0 at pole-avoiding samples."""
        st = build_sobolev_table(small_ft, SobolevParams(M, M), 16)
        for n in range(2, 16):
            oc = ode_coeffs(ladder_system(st, small_ft, n))
            x = pole_avoiding_samples([oc.R, oc.S], -2.5, 2.5, 20)
            assert len(x) == 20
            assert np.max(ode_residual(oc, st, small_ft, x)) <= 1e-7

    @pytest.mark.parametrize("n", [3, 6, 11])
    def test_S_matches_pointwise_formula(self, small_ft, n):
        """Test the rational R and S against Xi and Theta evaluated pointwise, M0 = M1 = 10."""
        st = build_sobolev_table(small_ft, SobolevParams(10.0, 10.0), 16)
        ls = ladder_system(st, small_ft, n)
        oc = ode_coeffs(ls)
        x = pole_avoiding_samples([oc.R, oc.S], -2.5, 2.5, 40)
        R, S = ode_coeffs_at(ls, x)
        np.testing.assert_allclose(oc.R(x), R, rtol=1e-8)
        np.testing.assert_allclose(oc.S(x), S, rtol=1e-7, atol=1e-7)

    def test_S_near_zeros_of_xi1(self, small_ft):
        """Test S beside the real zeros of Xi1 for n = 6, where S is large."""
        st = build_sobolev_table(small_ft, SobolevParams(10.0, 10.0), 16)
        ls = ladder_system(st, small_ft, 6)
        roots = ls.Xi1.num.roots()
        real = roots[np.abs(roots.imag) <= 1e-9].real
        real = real[np.abs(real) > 1e-3]
        assert len(real) > 0
        x = np.concatenate([real * 1.05, real * 0.95])
        _, S = ode_coeffs_at(ls, x)
        np.testing.assert_allclose(ode_coeffs(ls).S(x), S, rtol=1e-6)

    @pytest.mark.parametrize("M1", [0.1, 1.0, 10.0])
    def test_closed_form_R(self, small_ft, M1):
        """Test R = 2/x - 4x^3 - u'/u for odd degrees."""
        st = build_sobolev_table(small_ft, SobolevParams(0.0, M1), 21)
        for n in range(3, 22, 2):
            oc = ode_coeffs(ladder_system(st, small_ft, n))
            assert oc.R.mismatch(closed_form_R(oc.u4, oc.u2, oc.u0)) <= 1e-8

    def test_even_degree_has_no_biquartic(self, st, small_ft):
        """Test that biquartic data is attached for odd n only."""
        assert ode_coeffs(ladder_system(st, small_ft, 4)).u4 is None
        assert ode_coeffs(ladder_system(st, small_ft, 5)).u4 is not None


class TestBiquartic:
    """Test the biquartic u(x; 2n+1) and its roots."""

    def test_table_cell(self, small_ft):
        """Test degree 9, M1 = 1: +-0.076318 and +-1.349456 i."""
        st = build_sobolev_table(small_ft, SobolevParams(0.0, 1.0), 9)
        roots = u_roots(*biquartic(st, small_ft, 9), n=9)
        assert roots.zeros[-1] == pytest.approx(0.076318, abs=1e-5)
        assert roots.imaginary[-1] == pytest.approx(1.349456, abs=1e-5)
        assert np.max(roots.residuals) <= 1e-10
        assert imaginary_residual(*biquartic(st, small_ft, 9), roots.imaginary[-1]) <= 1e-10

    def test_degree_one(self, small_ft):
        """Test the first row of the table, M1 = 0.1."""
        st = build_sobolev_table(small_ft, SobolevParams(0.0, 0.1), 1)
        roots = u_roots(*biquartic(st, small_ft, 1))
        assert roots.zeros[-1] == pytest.approx(0.369164, abs=1e-5)
        assert roots.imaginary[-1] == pytest.approx(0.878731, abs=1e-5)

    def test_even_degree_rejected(self, st, small_ft):
        """Test that the biquartic belongs to odd degrees."""
        with pytest.raises(DomainError):
            biquartic(st, small_ft, 4)
        with pytest.raises(DomainError):
            biquartic_hp(small_ft, 1.0, 4)

    @pytest.mark.parametrize("M1", [0.1, 1.0, 10.0])
    def test_high_precision_agrees(self, small_ft, M1):
        """Test float coefficients and roots against the mpmath evaluation, degrees 1..19."""
        st = build_sobolev_table(small_ft, SobolevParams(0.0, M1), 19)
        for n in range(1, 20, 2):
            coefficients = biquartic(st, small_ft, n)
            exact = [float(c) for c in biquartic_hp(small_ft, M1, n, 50)]
            np.testing.assert_allclose(coefficients, exact, rtol=1e-10, atol=1e-12 * max(map(abs, exact)))
            roots = u_roots(*coefficients, n=n)
            re_root, im_root = biquartic_roots_hp(small_ft, M1, n, 50)
            assert roots.zeros[-1] == pytest.approx(re_root, abs=1e-9)
            assert roots.imaginary[-1] == pytest.approx(im_root, abs=1e-9)

    @pytest.mark.parametrize("M1", [0.1, 1.0, 10.0])
    def test_real_root_decreases_in_degree(self, small_ft, M1):
        """Test that the real root shrinks steadily from degree 3 to 19."""
        re_roots = [biquartic_roots_hp(small_ft, M1, n, 50)[0] for n in range(3, 20, 2)]
        assert all(b < a for a, b in zip(re_roots, re_roots[1:]))

    def test_complex_regime(self):
        """Test that a negative discriminant is reported."""
        with pytest.raises(UnexpectedRegimeError):
            u_roots(1.0, 0.0, 1.0)

    def test_u4_asymptotic(self, ft):
        """Test u4 against (32/3) n (1 + 15/(8n))."""
        st = build_sobolev_table(ft, SobolevParams(0.0, 1.0))
        for k in (60, 100, 120):
            assert biquartic(st, ft, 2 * k + 1)[0] / u4_asymptotic(k) == pytest.approx(1.0, rel=0.05)

    def test_z_asymptotics(self):
        """Test the growth of z_minus and the sign of z_plus."""
        plus, minus = z_asymptotics(100)
        assert plus > 0 and minus < 0
        assert z_asymptotics(400)[1] / minus == pytest.approx(2.0, rel=1e-3)
        with pytest.raises(DomainError):
            z_asymptotics(0)


class TestElectrostatics:
    """Test the equilibrium interpretation of the zeros."""

    @pytest.mark.parametrize("M1", [0.1, 1.0, 10.0])
    def test_equilibrium(self, small_ft, M1):
        """Test the force balance at every nonzero zero of Q_{2n+1}."""
        st = build_sobolev_table(small_ft, SobolevParams(0.0, M1), 19)
        for n_odd in range(3, 20, 2):
            check = electrostatic_residual(st, small_ft, n_odd)
            assert len(check.zeros) == n_odd - 1
            assert check.worst <= 1e-6

    def test_external_potential(self):
        """Test V_ext = ln|u|/2 - ln|x| + x^4/2."""
        value = external_potential(1.0, 2.0, -1.0, 1.5)
        u = 1.5 ** 4 + 2 * 1.5 ** 2 - 1
        assert float(value) == pytest.approx(0.5 * math.log(u) - math.log(1.5) + 0.5 * 1.5 ** 4)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
