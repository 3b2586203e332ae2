"""Tests for the string-equation coefficient table and its oracles."""

import math

import numpy as np
import pytest

from freudsobolev.coeffs import (
    build_freud_table,
    forward_hp_table,
    freud_quadrature,
    gamma_constants,
    instability_profile,
    lew_quarles_estimate,
    stieltjes_oracle,
    string_residuals,
    truncation_half_width,
)
from freudsobolev.exceptions import ConfigurationError, DomainError, TableExhaustedError
from freudsobolev.models import MethodTag
from freudsobolev.utils import loglog_slope

A1_SQ = 0.3379891200336424
MU0 = 1.8128049541109541


class TestGammaConstants:
    """Test the closed-form starting values."""

    def test_a1_and_mu0(self):
        """Test a_1^2 = Gamma(3/4)/Gamma(1/4) and mu0 = Gamma(1/4)/2."""
        constants = gamma_constants(30)
        assert float(constants.a1_sq_exact) == pytest.approx(A1_SQ, abs=1e-15)
        assert float(constants.mu0) == pytest.approx(MU0, abs=1e-15)

    def test_low_precision_rejected(self):
        """Test that fewer than 16 digits is a configuration error."""
        with pytest.raises(ConfigurationError):
            gamma_constants(10)


class TestLewQuarles:
    """Test the large-n estimate."""

    def test_domain(self):
        """Test that n <= 0 is rejected."""
        with pytest.raises(DomainError):
            lew_quarles_estimate(0)

    def test_leading_behaviour(self):
        """Test sqrt(n/12) leading order."""
        assert lew_quarles_estimate(1200) == pytest.approx(10.0, rel=1e-7)

    def test_deviation_decays_fast(self, ft):
        """Test that the table approaches the estimate at least like n^-3.5."""
        n = np.arange(20, 201)
        deviation = np.abs(ft.a_sq[n] / [lew_quarles_estimate(k) for k in n] - 1.0)
        assert loglog_slope(n, deviation) <= -3.5


class TestBuildFreudTable:
    """Test the Newton solve of the string equation."""

    def test_certificate(self, ft):
        """Test a_1^2 against the exact value."""
        assert abs(ft.a_sq[1] - A1_SQ) <= 1e-10
        assert ft.method_tag == MethodTag.NEWTON_SYSTEM

    def test_string_residuals(self, ft):
        """Test residuals of the string equation scaled by n."""
        residuals = string_residuals(ft)
        assert np.all(residuals <= 1e-12 * np.arange(1, ft.n_max))

    def test_first_coefficients(self, ft):
        """Test a_2^2 = 1/(4 a_1^2) - a_1^2."""
        assert ft.a_sq[0] == 0.0
        assert ft.a_sq[2] == pytest.approx(1.0 / (4.0 * A1_SQ) - A1_SQ, abs=1e-13)

    def test_norms(self, ft):
        """Test ||F_n||^2 = mu0 * a_1^2 ... a_n^2 and gamma_n = ||F_n||^-1."""
        assert ft.norm_sq[0] == pytest.approx(MU0, rel=1e-14)
        assert ft.norm_sq[5] == pytest.approx(MU0 * np.prod(ft.a_sq[1:6]), rel=1e-13)
        assert ft.gamma[5] == pytest.approx(1.0 / math.sqrt(ft.norm_sq[5]), rel=1e-13)

    def test_positive_and_increasing(self, ft):
        """Test a_n^2 > 0 and eventually increasing."""
        assert np.all(ft.a_sq[1:] > 0)
        assert np.all(np.diff(ft.a_sq[10:]) > 0)

    def test_table_is_read_only(self, ft):
        """Test that table arrays cannot be modified."""
        with pytest.raises(ValueError):
            ft.a_sq[1] = 0.0

    def test_require(self, ft):
        """Test that degrees past n_max raise TableExhaustedError."""
        with pytest.raises(TableExhaustedError) as exc:
            ft.require(ft.n_max + 1)
        assert exc.value.available == ft.n_max

    def test_small_n_max_rejected(self):
        """Test that n_max < 2 is rejected."""
        with pytest.raises(ConfigurationError):
            build_freud_table(1)


class TestOracles:
    """Test the independent methods against the Newton table."""

    def test_stieltjes_agreement(self, ft):
        """Test the quadrature Stieltjes procedure for n <= 60."""
        oracle = stieltjes_oracle(60)
        assert oracle.method_tag == MethodTag.STIELTJES
        assert np.max(np.abs(oracle.a_sq - ft.a_sq[:61])) <= 1e-10
        assert oracle.norm_sq[0] == pytest.approx(MU0, rel=1e-13)

    def test_stieltjes_cap(self):
        """Test that the oracle refuses degrees above 60."""
        with pytest.raises(ConfigurationError):
            stieltjes_oracle(61)

    def test_forward_hp_agreement(self, ft):
        """Test high-precision forward recursion."""
        forward = forward_hp_table(40)
        assert forward.method_tag == MethodTag.FORWARD_HP
        assert np.max(np.abs(forward.a_sq - ft.a_sq[:41])) <= 1e-12


class TestInstabilityProfile:
    """Test that double precision forward recursion is unstable."""

    def test_error_grows(self, ft):
        """Test tiny early errors and large late ones."""
        profile = instability_profile(ft, 60)
        assert profile[3] <= 1e-12
        late = profile[30:]
        assert np.any(np.isnan(late)) or np.nanmax(late) > 1e-3


class TestQuadrature:
    """Test the truncated Gauss-Legendre rule for e^{-x^4}."""

    def test_half_width(self):
        """Test the truncation half-width formula."""
        assert truncation_half_width(1) == 3.2
        assert truncation_half_width(192) == pytest.approx(6.0)

    def test_moments(self):
        """Test int e^{-x^4} and int x^2 e^{-x^4}."""
        nodes, weights = freud_quadrature(10, 2000)
        assert np.sum(weights) == pytest.approx(MU0, rel=1e-13)
        assert np.sum(weights * nodes ** 2) == pytest.approx(MU0 * A1_SQ, rel=1e-12)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
