"""
Tests for complex Gamma, zeta and Hurwitz zeta against mpmath.
"""
import math

import mpmath
import numpy as np
import pytest

from app.core.exceptions import DomainError, PoleError
from app.features.special.functions import (
    complex_gamma,
    hurwitz_zeta,
    hurwitz_zeta_regular,
    log_abs_zeta_shift,
    log_gamma,
    riemann_zeta,
)

GAMMA_POINTS = [0.5, 3.0, 0.25 + 1j, -2.5 + 0.1j, 0.5 + 20j, 7.0 - 3.0j]
ZETA_POINTS = [0.5 + 14.134725j, 2.0, 0.5, 0.3 + 2j, 0.75 - 40j, 1.5 + 100j]


class TestGamma:
    """Tests for complex Gamma and log Gamma."""

    @pytest.mark.parametrize("s", GAMMA_POINTS)
    def test_gamma_matches_mpmath(self, s):
        expected = complex(mpmath.gamma(s))
        assert complex_gamma(s) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("s", GAMMA_POINTS)
    def test_log_gamma_matches_mpmath(self, s):
        expected = complex(mpmath.loggamma(s))
        assert log_gamma(s) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_vectorized(self):
        s = np.array(GAMMA_POINTS)
        values = complex_gamma(s)
        assert values.shape == s.shape
        assert values[1] == pytest.approx(2.0)

    @pytest.mark.parametrize("s", [0, -1, -7.0])
    def test_poles(self, s):
        with pytest.raises(PoleError):
            complex_gamma(s)
        with pytest.raises(PoleError):
            log_gamma(s)


class TestZeta:
    """Tests for Riemann and Hurwitz zeta."""

    @pytest.mark.parametrize("s", ZETA_POINTS)
    def test_riemann_zeta_matches_mpmath(self, s):
        expected = complex(mpmath.zeta(s))
        assert riemann_zeta(s) == pytest.approx(expected, rel=1e-10, abs=1e-12)

    def test_first_zero(self):
        assert abs(riemann_zeta(complex(0.5, 14.134725141734693))) < 1e-9

    @pytest.mark.parametrize("s", [0.5 + 3j, 2.0, 0.2 - 1j])
    def test_hurwitz_matches_mpmath(self, s):
        alphas = np.array([0.1, 0.25, 0.5, 0.9, 1.0])
        values = hurwitz_zeta(s, alphas)
        expected = [complex(mpmath.zeta(s, a)) for a in alphas]
        assert np.allclose(values, expected, rtol=1e-10, atol=1e-12)

    def test_hurwitz_scalar_returns_complex(self):
        assert isinstance(hurwitz_zeta(2.0, 0.5), complex)
        assert hurwitz_zeta(2.0, 0.5) == pytest.approx(math.pi ** 2 / 2)

    def test_regular_part_at_one_is_minus_digamma(self):
        for alpha in (0.2, 0.5, 1.0):
            expected = -float(mpmath.digamma(alpha))
            assert hurwitz_zeta_regular(1.0, alpha) == pytest.approx(expected, rel=1e-10)

    def test_regular_part_away_from_one(self):
        s = 0.5 + 2j
        expected = complex(mpmath.zeta(s, 0.3)) - 1 / (s - 1)
        assert hurwitz_zeta_regular(s, 0.3) == pytest.approx(expected, rel=1e-10)

    def test_regular_part_error_estimate(self):
        value, omitted = hurwitz_zeta_regular(0.5 + 1j, 0.5, with_error=True)
        assert isinstance(value, complex)
        assert 0 <= omitted < 1e-12

    def test_log_abs_zeta_shift(self):
        x = 1000.0
        s = mpmath.mpc(1 + 1 / math.log(x), 2.0)
        expected = float(mpmath.log(abs(mpmath.zeta(s))))
        assert log_abs_zeta_shift(2.0, x) == pytest.approx(expected, rel=1e-10)

    def test_poles_and_domain(self):
        with pytest.raises(PoleError):
            riemann_zeta(1.0)
        with pytest.raises(PoleError):
            hurwitz_zeta(1.0, 0.5)
        with pytest.raises(DomainError):
            riemann_zeta(-0.5)
        with pytest.raises(DomainError):
            riemann_zeta(complex(0.5, 2e4))
        with pytest.raises(DomainError):
            hurwitz_zeta(2.0, 1.5)
        with pytest.raises(DomainError):
            log_abs_zeta_shift(0.0, 1.5)
