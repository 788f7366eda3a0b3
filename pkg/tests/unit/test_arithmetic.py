"""
Tests for exact integer arithmetic.
"""
import pytest
import sympy

from app.core.exceptions import DomainError
from app.features.characters.arithmetic import (
    carmichael_lambda,
    divisor_count,
    divisor_count_k,
    divisors,
    euler_phi,
    factorize,
    is_prime,
    mobius,
    multiplicative_order,
    phi_star,
    primitive_root,
    valuation,
)


class TestFactorize:
    """Tests for factorize."""

    def test_small_values_match_sympy(self):
        for n in range(1, 2000):
            assert factorize(n).as_dict() == sympy.factorint(n)

    def test_one_is_empty_product(self):
        assert factorize(1).factors == ()
        assert factorize(1).n == 1

    def test_large_semiprime(self):
        p, q = 1_000_000_007, 998_244_353
        assert factorize(p * q).as_dict() == {q: 1, p: 1}

    def test_mersenne_prime(self):
        n = 2 ** 61 - 1
        assert factorize(n).as_dict() == {n: 1}

    def test_string_form(self):
        assert str(factorize(360)) == "2^3 * 3^2 * 5"

    @pytest.mark.parametrize("n", [0, -5, 2 ** 63])
    def test_out_of_range(self, n):
        with pytest.raises(DomainError):
            factorize(n)


class TestMultiplicativeFunctions:
    """Tests for phi, phi*, mu and the divisor functions."""

    def test_is_prime_matches_sympy(self):
        for n in range(-3, 5000):
            assert is_prime(n) == sympy.isprime(n)

    def test_euler_phi_matches_sympy(self):
        for n in range(1, 1000):
            assert euler_phi(n) == sympy.totient(n)

    def test_mobius_matches_sympy(self):
        for n in range(1, 1000):
            assert mobius(n) == sympy.mobius(n)

    def test_phi_star_is_mobius_convolution_of_phi(self):
        for n in range(1, 500):
            expected = sum(mobius(n // d) * euler_phi(d) for d in divisors(n))
            assert phi_star(n) == expected

    def test_phi_star_vanishes_at_2_mod_4(self):
        for n in range(2, 400, 4):
            assert phi_star(n) == 0

    def test_phi_star_examples(self):
        assert phi_star(5) == 3
        assert phi_star(9) == 4
        assert phi_star(8) == 2
        assert phi_star(1) == 1

    def test_divisors(self):
        assert divisors(12) == [1, 2, 3, 4, 6, 12]
        assert divisor_count(12) == 6

    def test_divisor_count_k_counts_ordered_factorizations(self):
        for n in range(1, 60):
            assert divisor_count_k(n, 1) == 1
            assert divisor_count_k(n, 2) == len(divisors(n))
            assert divisor_count_k(n, 3) == sum(divisor_count(d) for d in divisors(n))

    def test_divisor_count_k_rejects_zero(self):
        with pytest.raises(DomainError):
            divisor_count_k(10, 0)


class TestUnitGroup:
    """Tests for orders, Carmichael lambda and primitive roots."""

    def test_carmichael_matches_sympy(self):
        for n in range(1, 600):
            assert carmichael_lambda(n) == sympy.reduced_totient(n)

    def test_multiplicative_order_matches_sympy(self):
        for n in (7, 9, 16, 45, 101):
            for g in range(1, n):
                if sympy.gcd(g, n) == 1:
                    assert multiplicative_order(g, n) == sympy.n_order(g, n)

    def test_multiplicative_order_requires_unit(self):
        with pytest.raises(DomainError):
            multiplicative_order(6, 9)

    def test_primitive_root(self):
        for n in (3, 5, 7, 9, 25, 27, 101, 121):
            g = primitive_root(n)
            assert multiplicative_order(g, n) == euler_phi(n)

    @pytest.mark.parametrize("n", [8, 15, 2])
    def test_primitive_root_rejects_non_odd_prime_powers(self, n):
        with pytest.raises(DomainError):
            primitive_root(n)

    def test_valuation(self):
        assert valuation(48, 2) == 4
        assert valuation(7, 2) == 0
        with pytest.raises(DomainError):
            valuation(0, 3)
