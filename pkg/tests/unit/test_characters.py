"""
Tests for character groups, Gauss sums, Kloosterman sums and orthogonality.
"""
import cmath
from math import gcd

import numpy as np
import pytest

from app.core.config import settings
from app.core.exceptions import DomainError, ResourceError
from app.features.characters.arithmetic import divisors, euler_phi, phi_star
from app.features.characters.group import character, character_group, conductor
from app.features.characters.sums import (
    gauss_conjugation_residual,
    gauss_sum,
    gauss_sums,
    kloosterman_sum,
    orthogonality_sum,
    primitive_orthogonality_formula,
    primitive_orthogonality_sum,
    product_orthogonality,
    weil_bound,
)


def _brute_conductor(chi) -> int:
    """Smallest d | q with chi(n) = 1 for every unit n = 1 mod d."""
    q = chi.q
    units = [n for n in range(1, q + 1) if gcd(n, q) == 1]
    for d in divisors(q):
        if all(abs(chi(n) - 1) < 1e-12 for n in units if n % d == 1 % d):
            return d
    return q


class TestCharacterGroup:
    """Tests for group structure and character values."""

    @pytest.mark.parametrize("q", list(range(1, 121)))
    def test_counts(self, q):
        group = character_group(q)
        assert len(group) == euler_phi(q)
        assert group.primitive_count == phi_star(q)

    @pytest.mark.parametrize("q", [8, 12, 15, 16, 21, 24, 27, 32, 45, 60])
    def test_conductors_match_brute_force(self, q):
        for chi in character_group(q):
            assert conductor(chi) == _brute_conductor(chi)

    @pytest.mark.parametrize("q", [7, 16, 20, 63])
    def test_values_are_multiplicative(self, q):
        for chi in character_group(q):
            for m in range(1, q):
                for n in range(1, q):
                    assert chi(m * n) == pytest.approx(chi(m) * chi(n), abs=1e-12)

    @pytest.mark.parametrize("q", [5, 8, 24, 35])
    def test_parity(self, q):
        for chi in character_group(q):
            expected = 1.0 if chi.parity == 0 else -1.0
            assert chi(q - 1) == pytest.approx(expected, abs=1e-12)

    def test_values_vanish_off_units(self):
        chi = character(12, 1)
        assert chi(6) == 0
        assert chi.values[3] == 0

    def test_quarter_turn_values_are_exact(self):
        for chi in character_group(5):
            for n in range(1, 5):
                value = chi(n)
                assert value in (1, -1, 1j, -1j)

    def test_principal_and_index(self):
        group = character_group(45)
        assert group.principal.is_principal
        assert group.principal.conductor == 1
        for chi in group:
            assert group.character(chi.index) == chi
            assert group.character(chi.exponents) == chi

    def test_conjugate_has_conjugate_values(self):
        for chi in character_group(13):
            assert np.allclose(chi.conjugate().values, np.conj(chi.values))

    def test_order_divides_exponent(self):
        group = character_group(40)
        for chi in group:
            assert group.exponent % chi.order == 0
            assert chi(3) ** chi.order == pytest.approx(1.0)

    def test_values_at_matches_character_values(self):
        group = character_group(36)
        for n in (5, 7, 35):
            column = group.values_at(n)
            assert np.allclose(column, [chi(n) for chi in group])
        assert not group.values_at(6).any()

    def test_transform_matches_direct_sums(self):
        group = character_group(21)
        rng = np.random.default_rng(7)
        weights = rng.normal(size=21) + 1j * rng.normal(size=21)
        direct = [np.dot(chi.values, weights) for chi in group]
        assert np.allclose(group.transform(weights), direct)

    def test_out_of_range_index(self):
        with pytest.raises(DomainError):
            character(7, 6)
        with pytest.raises(DomainError):
            character(7, (7,))

    def test_modulus_cap(self):
        with pytest.raises(DomainError):
            character_group(0)
        with pytest.raises(ResourceError):
            character_group(10 ** 12)

    def test_lowered_cap_applies_to_cached_groups(self):
        assert character_group(101).size == 100
        settings.MAX_GROUP_MODULUS = 50
        with pytest.raises(ResourceError):
            character_group(101)


class TestGaussSums:
    """Tests for Gauss sums."""

    @pytest.mark.parametrize("q", [5, 12, 16, 27, 35, 101])
    def test_primitive_absolute_value(self, q):
        for chi in character_group(q):
            if chi.is_primitive:
                assert abs(gauss_sum(chi)) ** 2 == pytest.approx(q, rel=1e-10)

    def test_group_transform_matches_direct(self):
        group = character_group(24)
        assert np.allclose(gauss_sums(group), [gauss_sum(chi) for chi in group])

    @pytest.mark.parametrize("q", [7, 9, 20])
    def test_conjugation_identity(self, q):
        for chi in character_group(q):
            assert gauss_conjugation_residual(chi) < 1e-10

    def test_quadratic_character_mod_5(self):
        chi = next(c for c in character_group(5) if c.order == 2)
        assert gauss_sum(chi) == pytest.approx(5 ** 0.5)


class TestKloosterman:
    """Tests for hyper-Kloosterman sums."""

    def test_single_variable_is_additive_character(self):
        assert kloosterman_sum(1, 1, 5) == pytest.approx(cmath.exp(2j * cmath.pi / 5))

    @pytest.mark.parametrize("q", [7, 11, 31, 45])
    def test_classical_sum_matches_brute_force(self, q):
        units = [x for x in range(1, q) if gcd(x, q) == 1]
        expected = sum(cmath.exp(2j * cmath.pi * (x + pow(x, -1, q)) / q) for x in units)
        assert kloosterman_sum(2, 1, q) == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("k,q", [(2, 101), (3, 31), (3, 35), (4, 13)])
    def test_weil_bound(self, k, q):
        for v in (1, 2, q - 1):
            assert abs(kloosterman_sum(k, v, q)) <= weil_bound(k, q) * (1 + 1e-9)

    def test_requires_unit_argument(self):
        with pytest.raises(DomainError):
            kloosterman_sum(2, 3, 9)

    def test_tuple_cap(self):
        with pytest.raises(ResourceError):
            kloosterman_sum(3, 1, 101, max_tuples=1000)


class TestOrthogonality:
    """Tests for the counting identities."""

    @pytest.mark.parametrize("q", [9, 15, 16, 77])
    def test_full_group(self, q):
        for n in range(1, 2 * q):
            if gcd(n, q) == 1:
                expected = euler_phi(q) if n % q == 1 else 0
                assert orthogonality_sum(q, n) == expected

    @pytest.mark.parametrize("q", [8, 9, 12, 25, 36, 105])
    def test_primitive_sum(self, q):
        for a in range(1, q):
            if gcd(a, q) == 1:
                assert primitive_orthogonality_sum(q, a) == primitive_orthogonality_formula(q, a)
        assert primitive_orthogonality_sum(q, 1) == phi_star(q)

    def test_rejects_non_units(self):
        with pytest.raises(DomainError):
            orthogonality_sum(10, 4)
        with pytest.raises(DomainError):
            primitive_orthogonality_sum(10, 5)

    def test_product_orthogonality(self):
        lhs, rhs = product_orthogonality(101, [{2: 1.0, 4: 0.5}, {3: 1j, 9: 1.0}])
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_product_orthogonality_needs_coprime_supports(self):
        with pytest.raises(DomainError):
            product_orthogonality(101, [{2: 1.0}, {4: 1.0}])
        with pytest.raises(DomainError):
            product_orthogonality(31, [{5: 1.0}, {7: 1.0}])
