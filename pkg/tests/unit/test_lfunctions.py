"""
Tests for reference L-values, the functional equation and the approximate functional equation.
"""
import math

import mpmath
import numpy as np
import pytest

from app.core.config import settings
from app.core.constants import LValueMethod
from app.core.exceptions import DomainError, PoleError
from app.features.characters.arithmetic import divisor_count
from app.features.characters.group import character, character_group
from app.features.lfunctions.afe import (
    AfeEvaluator,
    WeightTable,
    afe_agreement,
    afe_product,
    afe_tolerance,
    afe_weight,
    tau_shift,
    tau_shift_table,
    weight_cutoff,
    weight_limit,
)
from app.features.lfunctions.reference import (
    functional_equation_residual,
    l_reference,
    l_reference_at,
    l_values,
    root_number,
)
from app.schemas.lfunctions import AfeWeightSpec


def _mpmath_l(chi, s) -> complex:
    return complex(mpmath.dirichlet(s, [complex(v) for v in chi.values]))


class TestReference:
    """Tests for the Hurwitz-based evaluator."""

    @pytest.mark.parametrize("q", [3, 5, 8, 13])
    @pytest.mark.parametrize("s", [0.5 + 1j, 2.0, 0.3 - 4j])
    def test_primitive_values_match_mpmath(self, q, s):
        for chi in character_group(q):
            if chi.is_primitive:
                result = l_reference(chi, s)
                assert result.method == LValueMethod.REFERENCE
                assert result.value == pytest.approx(_mpmath_l(chi, s), rel=1e-10, abs=1e-12)
                assert result.truncation_error_estimate < 1e-8

    def test_principal_character(self):
        chi = character_group(12).principal
        expected = complex(mpmath.zeta(2) * (1 - 2 ** -2) * (1 - 3 ** -2))
        assert l_reference(chi, 2.0).value == pytest.approx(expected, rel=1e-12)

    def test_group_values_include_imprimitive(self):
        group = character_group(12)
        s = 0.5 + 2j
        values = l_values(group, s)
        for chi in group:
            assert values[chi.index] == pytest.approx(_mpmath_l(chi, s), rel=1e-10, abs=1e-12)

    def test_principal_entry_is_nan_at_one(self):
        values = l_values(character_group(7), 1.0)
        assert np.isnan(values[0])
        assert np.all(np.isfinite(values[1:]))

    def test_nonprincipal_at_one(self):
        chi = next(c for c in character_group(4) if not c.is_principal)
        assert l_reference(chi, 1.0).value == pytest.approx(math.pi / 4, rel=1e-12)

    def test_rejects_imprimitive(self):
        chi = next(c for c in character_group(12) if not c.is_primitive and not c.is_principal)
        with pytest.raises(DomainError):
            l_reference(chi, 0.5)

    def test_pole(self):
        with pytest.raises(PoleError):
            l_reference(character_group(5).principal, 1.0)

    def test_by_index(self):
        assert l_reference_at(5, 2, 2.0).value == l_reference(character(5, 2), 2.0).value


class TestFunctionalEquation:
    """Tests for root numbers and the completed L-function."""

    @pytest.mark.parametrize("q", [5, 7, 12, 13, 16])
    def test_root_number_has_modulus_one(self, q):
        for chi in character_group(q):
            if chi.is_primitive:
                assert abs(root_number(chi)) == pytest.approx(1.0, abs=1e-12)

    def test_real_characters_have_root_number_one(self):
        for q in (5, 8, 12, 13):
            for chi in character_group(q):
                if chi.is_primitive and chi.order == 2:
                    assert root_number(chi) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("q", [5, 7, 13])
    @pytest.mark.parametrize("s", [0.5 + 3j, 0.25 + 0.5j, 0.7 - 3j])
    def test_residual(self, q, s):
        for chi in character_group(q):
            if chi.is_primitive:
                assert functional_equation_residual(chi, s) < 1e-10

    def test_domain(self):
        chi = character(7, 1)
        with pytest.raises(DomainError):
            functional_equation_residual(chi, 1.5)
        with pytest.raises(DomainError):
            root_number(character_group(9).principal)


class TestShiftedDivisorFunction:
    """Tests for tau_t."""

    def test_zero_shifts_count_divisors(self):
        for n in range(1, 60):
            assert tau_shift(n, (0.0, 0.0)) == pytest.approx(divisor_count(n))

    def test_single_shift(self):
        assert tau_shift(7, (2.0,)) == pytest.approx(complex(mpmath.power(7, -2j)))

    def test_table_matches_direct(self):
        t = (0.5, -1.0, 2.0)
        table = tau_shift_table(120, t)
        for n in range(1, 121):
            assert table[n] == pytest.approx(tau_shift(n, t), abs=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            tau_shift(0, (1.0,))
        with pytest.raises(DomainError):
            tau_shift(5, ())


class TestWeight:
    """Tests for the smoothing weight W and its tabulation."""

    SPECS = [
        AfeWeightSpec(parity=0, sign=1, shifts=(0.0, 1.0)),
        AfeWeightSpec(parity=1, sign=-1, shifts=(1.0,)),
        AfeWeightSpec(parity=0, sign=-1, shifts=(0.5, -0.5)),
    ]

    def test_limit_at_zero(self):
        assert weight_limit(self.SPECS[0]) == 1.0
        assert abs(weight_limit(self.SPECS[1])) == pytest.approx(1.0, rel=1e-12)
        for spec in self.SPECS:
            assert abs(afe_weight(spec, 1e-24) - weight_limit(spec)) < 1e-4

    @pytest.mark.parametrize("spec", SPECS)
    def test_decay_at_large_x(self, spec):
        assert abs(afe_weight(spec, math.exp(20.0))) < 1e-10

    @pytest.mark.parametrize("spec", SPECS)
    def test_table_matches_quadrature(self, spec):
        grid = np.linspace(-2.0, 15.0, 50)
        table = WeightTable(spec)(grid)
        direct = afe_weight(spec, np.exp(grid))
        assert np.max(np.abs(table - direct)) < 1e-9

    @pytest.mark.parametrize("spec", SPECS)
    def test_cutoff_grows_as_eps_shrinks(self, spec):
        cutoffs = [weight_cutoff(spec, eps) for eps in (1e-4, 1e-8, 1e-12)]
        assert cutoffs == sorted(cutoffs)
        for eps, cutoff in zip((1e-4, 1e-8, 1e-12), cutoffs):
            assert abs(afe_weight(spec, math.exp(cutoff))) < eps

    def test_domain(self):
        with pytest.raises(DomainError):
            afe_weight(self.SPECS[0], 0.0)
        with pytest.raises(DomainError):
            afe_weight(self.SPECS[0], np.array([1.0, -1.0]))


class TestApproximateFunctionalEquation:
    """Cross-method agreement of the AFE with the reference evaluator."""

    SHIFTS = (0.0, 1.0)

    @pytest.mark.parametrize("X", [0.5, 1.0, 2.0])
    @pytest.mark.parametrize("shifts", [(0.0,), (0.0, 1.0), (0.5, -0.5)])
    @pytest.mark.parametrize("q", [5, 7, 11, 13, 37])
    def test_agreement_with_reference(self, q, shifts, X):
        group = character_group(q)
        reference = np.ones(group.size, dtype=complex)
        for t in shifts:
            reference *= l_values(group, complex(0.5, t))
        afe = AfeEvaluator(q, shifts, X).for_group(group)
        for chi in group:
            if not chi.is_primitive:
                assert np.isnan(afe[chi.index])
                continue
            deviation, relative, within = afe_agreement(complex(afe[chi.index]), complex(reference[chi.index]))
            assert within, f"chi {chi.index} mod {q}: deviation {deviation} (relative={relative})"

    def test_agreement_switches_to_absolute_near_zero(self):
        deviation, relative, within = afe_agreement(1.0 + 1e-7, 1.0)
        assert relative and within
        assert deviation == pytest.approx(1e-7, rel=1e-6)
        assert not afe_agreement(1.0 + 1e-5, 1.0)[2]

        deviation, relative, within = afe_agreement(1e-9 + 5e-11, 1e-9)
        assert not relative and within
        assert deviation == pytest.approx(5e-11, rel=1e-4)
        deviation, relative, within = afe_agreement(1e-9 + 5e-10, 1e-9)
        assert not relative and not within
        assert deviation == pytest.approx(5e-10, rel=1e-4)
        assert not afe_agreement(0.0, settings.AFE_RELATIVE_FLOOR)[1]

    def test_agreement_tolerances_follow_settings(self):
        settings.AFE_RELATIVE_TOLERANCE = 1e-9
        assert afe_tolerance(True) == 1e-9
        assert not afe_agreement(1.0 + 1e-7, 1.0)[2]
        assert afe_tolerance(False) == settings.AFE_ABSOLUTE_TOLERANCE

    def test_single_character_matches_group(self):
        group = character_group(11)
        evaluator = AfeEvaluator(11, self.SHIFTS, 1.0)
        values = evaluator.for_group(group)
        chi = group.character(3)
        result = afe_product(chi, self.SHIFTS, 1.0)
        assert result.method == LValueMethod.AFE
        assert result.value == pytest.approx(values[3], rel=1e-10, abs=1e-12)
        assert evaluator.for_character(chi).value == pytest.approx(result.value, rel=1e-12)

    def test_single_shift_is_l_value(self):
        chi = character(7, 1)
        value = afe_product(chi, (0.0,), 1.0).value
        assert value == pytest.approx(l_reference(chi, 0.5).value, rel=1e-8, abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            AfeEvaluator(13, self.SHIFTS, 0.0)
        with pytest.raises(DomainError):
            AfeEvaluator(1, self.SHIFTS, 1.0)
        with pytest.raises(DomainError):
            afe_product(character_group(9).principal, self.SHIFTS, 1.0)
