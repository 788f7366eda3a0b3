"""
Tests for shifted moments, the Hoelder split and the power-moment diagnostic.
"""
import math

import numpy as np
import pytest

from app.core.config import settings
from app.core.exceptions import DomainError, ResourceError
from app.features.characters.arithmetic import euler_phi, phi_star
from app.features.characters.group import character_group
from app.features.lfunctions.reference import l_reference
from app.features.moments.service import (
    NO_PRIMITIVE_REASON,
    MomentService,
    critical_values,
    euler_product_majorant,
    growth_exponent,
    holder_exponents,
    power_moment,
    power_moment_ratio,
    predicted_main_term,
    proof_split,
    shifted_moment,
    telescoped_s0,
)
from app.features.polynomials.mollifier import good_set_polynomials, mollifier_schedule, tk_mask
from app.schemas.lfunctions import ShiftSpec

SPEC = ShiftSpec(t=(0.0, 1.0), a=(1.0, 1.0))


class TestHolderExponents:
    """Tests for the exponents of the split."""

    def test_two_shifts(self):
        holder = holder_exponents(SPEC)
        assert holder.u == pytest.approx(8.0)
        assert holder.v == pytest.approx(2.0)
        assert holder.r == pytest.approx((16 / 3, 16 / 3))

    def test_single_large_exponent(self):
        holder = holder_exponents(ShiftSpec(t=(0.0,), a=(2.0,)))
        assert holder.u == pytest.approx(8.0)
        assert holder.r == pytest.approx((4.0,))
        assert holder.v == pytest.approx(8 / 5)

    @pytest.mark.parametrize("a", [(0.5,), (1.0, 3.0), (0.25, 0.75, 2.0)])
    def test_identities(self, a):
        spec = ShiftSpec(t=tuple(0.0 for _ in a), a=a)
        holder = holder_exponents(spec)
        assert 1 / holder.u + 1 / holder.v + sum(1 / r for r in holder.r) == pytest.approx(1.0)
        for am, r in zip(a, holder.r):
            assert 2 * am / holder.u + 2 * spec.k / r == pytest.approx(1.0)


class TestShiftedMoment:
    """Tests for M_{t,a}(q) and its main term."""

    def test_direct_definition(self):
        q = 13
        expected = 0.0
        for chi in character_group(q):
            if chi.is_primitive:
                expected += (abs(l_reference(chi, 0.5).value) ** 2
                             * abs(l_reference(chi, complex(0.5, 1.0)).value) ** 2)
        assert shifted_moment(q, SPEC) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("q", [6, 10, 30])
    def test_zero_without_primitive_characters(self, q):
        assert shifted_moment(q, SPEC) == 0.0

    def test_permutation_invariance(self):
        spec = ShiftSpec(t=(0.0, 2.0, -1.0), a=(1.0, 0.5, 1.5))
        permuted = ShiftSpec(t=(-1.0, 0.0, 2.0), a=(1.5, 1.0, 0.5))
        assert shifted_moment(29, spec) == pytest.approx(shifted_moment(29, permuted), rel=1e-12)

    def test_negation_invariance(self):
        spec = ShiftSpec(t=(0.5, 3.0), a=(1.0, 0.5))
        assert shifted_moment(31, spec) == pytest.approx(shifted_moment(31, spec.negated()), rel=1e-10)

    def test_coinciding_shifts_share_values(self):
        group = character_group(11)
        values = critical_values(group, ShiftSpec(t=(1.0, 1.0), a=(1.0, 1.0)))
        assert values.shape == (2, 10)
        assert np.array_equal(values[0], values[1])

    def test_main_term_single_shift(self):
        q = 101
        spec = ShiftSpec(t=(0.0,), a=(1.0,))
        assert predicted_main_term(q, spec) == pytest.approx(euler_phi(q) * math.log(q))

    def test_main_term_is_symmetric_in_shifts(self):
        spec = ShiftSpec(t=(0.0, 3.0), a=(1.0, 2.0))
        swapped = ShiftSpec(t=(3.0, 0.0), a=(2.0, 1.0))
        assert predicted_main_term(997, spec) == pytest.approx(predicted_main_term(997, swapped))

    def test_modulus_limits(self):
        with pytest.raises(DomainError):
            shifted_moment(2, SPEC)
        with pytest.raises(ResourceError):
            shifted_moment(settings.MAX_MOMENT_MODULUS + 1, SPEC)

    def test_shifts_beyond_modulus_power(self):
        spec = ShiftSpec(t=(10.0,), a=(1.0,), bound_exponent=0.1)
        with pytest.raises(DomainError):
            shifted_moment(5, spec)
        with pytest.raises(DomainError):
            predicted_main_term(5, spec)
        with pytest.raises(DomainError):
            MomentService(threads=1).moment_report(5, spec)
        sched = mollifier_schedule(101, delta=0.5, spec=SPEC)
        with pytest.raises(DomainError):
            proof_split(101, ShiftSpec(t=(2.0,), a=(1.0,), bound_exponent=0.1), sched)
        assert shifted_moment(5, ShiftSpec(t=(1.0,), a=(1.0,), bound_exponent=0.1)) > 0


class TestProofSplit:
    """Tests for the Hoelder split over the good set."""

    @pytest.mark.parametrize("q", [101, 211])
    def test_residual_nonnegative(self, q):
        sched = mollifier_schedule(q, delta=0.5, spec=SPEC)
        split = proof_split(q, SPEC, sched)
        assert split.holder_residual >= -1e-9 * max(split.holder_rhs, 1.0)
        assert split.members <= split.primitive_count == phi_star(q)
        assert split.moment == pytest.approx(shifted_moment(q, SPEC), rel=1e-12)
        assert split.euler_majorant > 0

    def test_empty_schedule_keeps_every_primitive_character(self):
        sched = mollifier_schedule(101, delta=0.5, spec=SPEC)
        assert sched.R == 0
        split = proof_split(101, SPEC, sched)
        assert split.members == split.primitive_count
        assert split.j_sum == pytest.approx(split.primitive_count)
        assert split.telescoped == (split.s0,)

    def test_telescoped_first_entry_is_s0(self):
        sched = mollifier_schedule(211, delta=0.5, spec=SPEC)
        split = proof_split(211, SPEC, sched)
        telescoped = telescoped_s0(211, SPEC, sched)
        assert len(telescoped) == sched.R + 1
        assert telescoped[0] == pytest.approx(split.s0, rel=1e-12)

    def test_nonempty_schedule_parts(self):
        q = 1009
        sched = mollifier_schedule(q, delta=0.9, spec=SPEC)
        assert sched.R == 1
        split = proof_split(q, SPEC, sched)

        group = character_group(q)
        values = critical_values(group, SPEC)
        polys = good_set_polynomials(group, SPEC, sched)
        members = tk_mask(group, SPEC, sched, polys)
        assert split.members == int(members.sum()) > 0

        p = polys[0]
        s0 = complex(np.sum(np.prod(values * np.exp(np.conj(p)), axis=0)[members]))
        weight = np.exp(2 * np.sum(p.real, axis=0))
        j_sum = float(np.sum(weight[members]))
        k = SPEC.k
        s_m = [float(np.sum((np.abs(values[m]) ** (2 * k) * weight * np.exp(-2 * k * p[m].real))[members]))
               for m in range(k)]
        assert split.s0 == pytest.approx(s0, rel=1e-10, abs=1e-12 * split.holder_rhs)
        assert split.j_sum == pytest.approx(j_sum, rel=1e-10)
        assert split.s_m == pytest.approx(tuple(s_m), rel=1e-10)

        holder = split.holder
        rhs = split.moment ** (1 / holder.u) * j_sum ** (1 / holder.v)
        for s, r in zip(s_m, holder.r):
            rhs *= s ** (1 / r)
        assert split.holder_rhs == pytest.approx(rhs, rel=1e-10)
        assert split.holder_residual >= -1e-9 * split.holder_rhs
        assert abs(split.s0) <= split.holder_rhs * (1 + 1e-9)

        assert len(split.telescoped) == 2
        assert split.telescoped[1] == pytest.approx(split.s0, rel=1e-8, abs=1e-10 * split.holder_rhs)

    def test_schedule_must_match_modulus(self):
        sched = mollifier_schedule(101, delta=0.5, spec=SPEC)
        with pytest.raises(DomainError):
            proof_split(103, SPEC, sched)

    def test_without_telescope(self):
        sched = mollifier_schedule(103, delta=0.5, spec=SPEC)
        assert proof_split(103, SPEC, sched, telescope=False).telescoped == ()


class TestDiagnostics:
    """Tests for the power moment, the Euler majorant and the growth exponent."""

    def test_power_moment_small_case(self):
        row = power_moment(5, 2, None, 1)
        assert row.lhs == pytest.approx(2.0)
        assert row.rhs == pytest.approx(2.0)
        assert row.ratio == pytest.approx(1.0)

    def test_mean_square_is_exact_below_q(self):
        coeffs = {p: complex(math.cos(p), math.sin(p)) for p in range(2, 21)}
        assert power_moment_ratio(101, 20, coeffs, 1) == pytest.approx(1.0, rel=1e-12)

    def test_fourth_moment_ratio_is_moderate(self):
        ratio = power_moment_ratio(1009, 10, None, 2)
        assert 0 < ratio <= 1.0 + 1e-12

    @pytest.mark.parametrize("args", [(101, 30, None, 1), (5, 2, None, 0), (10, 2.5, None, 1)])
    def test_power_moment_domain(self, args):
        with pytest.raises(DomainError):
            power_moment(*args)

    def test_euler_majorant_exceeds_phi(self):
        assert euler_product_majorant(101, SPEC) > euler_phi(101)

    def test_growth_exponent(self):
        chi = character_group(101).character(3)
        value = abs(l_reference(chi, complex(0.5, 2.0)).value)
        expected = math.log(value) * math.log(math.log(101)) / math.log(101)
        assert growth_exponent(chi, 2.0) == pytest.approx(expected)


class TestMomentService:
    """Tests for reports and sweeps."""

    def test_report(self):
        report = MomentService(threads=1).moment_report(13, SPEC)
        assert report.phi == 12 and report.phi_star == 11
        assert report.ratio == pytest.approx(report.moment / report.main_term)
        assert report.split is None and report.skipped_reason is None

    def test_report_without_primitive_characters(self):
        report = MomentService(threads=1).moment_report(6, SPEC)
        assert report.moment == 0.0
        assert report.skipped_reason == NO_PRIMITIVE_REASON

    def test_report_with_split(self):
        report = MomentService(threads=1).moment_report(101, SPEC, split=True)
        assert report.split is not None
        assert report.moment == report.split.moment

    def test_sweep(self):
        reports, summary = MomentService(threads=1).moment_sweep([5, 6, 7], SPEC)
        assert [r.q for r in reports] == [5, 6, 7]
        assert summary.count == 2
        assert summary.skipped == [6]
        assert summary.min_ratio <= summary.max_ratio
        assert summary.spread == pytest.approx(summary.max_ratio / summary.min_ratio)

    def test_sweep_is_independent_of_worker_count(self):
        serial, _ = MomentService(threads=1).moment_sweep([7, 11, 13], SPEC)
        parallel, _ = MomentService(threads=2).moment_sweep([7, 11, 13], SPEC)
        assert [r.moment for r in serial] == [r.moment for r in parallel]

    def test_sweep_domain(self):
        with pytest.raises(DomainError):
            MomentService(threads=1).moment_sweep([], SPEC)
        with pytest.raises(DomainError):
            MomentService(threads=1).moment_sweep([5, 2], SPEC)
