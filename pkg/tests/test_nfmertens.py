from __future__ import annotations

import math
import statistics
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsmertens.exactmath import euler_gamma
from bsmertens.nfmertens import (
    ConditionGate,
    TailWarning,
    condition_gate,
    d_tail_bound,
    grh_epsilon_shape,
    lemma_c2_check,
    mertens_constant_B,
    mertens_error,
    mertens_product,
    mertens_sum,
    mertens_sweep,
    pi_audit,
    prime_reciprocal_sum,
    prime_square_tail,
    rho_epsilon_bound,
)
from bsmertens.quadfield import QuadField, place_table

from .oracles import euler_criterion, trial_division_is_prime

Q = QuadField.rationals()
GAUSS = QuadField(-4)
FIELDS = [Q, GAUSS, QuadField(5)]
MERTENS_CONSTANT = 0.2614972128476427837554268386  # Meissel-Mertens


class TestSums:
    def test_mertens_sum_q10(self):
        assert mertens_sum(place_table(Q, 10)) == pytest.approx(math.log(35 / 8), rel=1e-15)
        assert mertens_sum(place_table(Q, 10)) == pytest.approx(1.47591, abs=1e-5)

    def test_product_q10(self):
        prod = mertens_product(place_table(Q, 10))
        assert prod == Fraction(8, 35)
        assert -math.log(prod) == pytest.approx(mertens_sum(place_table(Q, 10)), rel=1e-15)

    def test_empty(self):
        t = place_table(QuadField(5), 3)  # 2 and 3 inert, no place of norm <= 3
        assert len(t) == 0
        assert mertens_sum(t) == 0.0 and prime_reciprocal_sum(t) == 0.0

    def test_reciprocal_q10(self):
        assert prime_reciprocal_sum(place_table(Q, 10)) == pytest.approx(1 / 2 + 1 / 3 + 1 / 5 + 1 / 7, rel=1e-15)

    def test_reciprocal_gauss10(self):
        assert prime_reciprocal_sum(place_table(GAUSS, 10)) == pytest.approx(1 / 2 + 2 / 5 + 1 / 9, rel=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from([1, -4, 5, -3, 13]), st.integers(2, 10**4))
    def test_product_sum_duality(self, D, x):
        t = place_table(QuadField(D), x)
        assert math.exp(-mertens_sum(t)) == pytest.approx(float(mertens_product(t)), rel=1e-12, abs=1e-300)

    def test_report_invariants(self):
        rows = mertens_sweep(FIELDS, [10, 100, 10**3, 10**4, 10**5])
        by_field: dict[str, list] = {}
        for r in rows:
            assert r.sum_log >= r.sum_recip >= 0
            by_field.setdefault(r.field, []).append(r)
        for rs in by_field.values():
            assert all(a.sum_log <= b.sum_log and a.sum_recip <= b.sum_recip for a, b in zip(rs, rs[1:]))

    def test_sweep_is_sorted(self):
        rows = mertens_sweep([QuadField(5), Q, GAUSS], [100, 10])
        assert [(r.field, r.x) for r in rows] == [("-4", 10), ("-4", 100), ("Q", 10), ("Q", 100), ("5", 10), ("5", 100)]


class TestConstantB:
    def test_meissel_mertens(self):
        b = mertens_constant_B(Q, 10**6)
        assert abs(b.B_estimate - MERTENS_CONSTANT) <= b.tail_bound
        assert b.B_estimate == pytest.approx(0.2614972, abs=1e-7)

    @pytest.mark.parametrize("K", FIELDS, ids=str)
    @pytest.mark.parametrize("x", [10**4, 10**5, 10**6])
    def test_two_routes(self, K, x):
        t = place_table(K, x)
        b = mertens_constant_B(K, x, t)
        assert math.isfinite(b.B_estimate)
        assert abs(prime_reciprocal_sum(t) - math.log(math.log(x)) - b.B_estimate) <= b.tail_bound + 0.01

    def test_tail_bound_is_degree_times_trigamma(self):
        # Euler-Maclaurin: sum_{m>100} 1/m^2 = 1/100 - 1/(2 100^2) + 1/(6 100^3) - ...
        em = 1 / 100 - 1 / (2 * 100**2) + 1 / (6 * 100**3)
        assert mertens_constant_B(GAUSS, 100).tail_bound == pytest.approx(2 * em, rel=1e-9)

    def test_rejects_small_x(self):
        with pytest.raises(ValueError):
            mertens_constant_B(Q, 99)

    @pytest.mark.parametrize("K", FIELDS, ids=str)
    def test_taylor_consistency(self, K):
        t = place_table(K, 10**6)
        diffs = [mertens_sum(t.restrict(x)) - prime_reciprocal_sum(t.restrict(x)) for x in (10**5, 10**6)]
        assert abs(diffs[1] - diffs[0]) <= 0.002


class TestError:
    def test_q10(self):
        r = mertens_error(Q, 10)
        assert r.main_term == pytest.approx(math.log(math.log(10)) + euler_gamma(), rel=1e-15)
        assert r.error == pytest.approx(0.0647, abs=1e-4)
        assert r.normalized_error == pytest.approx(abs(r.error) * math.sqrt(10) / (3 * math.log(10) + 4), rel=1e-14)
        assert r.grh_bound_shape == pytest.approx(math.log(10) / math.sqrt(10), rel=1e-14)

    def test_q_converges(self):
        errs = [abs(r.error) for r in mertens_sweep([Q], [10**3, 10**4, 10**5, 10**6])]
        assert errs == sorted(errs, reverse=True)
        assert errs[-1] < 1e-3

    @pytest.mark.parametrize("K", FIELDS, ids=str)
    def test_normalized_error_has_no_growth(self, K):
        rows = mertens_sweep([K], [10**3, 10**4, 10**5, 10**6])
        ne = [r.normalized_error for r in rows]
        assert max(ne) <= 3 * statistics.median(ne)

    def test_epsilon_shape_uses_4n(self):
        assert grh_epsilon_shape(GAUSS, math.e) == pytest.approx(6 * math.log(2) + 6 + 8)

    def test_rho_bound(self):
        v = rho_epsilon_bound(0.5, math.e**2, c1=1, c4=1)
        assert v == pytest.approx(1 / (0.5 * 2) * (1 + 2) + 1)
        with pytest.raises(ValueError):
            rho_epsilon_bound(1.0, 100)


class TestSquareTail:
    def test_q_frozen(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            t = prime_square_tail(Q, 10, 10**4)
        # sum over primes 10 < p <= 10^4 of 1/p^2 by an mpmath oracle
        assert t.partial == pytest.approx(0.0307183299635330924, rel=1e-13)
        assert t.value <= t.bound

    def test_gauss_frozen(self):
        t = prime_square_tail(GAUSS, 10, 10**4)
        assert t.partial == pytest.approx(0.0281156304868645423, rel=1e-13)

    def test_empty_range_warns(self):
        with pytest.warns(TailWarning):
            t = prime_square_tail(Q, 1000, 1000)
        assert t.partial == 0.0

    def test_rejects_inverted(self):
        with pytest.raises(ValueError):
            prime_square_tail(Q, 100, 10)

    def test_bound_value_at_ten(self):
        assert d_tail_bound(Q, 10) == pytest.approx(1 / (10 * math.log(10)) + 3 * math.log(10) / (3 * 10 * math.sqrt(10)) + 0.2)

    @pytest.mark.parametrize("x", [10**3, 3 * 10**3, 10**4, 10**5])
    def test_partial_tail_below_bound(self, x):
        t = prime_square_tail(Q, x, 10**6)
        assert t.partial <= d_tail_bound(Q, x)


class TestConditions:
    def test_c1_example(self):
        g = condition_gate(ConditionGate(1, math.log(2), c3=1), math.e**2)
        assert g.C1 is True
        assert ConditionGate(1, math.log(2)).c1_threshold() == pytest.approx(math.log(2) ** 2)

    def test_c2_degenerate(self):
        gate = ConditionGate(1, 1.0, c2=1)
        assert gate.c2_threshold() == 0.0
        for x in (3, 10, 1e6):
            assert condition_gate(gate, x).C2 is True

    def test_c2_proof_thresholds(self):
        assert ConditionGate(1, 1.0, c2=1).c2_proof_threshold() == pytest.approx(256.0)
        c = 4.0  # n = 16, c2 = 1 gives c > e
        assert ConditionGate(16, 1.0, c2=1).c2_proof_threshold() == pytest.approx((32 * c * math.log(c)) ** 2)

    def test_c3_example(self):
        gate = ConditionGate(1, 1.0, c5=1)
        assert gate.c3_threshold() == pytest.approx(math.log(2) * math.log(math.log(12)))
        assert condition_gate(gate, 3).C3 is True

    def test_c3_rejects_genus_zero(self):
        with pytest.raises(ValueError):
            condition_gate(ConditionGate(1, 0.0), 10)
        assert condition_gate(ConditionGate(1, 0.0), 10, strict_c3=False).C3 is None

    def test_gate_validation(self):
        with pytest.raises(ValueError):
            ConditionGate(1, 1.0, c2=0)
        with pytest.raises(ValueError):
            condition_gate(ConditionGate(1, 1.0), 2)


class TestLemmaC2:
    def test_y16(self):
        r = lemma_c2_check(1, 1.0, math.exp(256))
        assert r.holds and r.f == pytest.approx(65536 * math.exp(-16), rel=1e-12)
        assert r.f == pytest.approx(0.0074, abs=1e-4)

    def test_x_e(self):
        r = lemma_c2_check(1, 1.0, math.e)
        assert r.holds and r.f == pytest.approx(math.exp(-1), rel=1e-12)

    def test_fails_small_x(self):
        r = lemma_c2_check(16, 1.0, math.exp(4))
        assert not r.holds and r.f == pytest.approx(9.7, abs=0.01)

    def test_equivalence(self):
        for n in (1, 4, 9):
            for lx in (1.0, 5.0, 50.0, 500.0):
                r = lemma_c2_check(n, 1.0, math.exp(lx))
                assert r.holds == (r.f <= 1)

    def test_rejects_x_le_1(self):
        with pytest.raises(ValueError):
            lemma_c2_check(1, 1.0, 1.0)


class TestPiAudit:
    def test_q100(self):
        a = pi_audit(Q, 100)
        assert a.pi_x == 25
        assert a.delta == pytest.approx(25 - 29.080977803962137, rel=1e-12)
        assert a.grh_bound_shape == pytest.approx(10 * math.log(100))

    def test_gauss100(self):
        expected = 0
        for p in range(2, 101):
            if not trial_division_is_prime(p):
                continue
            c = 0 if p == 2 else euler_criterion(-4, p)
            expected += {1: 2, 0: 1, -1: 1 if p * p <= 100 else 0}[c]
        assert pi_audit(GAUSS, 100).pi_x == expected == 25
