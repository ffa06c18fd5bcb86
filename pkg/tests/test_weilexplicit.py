from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bsmertens.corpus import CORPUS, load_curve
from bsmertens.curvezeta import PointCounts, analyse_curve, zeta_numerator
from bsmertens.exactmath import euler_gamma
from bsmertens.weilexplicit import (
    IdentityViolation,
    InsufficientCounts,
    WeilData,
    WeilDataError,
    allowed_angles,
    audit,
    curve_weil_data,
    lemma_s0_bound,
    lemma_s1_bound,
    lemma_s2_bound,
    lemma_s3_bound,
    middle_tail_bound,
    phi_upper_bound,
    random_weil_data,
    residue_from_counts,
    s_terms,
    variety_mertens,
)

from .oracles import harmonic


def p1_data(M: int) -> WeilData:
    return WeilData(1, 2, (1, 0, 1), tuple(2**n + 1 for n in range(1, M + 1)), "p1")


def ell_f2(M: int = 64) -> WeilData:
    P = zeta_numerator(PointCounts(2, 1, (3, 9)))
    return curve_weil_data(P, M, "ell_f2")


class TestWeilData:
    def test_betti_validation(self):
        with pytest.raises(WeilDataError):
            WeilData(1, 2, (1, 2), (3,))
        with pytest.raises(WeilDataError):
            WeilData(1, 2, (2, 0, 1), (3,))
        with pytest.raises(WeilDataError):
            WeilData(2, 2, (1, 1, 0, 2, 1), ())
        with pytest.raises(WeilDataError):
            WeilData(0, 2, (1,), ())

    def test_deligne_violation(self):
        with pytest.raises(WeilDataError):
            WeilData(1, 2, (1, 2, 1), (100,))
        # the bound is sharp: |N - r| <= 1 + 2 sqrt(2) admits 5 but not 6
        assert WeilData(1, 2, (1, 2, 1), (5,)).M == 1
        with pytest.raises(WeilDataError):
            WeilData(1, 2, (1, 2, 1), (6,))

    def test_accessors(self):
        w = ell_f2(4)
        assert w.b_x == 2 and w.betti_sum == 4
        assert w.middle_trace(2) == 9 - 1 - 4
        with pytest.raises(InsufficientCounts):
            w.count(5)
        with pytest.raises(InsufficientCounts):
            w.truncated(5)
        assert w.truncated(2).counts == (3, 9)

    def test_document_round_trip(self):
        w = ell_f2(6)
        assert WeilData.from_document(w.to_document()) == w
        with pytest.raises(WeilDataError):
            WeilData.from_document({"d": 1})
        with pytest.raises(WeilDataError):
            WeilData.from_document({"d": 1, "r": 2})

    def test_from_angles_p2_like(self):
        w = WeilData.from_document({"d": 2, "r": 2, "eigen_angles": [[2, 0, 1]], "M": 5})
        assert w.betti == (1, 0, 1, 0, 1)
        assert w.counts == tuple(1 + 2**n + 4**n for n in range(1, 6))

    def test_from_angles_matches_curve(self):
        # ell_f2 has inverse roots +- i sqrt 2: weight 1, angles 1/2 and 3/2
        w = WeilData.from_angles(1, 2, [[1, 1, 2], [1, 3, 2]], 8)
        assert w.counts == ell_f2(8).counts

    def test_angles_not_conjugate_closed(self):
        with pytest.raises(WeilDataError):
            WeilData.from_angles(1, 2, [[1, 1, 2]], 4)

    def test_allowed_angles_have_integral_traces(self):
        assert Fraction(1, 2) in allowed_angles(2, 1)
        assert Fraction(0) not in allowed_angles(2, 1)  # sqrt 2 is irrational
        assert Fraction(0) in allowed_angles(4, 1)


class TestSplit:
    def test_p1_n2(self):
        split = s_terms(p1_data(2), 2)
        assert split.S0 == Fraction(17, 8)
        assert (split.S1, split.S2, split.S3) == (Fraction(3, 2), Fraction(5, 8), 0)
        assert split.identity_exact

    def test_elliptic_s3(self):
        assert s_terms(ell_f2(2), 2).S3 == Fraction(1, 2)

    def test_s1_is_harmonic(self):
        for N in (1, 5, 17):
            assert s_terms(ell_f2(20), N).S1 == harmonic(N)

    @pytest.mark.parametrize("name", CORPUS)
    def test_identity_on_corpus(self, name):
        res = analyse_curve(load_curve(name), 20, brute_max=3)
        w = WeilData.from_zeta(res.zeta, 20)
        for N in range(1, 21):
            assert s_terms(w, N, res.phi).identity_exact

    def test_poisoned_phi(self):
        w = p1_data(3)
        with pytest.raises(WeilDataError):
            s_terms(w, 3, {1: 3, 2: 1, 3: 3})
        with pytest.raises(InsufficientCounts):
            s_terms(w, 3, {1: 3, 2: 1})
        with pytest.raises(InsufficientCounts):
            s_terms(w, 4)

    def test_identity_violation_type(self):
        assert issubclass(IdentityViolation, ArithmeticError)


class TestLemmas:
    def test_s1_n10(self):
        chk = lemma_s1_bound(10)
        assert chk.value == pytest.approx(float(harmonic(10)) - math.log(10) - euler_gamma(), rel=1e-12)
        assert chk.value == pytest.approx(0.04917, abs=1e-5)
        assert (chk.lower, chk.upper) == (pytest.approx(1 / 110), pytest.approx(0.1))
        assert chk.holds

    def test_s1_n1_outside_gate(self):
        chk = lemma_s1_bound(1)
        assert not chk.holds and not chk.in_gate

    @pytest.mark.parametrize("N", [2, 3, 10, 100, 1000])
    def test_s1_holds(self, N):
        assert lemma_s1_bound(N).holds

    def test_s2_p1(self):
        chk = lemma_s2_bound(p1_data(3), 3)
        assert chk.value == pytest.approx(math.log(2) - (1 / 2 + 1 / 8 + 1 / 24), rel=1e-12)
        assert chk.upper == pytest.approx(1 / (8 * 4 * 1))
        assert chk.holds

    def test_s0_p1(self):
        chk = lemma_s0_bound(p1_data(6), 6)
        assert chk.holds and chk.value >= 0

    def test_s3_elliptic(self):
        w = ell_f2(64)
        for N in range(1, 13):
            chk = lemma_s3_bound(w, N)
            assert chk.holds, N
            assert chk.extra["M"] == 64

    def test_s3_needs_counts(self):
        with pytest.raises(InsufficientCounts):
            lemma_s3_bound(ell_f2(10), 10)
        with pytest.raises(InsufficientCounts):
            lemma_s3_bound(ell_f2(12), 8)

    @pytest.mark.parametrize("name", CORPUS)
    def test_audit_on_corpus(self, name):
        res = analyse_curve(load_curve(name), 80, brute_max=3)
        w = WeilData.from_zeta(res.zeta, 80)
        for N in range(2, 11):
            assert all(c.holds for c in audit(w, N, res.phi)), (name, N)

    def test_phi_upper_bound(self):
        assert phi_upper_bound(ell_f2(), 1) == pytest.approx(2 + 1 + 4 * math.sqrt(2))
        w = ell_f2(30)
        phi = w.closed_points(strict=True)
        assert all(phi[f] <= phi_upper_bound(w, f) for f in range(1, 31))


class TestResidue:
    def test_p1(self):
        est = residue_from_counts(p1_data(40))
        assert est.kappa_log_r == pytest.approx(2.0, abs=1e-11)
        assert est.kappa == pytest.approx(2 / math.log(2), abs=1e-11)

    def test_p2_like(self):
        # log(kappa log r) = -log(1 - 1/4) - log(1 - 1/2), so kappa log r = 8/3
        w = WeilData.from_angles(2, 2, [[2, 0, 1]], 30)
        est = residue_from_counts(w)
        assert abs(est.kappa_log_r - 8 / 3) <= est.kappa_log_r_tail + 1e-15

    def test_elliptic_within_tail(self):
        est = residue_from_counts(ell_f2(64), 12)
        assert abs(est.kappa_log_r - 3) <= est.kappa_log_r_tail
        est = residue_from_counts(ell_f2(64), 64)
        assert est.kappa_log_r == pytest.approx(3, abs=1e-9)

    def test_tolerance(self):
        with pytest.raises(InsufficientCounts):
            residue_from_counts(ell_f2(64), 2)
        with pytest.raises(InsufficientCounts):
            residue_from_counts(ell_f2(10), 11)

    def test_tail_bound_dominates(self):
        w = ell_f2(80)
        for M in (4, 10, 20):
            rest = sum(abs(w.middle_trace(n)) / (n * 2**n) for n in range(M + 1, 81))
            assert rest <= middle_tail_bound(w, M)


class TestVarietyMertens:
    def test_p1_n8(self):
        rep = variety_mertens(p1_data(8), 8, kappa_log_r=2.0)
        assert rep.main_term == pytest.approx(math.log(8) + euler_gamma() + math.log(2))
        assert abs(rep.error) < 0.2
        assert rep.error_times_n == pytest.approx(8 * rep.error)

    def test_error_decays_like_one_over_n(self):
        w = ell_f2(64)
        errs = [abs(variety_mertens(w, N, kappa_log_r=3.0).error) * N for N in (8, 16, 32, 64)]
        assert max(errs) < 1.0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.sampled_from([2, 3, 4, 5, 9]), st.integers(0, 2**32 - 1))
def test_random_weil_data(d, r, seed):
    w = random_weil_data(d, r, random.Random(seed), M=14)
    assert w.betti == tuple(reversed(w.betti)) and w.betti[0] == 1
    for N in range(1, 15):
        split = s_terms(w, N, w.closed_points(strict=False))
        assert split.identity_exact
    phi = w.closed_points(strict=False)
    assert lemma_s2_bound(w, 6).holds
    if all(v >= 0 for v in phi.values()):
        assert lemma_s0_bound(w, 6, phi).holds
