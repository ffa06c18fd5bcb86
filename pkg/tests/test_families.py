from __future__ import annotations

import json
import math

import pytest

from bsmertens.corpus import load_curve
from bsmertens.families import (
    COLUMNS,
    FamilyError,
    FamilyReport,
    FamilySpec,
    phi_limit_estimate,
    scan_curve_family,
    scan_nf_family,
)
from bsmertens.nfmertens import mertens_error
from bsmertens.quadfield import QuadField, place_table
from bsmertens.weilexplicit import WeilData


def curve_spec(names, N):
    return FamilySpec("curve", tuple(load_curve(n) for n in names), (N,) * len(names))


class TestSpec:
    def test_genus_must_not_decrease(self):
        with pytest.raises(FamilyError):
            FamilySpec("nf", (QuadField(-23), QuadField(-4)))
        with pytest.raises(FamilyError):
            FamilySpec("curve", (load_curve("g2_f3"), load_curve("ell_f3")))

    def test_validation(self):
        with pytest.raises(FamilyError):
            FamilySpec("nf", ())
        with pytest.raises(FamilyError):
            FamilySpec("lattice", (QuadField(-4),))
        with pytest.raises(FamilyError):
            FamilySpec("nf", (QuadField(-4),), (10, 20))
        with pytest.raises(FamilyError):
            FamilySpec("nf", (load_curve("ell_f3"),))
        w2 = WeilData.from_angles(2, 2, [[2, 0, 1]], 5)
        with pytest.raises(FamilyError):
            FamilySpec("curve", (load_curve("ell_f3"), w2))

    def test_generators(self):
        fam = FamilySpec.imaginary_quadratic(-24, -3, x=100)
        assert [K.disc for K in fam.members] == [-3, -4, -7, -8, -11, -15, -19, -20, -23, -24]
        assert fam.truncation_for(0) == 100
        assert [K.disc for K in FamilySpec.real_quadratic(2, 13).members] == [5, 8, 12, 13]
        with pytest.raises(FamilyError):
            FamilySpec.imaginary_quadratic(-10, 5)

    def test_default_truncation(self):
        assert FamilySpec("nf", (QuadField(-4),)).truncation_for(0) == 10**6
        assert FamilySpec("curve", (load_curve("ell_f3"),)).truncation_for(0) == 12

    def test_documents(self, tmp_path):
        doc = {"kind": "nf", "generator": {"type": "imaginary_quadratic", "lo": -20, "hi": -1}, "x": 1000}
        fam = FamilySpec.from_document(doc)
        assert [K.disc for K in fam.members] == [-3, -4, -7, -8, -11, -15, -19, -20]
        assert FamilySpec.from_document({"kind": "nf", "members": ["Q", -4, "5"]}).members[2] == QuadField(5)
        (tmp_path / "c.json").write_text(json.dumps(load_curve("g2_f3").to_document()))
        cdoc = {
            "kind": "curve",
            "N": [4, 5, 6],
            "members": ["ell_f2", {"d": 1, "r": 3, "eigen_angles": [[1, 1, 2], [1, 3, 2]], "M": 20}, {"path": "c.json"}],
        }
        cf = FamilySpec.from_document(cdoc, base=tmp_path)
        assert cf.truncation == (4, 5, 6)
        assert isinstance(cf.members[1], WeilData) and cf.members[2] == load_curve("g2_f3")

    def test_bad_documents(self, tmp_path):
        with pytest.raises(FamilyError):
            FamilySpec.from_document({"kind": "nf"})
        with pytest.raises(FamilyError):
            FamilySpec.from_document({"kind": "nf", "members": ["Qi"]})
        with pytest.raises(FamilyError):
            FamilySpec.from_document({"kind": "nf", "generator": {"type": "cubic", "lo": 1, "hi": 2}})
        with pytest.raises(FamilyError):
            FamilySpec.from_document({"kind": "curve", "members": [{"path": "missing.json"}]}, base=tmp_path)
        with pytest.raises(FamilyError):
            FamilySpec.from_document({"kind": "surface"})


class TestNumberFieldScan:
    def test_gaussian_row(self):
        row = scan_nf_family(FamilySpec("nf", (QuadField(-4),), (10**4,))).rows[0]
        assert row.log_kappa_over_g == pytest.approx(math.log(math.pi / 4) / math.log(2), rel=1e-14)
        assert row.log_kappa_over_g == pytest.approx(-0.3485, abs=1e-4)
        assert row.ok and row.n == 2

    def test_one_member_residual_is_scaled_error(self):
        K = QuadField(-23)
        row = scan_nf_family(FamilySpec("nf", (K,), (10**4,))).rows[0]
        rep = mertens_error(K, 10**4)
        assert row.residual == pytest.approx(rep.error / K.genus, rel=1e-14)
        assert row.gap == pytest.approx(row.truncated_sum - row.log_kappa_over_g, rel=1e-14)
        assert row.normalized_residual == pytest.approx(row.residual / row.shape, rel=1e-14)

    def test_status_codes(self):
        fam = FamilySpec("nf", (QuadField.rationals(), QuadField(-4), QuadField(-2003)), (100, 10**5, 100))
        rep = scan_nf_family(fam, sieve_limit=10**4, disc_cap=1000)
        assert [r.status for r in rep.rows] == ["genus-zero", "budget", "budget"]
        assert all(math.isnan(r.gap) for r in rep.rows)
        assert rep.ok_rows() == []

    def test_determinism_and_jobs(self):
        fam = FamilySpec.imaginary_quadratic(-200, -3, x=1000)
        a = scan_nf_family(fam).to_csv()
        assert scan_nf_family(fam).to_csv() == a
        assert scan_nf_family(fam, jobs=2).to_csv() == a

    def test_csv_round_trip(self):
        rep = scan_nf_family(FamilySpec.imaginary_quadratic(-100, -3, x=1000))
        text = rep.to_csv()
        assert text.splitlines()[0] == ",".join(COLUMNS)
        back = FamilyReport.from_csv(text, "nf")
        assert back.to_csv() == text
        for a, b in zip(rep.rows, back.rows):
            assert b.residual == pytest.approx(a.residual, rel=1e-14)

    def test_ibs_sanity(self):
        rep = scan_nf_family(FamilySpec.imaginary_quadratic(-2000, -3, x=1000))
        assert all(rep.ibs_sanity())

    def test_kind_mismatch(self):
        with pytest.raises(FamilyError):
            scan_nf_family(curve_spec(["ell_f3"], 4))
        with pytest.raises(FamilyError):
            scan_curve_family(FamilySpec("nf", (QuadField(-4),)))


class TestCurveScan:
    def test_corpus_family(self):
        rep = scan_curve_family(curve_spec(["p1_f2", "ell_f3", "g2_f3", "g3_f5"], 8))
        assert all(r.ok for r in rep.rows)
        p1 = rep.rows[0]
        assert abs(p1.residual) <= 0.2
        assert p1.log_kappa_over_g == pytest.approx(math.log(2 / math.log(2)), rel=1e-12)
        for r in rep.rows:
            assert r.normalized_residual == pytest.approx(r.residual / r.shape)
            assert abs(r.normalized_residual) < 10

    def test_single_term(self):
        row = scan_curve_family(curve_spec(["ell_f3"], 1)).rows[0]
        # one closed point degree: Phi_3 = N_1 = 7
        assert row.truncated_sum == pytest.approx(7 * math.log(3 / 2), rel=1e-14)

    def test_weil_member_and_short_counts(self):
        short = WeilData(1, 2, (1, 2, 1), (3, 9, 9), "short")
        rep = scan_curve_family(FamilySpec("curve", (load_curve("ell_f2"), short), (4, 8)))
        assert rep.rows[0].ok
        assert rep.rows[1].status == "insufficient-counts"

    def test_budget_status(self):
        rep = scan_curve_family(curve_spec(["g3_f5"], 4), budget={"hyperelliptic": 100})
        assert rep.rows[0].status == "budget"

    def test_determinism(self):
        spec = curve_spec(["p1_f2", "ell_f2", "g2_f3"], 6)
        assert scan_curve_family(spec).to_csv() == scan_curve_family(spec).to_csv()


class TestPhiSequence:
    def test_nf(self):
        fam = FamilySpec.imaginary_quadratic(-40, -3)
        seq = phi_limit_estimate(fam, 5)
        expected = tuple(place_table(K, 5)[5] / K.genus for K in fam.members)
        assert seq.values == expected
        assert seq.tail_spread >= 0

    def test_curve(self):
        spec = FamilySpec("curve", (load_curve("p1_f2"), load_curve("ell_f2"), load_curve("ell_f3")))
        seq = phi_limit_estimate(spec, 4)
        # degree-2 points: P^1/F_2 has 1, ell_f2 has (9 - 3) / 2 = 3; 4 is not a power of 3
        assert seq.values == (1.0, 3.0, 0.0)

    def test_empty_spread(self):
        from bsmertens.families import PhiSequence

        assert math.isnan(PhiSequence(2, ()).tail_spread)
