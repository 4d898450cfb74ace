import json

import pytest

from liefields import algebra as A, algfile, catalog as CAT, invariants as I
from liefields import fields as F


@pytest.fixture(scope="module")
def entries():
    return CAT.builtin_entries()


class TestBuiltinEntries:
    def test_at_least_24_entries(self, entries):
        assert len(entries) >= 24

    def test_all_presentations_parse_and_are_independent(self, entries):
        for entry in entries:
            L = entry.presentation()
            L.validate()

    def test_table_group_one_has_six_generators(self, entries):
        entry = CAT.entry_by_id("thm37-1")
        assert len(entry.generators) == 6

    def test_monodromy_flags(self):
        assert CAT.entry_by_id("ex94-24").expected.monodromy is True
        assert CAT.entry_by_id("ex94-24r").expected.monodromy is False

    def test_eleven_table_groups_with_pair_invariants(self, entries):
        table = [e for e in entries if e.id.startswith("thm37-")]
        assert len(table) == 11
        for e in table:
            assert e.expected.pair_invariant_count == 1
            assert e.expected.essential_3pt is False
            assert e.invariants

    def test_published_invariants_attached_where_expected(self):
        for eid in ("thm37-1", "thm37-3", "thm37-8", "thm37-9", "thm37-10",
                    "thm37-11", "thm37-6", "ex89-58", "ex90-60a", "ex90-62a"):
            assert CAT.entry_by_id(eid).invariants, eid

    def test_ids_unique_and_sorted_export(self, entries):
        ids = [e.id for e in entries]
        assert len(set(ids)) == len(ids)


class TestPublishedInvariantsProven:
    def test_every_published_invariant_proves_symbolically(self, entries):
        for entry in entries:
            if not entry.invariants:
                continue
            L = entry.presentation()
            for J in entry.parsed_invariants():
                for pv in entry.param_value_maps():
                    out = I.verify_joint_invariant(L, J, mode="symbolic",
                                                   param_values=pv or None)
                    assert out.verdict is I.Verdict.PROVEN, (entry.id, pv)


class TestVerifyEntry:
    def test_thm37_1_all_checks_pass(self):
        report = CAT.verify_entry(CAT.entry_by_id("thm37-1"), seed=1)
        assert report.passed, CAT.export_report([report])

    def test_ex94_22_profile(self):
        report = CAT.verify_entry(CAT.entry_by_id("ex94-22"), seed=1)
        assert report.passed, CAT.export_report([report])
        names = {c.name: c for c in report.checks}
        assert names["pair_invariant_count"].observed == 0
        assert names["infinitesimal_invariant"].observed is True
        assert names["published_infinitesimal"].observed is True

    def test_ex87_28_excluded_by_criterion(self):
        report = CAT.verify_entry(CAT.entry_by_id("ex87-28"), seed=2)
        assert report.passed, CAT.export_report([report])
        names = {c.name: c for c in report.checks}
        assert names["two_point_criterion"].observed is False

    def test_ex87_51_boundary_behaviour(self):
        report = CAT.verify_entry(CAT.entry_by_id("ex87-51"), seed=2)
        assert report.passed, CAT.export_report([report])
        names = {c.name: c for c in report.checks}
        assert names["two_point_criterion@c=0"].observed is True
        generic = [c for n, c in names.items()
                   if n.startswith("two_point_criterion@") and n != "two_point_criterion@c=0"]
        assert generic and all(c.observed is False for c in generic)

    def test_failures_recorded_not_raised(self):
        entry = CAT.entry_by_id("thm37-1")
        broken = CAT.CatalogEntry(
            id=entry.id, source=entry.source, vars=entry.vars, params=entry.params,
            generators=entry.generators,
            expected=CAT.Expected(pair_invariant_count=7),
        )
        report = CAT.verify_entry(broken, seed=0,
                                  checks=("closure", "pair_invariant_count"))
        assert not report.passed
        assert any(c.status == "fail" for c in report.checks)


class TestReducedGroupTable:
    @pytest.mark.parametrize("family,reduced", [
        ("ex94-21", "ex94-21r"),
        ("ex94-22", "ex94-22r"),
        ("ex94-23", "ex94-23r"),
        ("ex94-24", "ex94-24r"),
    ])
    def test_reduction_reproduces_catalog_entry(self, family, reduced):
        fam = CAT.entry_by_id(family)
        red = CAT.entry_by_id(reduced)
        L = fam.presentation()
        pv = fam.param_value_maps()[0]
        out = A.reduced_algebra(L, F.Point((0, 0, 0)), param_values=pv or None)
        expected = red.presentation()
        expected_fields = list(expected.generators)
        if pv:
            from liefields import expr as E
            expected_fields = [
                F.VectorField(3, tuple(E.substitute_params(c, pv) for c in X.coeffs))
                for X in expected_fields
            ]
        assert F.span_equal(list(out.generators), expected_fields)


class TestReportExport:
    def test_empty_report(self):
        assert CAT.export_report([], format="json") == "[]"
        assert CAT.export_report([], format="text") == ""

    def test_single_pass_record(self):
        report = CAT.verify_entry(CAT.entry_by_id("thm37-1"), seed=0, checks=("closure",))
        doc = json.loads(CAT.export_report([report], format="json"))
        assert doc[0]["entry"] == "thm37-1"
        assert doc[0]["seed"] == 0
        assert doc[0]["checks"][0]["status"] == "pass"
        assert set(doc[0]["checks"][0]) == {"name", "expected", "observed",
                                            "status", "diagnostics"}

    def test_full_run_records_seeds(self):
        reports = CAT.verify_catalog(seed=5, checks=("closure",))
        doc = json.loads(CAT.export_report(reports, format="json"))
        assert len(doc) >= 24
        assert all(rec["seed"] == 5 for rec in doc)
        ids = [rec["entry"] for rec in doc]
        assert ids == sorted(ids)


class TestAlgebraFileRoundTrip:
    def test_catalog_round_trips_through_files(self, entries):
        for entry in entries:
            af = algfile.catalog_entry_file(entry)
            text = algfile.format_algebra_file(af)
            again = algfile.parse_algebra_file(text, name=entry.id)
            assert again.vars == af.vars
            assert again.params == af.params
            assert again.presentation().generators == entry.presentation().generators
            assert tuple(again.invariant_literals) == tuple(af.invariant_literals)
            assert again.expectations == af.expectations

    def test_parse_errors(self):
        with pytest.raises(algfile.AlgebraFileError):
            algfile.parse_algebra_file("field: p\n")  # missing vars
        with pytest.raises(algfile.AlgebraFileError):
            algfile.parse_algebra_file("vars: x y\nnonsense line\n")
        with pytest.raises(algfile.AlgebraFileError):
            algfile.parse_algebra_file("vars: x y\nwidget: p\n")

    def test_shipped_fixture_files_match_builtin_data(self, entries):
        import pathlib
        base = pathlib.Path(__file__).resolve().parent.parent / "data" / "algebras"
        for entry in entries:
            path = base / f"{entry.id}.alg"
            assert path.exists(), path
            af = algfile.load_algebra_file(str(path))
            assert af.presentation().generators == entry.presentation().generators, entry.id
