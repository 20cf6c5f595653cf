"""Requirement checks, brute-force oracles, generator, and differential runs."""

from itertools import islice

import pytest

from conftest import load_kb, load_query, m
from sparqlkb.errors import SparqlKbError
from sparqlkb.graph import Graph
from sparqlkb.harness import (
    SizeParams,
    brute_force_adm,
    brute_force_cq_matches,
    check_requirement,
    describe_instance,
    differential,
    generate_instances,
)
from sparqlkb.kb import Var, parse_kb, serialize_kb
from sparqlkb.query import (
    JoinQ,
    OptQ,
    TriplePattern,
    adm,
    parse_query,
    serialize_query,
)
from sparqlkb.semantics import is_ucq_shape

X, Y = Var("x"), Var("y")


class TestCheckRequirement:
    def test_invalid_requirement_id(self):
        with pytest.raises(ValueError):
            check_requirement(6, "mcan", load_query("ex1.sq"), load_kb("ex1.kb"))

    def test_certain_answer_compliance_pass_and_fail(self):
        kb, q = load_kb("ex1.kb"), load_query("ex5.sq")
        assert check_requirement(1, "mcan", q, kb).verdict == "pass"
        report = check_requirement(1, "regime", q, kb)
        assert report.verdict == "fail"
        assert report.counterexamples == (m(x="Alice"),)

    def test_certain_answer_check_skips_non_ucqs(self):
        kb, q = load_kb("ex1.kb"), load_query("ex6.sq")
        assert check_requirement(1, "mcan", q, kb).verdict == "not-applicable"

    def test_plain_compliance_needs_an_empty_tbox(self):
        kb, q = load_kb("ex2.kb"), load_query("ex2.sq")
        assert check_requirement(2, "mcan", q, kb).verdict == "pass"
        assert (
            check_requirement(2, "mcan", q, load_kb("ex1.kb")).verdict
            == "not-applicable"
        )

    def test_optional_extension_fails_for_canonical(self):
        kb, q = load_kb("ex1.kb"), load_query("ex6.sq")
        report = check_requirement(3, "canonical", q, kb)
        assert report.verdict == "fail"
        assert report.counterexamples == (m(x="Alice"),)
        assert check_requirement(3, "mcan", q, kb).verdict == "pass"

    def test_variable_binding_fails_for_restricted(self):
        kb, q = load_kb("ex7.kb"), load_query("ex7.sq")
        report = check_requirement(4, "restricted", q, kb)
        assert report.verdict == "fail"
        assert report.counterexamples == (m(x="Alice", z="Alice"),)
        assert check_requirement(4, "mcan", q, kb).verdict == "pass"

    def test_provenance_needs_a_union(self):
        kb, q = load_kb("ex1.kb"), load_query("ex6.sq")
        assert check_requirement(5, "mcan", q, kb).verdict == "not-applicable"
        union_q = parse_query("UNION( Driver(?x), hasLicense(?x, ?y) )")
        assert check_requirement(5, "mcan", union_q, kb).verdict == "pass"

    def test_shape_limited_semantics_report_not_applicable(self):
        kb, q = load_kb("ex1.kb"), load_query("ex6.sq")
        assert (
            check_requirement(4, "certain-ucq", q, kb).verdict == "not-applicable"
        )

    def test_report_serialization(self):
        kb, q = load_kb("ex7.kb"), load_query("ex7.sq")
        d = check_requirement(4, "restricted", q, kb, instance="ex7").to_dict()
        assert d["verdict"] == "fail"
        assert d["instance"] == "ex7"
        assert d["counterexamples"] == [{"?x": "Alice", "?z": "Alice"}]


class TestBruteForceAdm:
    def test_agrees_with_inductive_adm_on_fixtures(self):
        for name in ("ex1.sq", "ex2.sq", "ex3.sq", "ex5.sq", "ex6.sq", "ex7.sq"):
            q = load_query(name)
            assert brute_force_adm(q) == adm(q), name

    def test_rejects_oversized_queries(self):
        q = TriplePattern("r", (X, Y))
        for i in range(6):
            q = JoinQ(q, TriplePattern("r", (Var(f"a{i}"), Var(f"b{i}"))))
        with pytest.raises(SparqlKbError):
            brute_force_adm(q, var_limit=10)


class TestBruteForceCqMatches:
    def test_projection_and_join(self):
        kb = load_kb("ex3.kb")
        q = parse_query("SELECT{x}( JOIN( teachesTo(?x, ?y), knows(?y, ?z) ) )")
        assert brute_force_cq_matches(q, Graph(kb.abox)) == frozenset({m(x="Alice")})

    def test_rejects_optional(self):
        from sparqlkb.errors import QueryShapeError

        with pytest.raises(QueryShapeError):
            brute_force_cq_matches(load_query("ex2.sq"), Graph(frozenset()))


class TestGenerator:
    def test_deterministic_per_seed(self):
        a = list(islice(generate_instances(5, SizeParams()), 25))
        b = list(islice(generate_instances(5, SizeParams()), 25))
        assert a == b

    def test_different_seeds_differ(self):
        a = list(islice(generate_instances(5, SizeParams()), 25))
        b = list(islice(generate_instances(6, SizeParams()), 25))
        assert a != b

    def test_instances_round_trip_and_are_satisfiable(self):
        from sparqlkb.chase import is_satisfiable

        for kb, q in islice(generate_instances(13, SizeParams()), 40):
            assert parse_kb(serialize_kb(kb)) == kb
            assert parse_query(serialize_query(q)) == q
            assert is_satisfiable(kb)

    def test_jo_mode_emits_only_join_opt_queries(self):
        from sparqlkb.query import is_jo

        for _, q in islice(generate_instances(17, SizeParams(), jo_only=True), 40):
            assert is_jo(q)

    def test_stream_contains_ucq_shapes(self):
        shapes = [
            is_ucq_shape(q)
            for _, q in islice(generate_instances(19, SizeParams()), 80)
        ]
        assert any(shapes) and not all(shapes)


class TestDifferential:
    def test_all_semantics_agree_on_complete_data(self):
        kb = parse_kb("TBOX: ABOX: Driver(Alice) . hasLicense(Alice, L1) .")
        q = load_query("ex1.sq")
        report = differential(q, kb)
        values = set(report.answers.values())
        assert values == {frozenset({m(x="Alice")})}
        assert set(report.relations.values()) == {"="}

    def test_restricted_extends_canonical_on_incomplete_data(self):
        report = differential(load_query("ex6.sq"), load_kb("ex1.kb"))
        assert report.answers["canonical"] == frozenset()
        assert report.relations[("canonical", "restricted")] == "subset"
        assert report.relations[("restricted", "mcan")] in ("=", "extends-into", "extended-by")

    def test_describe_mentions_sizes(self):
        desc = describe_instance(load_kb("ex1.kb"), load_query("ex1.sq"))
        assert "1ax" in desc and "1facts" in desc
