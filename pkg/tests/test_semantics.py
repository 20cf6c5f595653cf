"""The six semantics on the worked examples and their structural relations."""

from itertools import islice

import pytest

from conftest import load_kb, load_query, m, ms
from sparqlkb.errors import QueryShapeError
from sparqlkb.harness import SizeParams, generate_instances
from sparqlkb.kb import Var
from sparqlkb.query import JoinQ, Select, TriplePattern, UnionQ, adm, parse_query
from sparqlkb.semantics import (
    SEMANTICS,
    can_ans,
    cert_ans_ucq,
    er_ans,
    is_ucq_shape,
    m_can_ans,
    m_can_ans_sjo,
    plain_ans,
    rest_can_ans,
)

X, Y = Var("x"), Var("y")


class TestUcqShape:
    def test_select_over_join_tree(self):
        assert is_ucq_shape(load_query("ex5.sq"))
        assert is_ucq_shape(load_query("ex1.sq"))
        assert is_ucq_shape(parse_query("Driver(?x)"))

    def test_union_of_cqs_with_shared_vars(self):
        q = UnionQ(
            Select(frozenset({X}), TriplePattern("A", (X,))),
            Select(frozenset({X}), TriplePattern("B", (X,))),
        )
        assert is_ucq_shape(q)

    def test_mismatched_distinguished_vars_rejected(self):
        q = UnionQ(TriplePattern("A", (X,)), TriplePattern("r", (X, Y)))
        assert not is_ucq_shape(q)

    def test_opt_is_not_a_cq(self):
        assert not is_ucq_shape(load_query("ex2.sq"))


class TestWorkedExamples:
    """Exact answer sets for the running driver/teacher scenarios."""

    def test_incomplete_data_splits_the_semantics(self):
        kb, q = load_kb("ex1.kb"), load_query("ex1.sq")
        assert plain_ans(q, kb) == frozenset()
        assert cert_ans_ucq(q, kb) == ms(m(x="Alice"))
        assert er_ans(q, kb) == frozenset()
        assert can_ans(q, kb) == ms(m(x="Alice"))
        assert rest_can_ans(q, kb) == ms(m(x="Alice"))
        assert m_can_ans(q, kb) == ms(m(x="Alice"))

    def test_optional_over_plain_data(self):
        q = load_query("ex2.sq")
        assert plain_ans(q, load_kb("ex2.kb")) == ms(m(x="Alice"))
        assert plain_ans(q, load_kb("ex2i.kb")) == ms(m(x="Alice", y="12345"))

    def test_projection_after_optional(self):
        kb, q = load_kb("ex3.kb"), load_query("ex3.sq")
        expected = ms(m(x="Alice", z="Carol"), m(x="Alice"))
        assert plain_ans(q, kb) == expected
        assert m_can_ans(q, kb) == expected

    def test_regime_loses_certain_answers_on_joins(self):
        kb, q = load_kb("ex1.kb"), load_query("ex5.sq")
        assert cert_ans_ucq(q, kb) == ms(m(x="Alice"))
        assert er_ans(q, kb) == frozenset()

    def test_canonical_drops_partially_anonymous_rows(self):
        kb, q = load_kb("ex1.kb"), load_query("ex6.sq")
        assert can_ans(q, kb) == frozenset()
        assert can_ans(load_query("ex6b.sq"), kb) == ms(m(x="Alice"))
        assert rest_can_ans(q, kb) == ms(m(x="Alice"))
        assert m_can_ans(q, kb) == ms(m(x="Alice"))

    def test_inverse_role_collapses_restricted_answers(self):
        kb, q = load_kb("ex7.kb"), load_query("ex7.sq")
        assert rest_can_ans(q, kb) == ms(m(x="Alice", z="Alice"))
        assert m_can_ans(q, kb) == ms(m(x="Alice"))


class TestShapeGuards:
    def test_certain_answers_reject_optional(self):
        with pytest.raises(QueryShapeError):
            cert_ans_ucq(load_query("ex2.sq"), load_kb("ex2.kb"))

    def test_union_free_variant_rejects_union(self):
        q = UnionQ(TriplePattern("A", (X,)), TriplePattern("B", (X,)))
        with pytest.raises(QueryShapeError):
            m_can_ans_sjo(q, load_kb("ex2.kb"))

    def test_union_free_variant_agrees_with_the_general_one(self):
        cases = [
            ("ex2.kb", "ex2.sq"),
            ("ex3.kb", "ex3.sq"),
            ("ex1.kb", "ex6.sq"),
            ("ex7.kb", "ex7.sq"),
        ]
        for kb_name, q_name in cases:
            kb, q = load_kb(kb_name), load_query(q_name)
            assert m_can_ans_sjo(q, kb) == m_can_ans(q, kb), (kb_name, q_name)


class TestUnionProvenance:
    def test_branch_answers_union_up(self):
        kb = load_kb("ex2.kb")  # just Person(Alice)
        q = UnionQ(
            TriplePattern("Person", (X,)), TriplePattern("hasLicense", (X, Y))
        )
        assert m_can_ans(q, kb) == ms(m(x="Alice"))

    def test_deduplication_across_branches(self):
        kb = load_kb("ex2.kb")
        q = UnionQ(TriplePattern("Person", (X,)), TriplePattern("Person", (X,)))
        assert m_can_ans(q, kb) == ms(m(x="Alice"))


class TestEmptyTBoxRelations:
    """With no axioms the canonical model is the data itself."""

    INSTANCES = 120

    def _empty_tbox_instances(self):
        stream = generate_instances(31, SizeParams())
        for kb, q in islice(stream, self.INSTANCES):
            yield type(kb)(frozenset(), kb.abox), q

    def test_plain_equals_canonical_family(self):
        for kb, q in self._empty_tbox_instances():
            expected = plain_ans(q, kb)
            assert can_ans(q, kb) == expected
            assert rest_can_ans(q, kb) == expected
            assert er_ans(q, kb) == sparql_regime_reference(q, kb)

    def test_mcan_refines_by_admissibility_only(self):
        for kb, q in self._empty_tbox_instances():
            for w in m_can_ans(q, kb):
                assert w.domain in adm(q)


def sparql_regime_reference(q, kb):
    """With an empty TBox the regime evaluation is plain evaluation."""
    return plain_ans(q, kb)


class TestDepthIndependence:
    def test_deeper_chase_does_not_change_answers(self):
        for kb_name, q_name in (
            ("ex1.kb", "ex1.sq"),
            ("ex1.kb", "ex5.sq"),
            ("ex1.kb", "ex6.sq"),
            ("ex7.kb", "ex7.sq"),
        ):
            kb, q = load_kb(kb_name), load_query(q_name)
            for name, fn in SEMANTICS.items():
                if name in ("plain",):
                    continue
                try:
                    shallow = fn(q, kb)
                except QueryShapeError:
                    continue
                assert shallow == fn(q, kb, depth=12), (kb_name, q_name, name)
