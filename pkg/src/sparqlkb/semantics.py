"""The six answer semantics, each a pure function of (query, KB)."""

from __future__ import annotations

from .chase import chase, default_bound
from .errors import QueryShapeError
from .graph import Graph, sparql_ans, sparql_ans_branch
from .kb import KnowledgeBase, active_domain
from .mappings import MappingSet, join, diff, project, otimes, restrict_filter, restrict_project
from .query import (
    JoinQ,
    OptQ,
    Query,
    Select,
    TriplePattern,
    UnionQ,
    adm,
    branch,
    is_union_free,
    query_vars,
)


def _bound(kb: KnowledgeBase, q: Query, depth: int | None) -> int:
    return default_bound(kb, q) if depth is None else depth


def abox_graph(kb: KnowledgeBase) -> Graph:
    return Graph(kb.abox)


def plain_ans(q: Query, kb: KnowledgeBase, depth: int | None = None) -> MappingSet:
    """SPARQL answers over the ABox viewed as a plain graph; TBox ignored."""
    return sparql_ans(q, abox_graph(kb))


def _cq_join_tree(q: Query) -> bool:
    if isinstance(q, TriplePattern):
        return True
    return isinstance(q, JoinQ) and _cq_join_tree(q.left) and _cq_join_tree(q.right)


def is_ucq_shape(q: Query) -> bool:
    """UNION of CQs (SELECT over a JOIN tree of triple patterns) sharing
    the same distinguished variables."""
    cqs = []
    stack = [q]
    while stack:
        node = stack.pop()
        if isinstance(node, UnionQ):
            stack.extend((node.left, node.right))
        else:
            cqs.append(node)
    seen_vars = set()
    for cq in cqs:
        if isinstance(cq, Select):
            if not _cq_join_tree(cq.body):
                return False
        elif not _cq_join_tree(cq):
            return False
        seen_vars.add(query_vars(cq))
    return len(seen_vars) == 1


def cert_ans_ucq(q: Query, kb: KnowledgeBase, depth: int | None = None) -> MappingSet:
    """Certain answers, via the canonical-model characterization; UCQs only."""
    if not is_ucq_shape(q):
        raise QueryShapeError("certain-answer semantics requires a UCQ-shaped query")
    cg = chase(kb, _bound(kb, q, depth))
    return restrict_filter(sparql_ans(q, cg.graph), active_domain(kb))


def er_ans(q: Query, kb: KnowledgeBase, depth: int | None = None) -> MappingSet:
    """Entailment-regime answers: certain answers at triple patterns, then
    the standard operator algebra."""
    cg = chase(kb, _bound(kb, q, depth))
    adom = active_domain(kb)

    def rec(node: Query) -> MappingSet:
        if isinstance(node, TriplePattern):
            return restrict_filter(sparql_ans(node, cg.graph), adom)
        if isinstance(node, UnionQ):
            return rec(node.left) | rec(node.right)
        if isinstance(node, JoinQ):
            return join(rec(node.left), rec(node.right))
        if isinstance(node, OptQ):
            left, right = rec(node.left), rec(node.right)
            return join(left, right) | diff(left, right)
        return project(rec(node.body), node.vars)

    return rec(q)


def can_ans(q: Query, kb: KnowledgeBase, depth: int | None = None) -> MappingSet:
    """Answers over the canonical model, filtered to the active domain."""
    cg = chase(kb, _bound(kb, q, depth))
    return restrict_filter(sparql_ans(q, cg.graph), active_domain(kb))


def rest_can_ans(q: Query, kb: KnowledgeBase, depth: int | None = None) -> MappingSet:
    """Answers over the canonical model, each projected onto its
    active-domain-valued bindings."""
    cg = chase(kb, _bound(kb, q, depth))
    return restrict_project(sparql_ans(q, cg.graph), active_domain(kb))


def m_can_ans_sjo(q: Query, kb: KnowledgeBase, depth: int | None = None) -> MappingSet:
    """Maximal admissible canonical answers for UNION-free queries."""
    if not is_union_free(q):
        raise QueryShapeError("SJO semantics requires a UNION-free query")
    return otimes(rest_can_ans(q, kb, depth), adm(q))


def m_can_ans(q: Query, kb: KnowledgeBase, depth: int | None = None) -> MappingSet:
    """Maximal admissible canonical answers, per branch, for SUJO queries."""
    cg = chase(kb, _bound(kb, q, depth))
    adom = active_domain(kb)
    out: set = set()
    for qb in sorted(branch(q), key=lambda b: repr(b)):
        restricted = restrict_project(sparql_ans_branch(q, cg.graph, qb), adom)
        out.update(otimes(restricted, adm(qb)))
    return frozenset(out)


SEMANTICS = {
    "plain": plain_ans,
    "certain-ucq": cert_ans_ucq,
    "regime": er_ans,
    "canonical": can_ans,
    "restricted": rest_can_ans,
    "mcan": m_can_ans,
}
