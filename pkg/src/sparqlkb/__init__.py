"""Query answering over DL-Lite_R knowledge bases under comparable semantics."""

from .kb import KnowledgeBase, parse_kb, serialize_kb, active_domain
from .query import parse_query, serialize_query
from .semantics import (
    SEMANTICS,
    plain_ans,
    cert_ans_ucq,
    er_ans,
    can_ans,
    rest_can_ans,
    m_can_ans,
    m_can_ans_sjo,
)

__all__ = [
    "KnowledgeBase",
    "parse_kb",
    "serialize_kb",
    "active_domain",
    "parse_query",
    "serialize_query",
    "SEMANTICS",
    "plain_ans",
    "cert_ans_ucq",
    "er_ans",
    "can_ans",
    "rest_can_ans",
    "m_can_ans",
    "m_can_ans_sjo",
]
