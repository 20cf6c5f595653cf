"""SUJO query AST, parser, and the static analyses over it.

Grammar (prefix form):

    query   := atomPat
             | "SELECT{" varlist "}(" query ")"
             | "UNION(" query "," query ")"
             | "JOIN(" query "," query ")"
             | "OPT(" query "," query ")"
    atomPat := Name "(" term ")" | Name "(" term "," term ")"
    term    := "?"var | individual

SELECT, UNION, JOIN and OPT are reserved and cannot be used as predicates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from .errors import ParseError, QueryShapeError
from .kb import INDIVIDUAL_RE, NAME_RE, Term, Var, individual

VarSet = frozenset[Var]
VarSetFamily = frozenset[VarSet]

_KEYWORDS = {"SELECT", "UNION", "JOIN", "OPT"}


@dataclass(frozen=True)
class TriplePattern:
    predicate: str
    args: tuple[Union[Var, Term], ...]

    def __post_init__(self):
        if len(self.args) not in (1, 2):
            raise ValueError(f"pattern arity must be 1 or 2, got {len(self.args)}")


@dataclass(frozen=True)
class Select:
    vars: VarSet
    body: "Query"

    def __post_init__(self):
        if not self.vars <= query_vars(self.body):
            extra = {str(v) for v in self.vars - query_vars(self.body)}
            raise ValueError(f"SELECT projects variables not in body: {sorted(extra)}")


@dataclass(frozen=True)
class UnionQ:
    left: "Query"
    right: "Query"


@dataclass(frozen=True)
class JoinQ:
    left: "Query"
    right: "Query"


@dataclass(frozen=True)
class OptQ:
    left: "Query"
    right: "Query"


Query = Union[TriplePattern, Select, UnionQ, JoinQ, OptQ]


def query_vars(q: Query) -> VarSet:
    """Variables projected by a query."""
    if isinstance(q, TriplePattern):
        return frozenset(a for a in q.args if isinstance(a, Var))
    if isinstance(q, Select):
        return q.vars
    return query_vars(q.left) | query_vars(q.right)


def triple_pattern_count(q: Query) -> int:
    if isinstance(q, TriplePattern):
        return 1
    if isinstance(q, Select):
        return triple_pattern_count(q.body)
    return triple_pattern_count(q.left) + triple_pattern_count(q.right)


def is_jo(q: Query) -> bool:
    """True iff q uses only triple patterns, JOIN and OPT."""
    if isinstance(q, TriplePattern):
        return True
    if isinstance(q, (JoinQ, OptQ)):
        return is_jo(q.left) and is_jo(q.right)
    return False


def is_union_free(q: Query) -> bool:
    if isinstance(q, TriplePattern):
        return True
    if isinstance(q, Select):
        return is_union_free(q.body)
    if isinstance(q, UnionQ):
        return False
    return is_union_free(q.left) and is_union_free(q.right)


@lru_cache(maxsize=None)
def adm(q: Query) -> VarSetFamily:
    """Family of admissible bound-variable sets (relaxed, inductive)."""
    if isinstance(q, TriplePattern):
        return frozenset({query_vars(q)})
    if isinstance(q, Select):
        return frozenset(x & q.vars for x in adm(q.body))
    if isinstance(q, JoinQ):
        return frozenset(x1 | x2 for x1 in adm(q.left) for x2 in adm(q.right))
    if isinstance(q, OptQ):
        return adm(q.left) | adm(JoinQ(q.left, q.right))
    return adm(q.left) | adm(q.right)


@lru_cache(maxsize=None)
def branch(q: Query) -> frozenset[Query]:
    """The UNION-free queries obtained by picking one operand of each UNION."""
    if isinstance(q, TriplePattern):
        return frozenset({q})
    if isinstance(q, Select):
        # A branch of the body may lack some projected variables (they came
        # from another UNION operand); dropping them from the projection set
        # is a no-op, since no mapping of the branch can bind them.
        return frozenset(
            Select(q.vars & query_vars(b), b) for b in branch(q.body)
        )
    if isinstance(q, UnionQ):
        return branch(q.left) | branch(q.right)
    ctor = JoinQ if isinstance(q, JoinQ) else OptQ
    return frozenset(
        ctor(b1, b2) for b1 in branch(q.left) for b2 in branch(q.right)
    )


def _min_sets(family: frozenset[VarSet]) -> frozenset[VarSet]:
    return frozenset(
        x for x in family if not any(y < x for y in family)
    )


def _max_sets(family: frozenset[VarSet]) -> frozenset[VarSet]:
    return frozenset(
        x for x in family if not any(x < y for y in family)
    )


@lru_cache(maxsize=None)
def base(q: Query) -> VarSetFamily:
    """Linear-size generating family whose nonempty unions produce adm(q).

    Defined for JOIN/OPT queries only.
    """
    if isinstance(q, TriplePattern):
        return frozenset({query_vars(q)})
    if isinstance(q, JoinQ):
        b1, b2 = base(q.left), base(q.right)
        m1, m2 = _min_sets(b1), _min_sets(b2)
        return frozenset(x | y for x in m1 for y in b2) | frozenset(
            x | y for x in b1 for y in m2
        )
    if isinstance(q, OptQ):
        return base(q.left) | base(JoinQ(q.left, q.right))
    raise QueryShapeError("base(q) is defined for JOIN/OPT queries only")


def min_base(q: Query) -> VarSet:
    """The unique ⊆-minimum of base(q)."""
    mins = _min_sets(base(q))
    assert len(mins) == 1, f"base minimum not unique: {mins}"
    return next(iter(mins))


def is_admissible(q: Query, x: VarSet) -> bool:
    """Decide x ∈ adm(q) for a JO query via its base family.

    x is admissible iff it is a union of a nonempty subfamily of base(q):
    the minimum base element must be contained in x, and the base elements
    inside x must cover it.
    """
    x = frozenset(x)
    if not min_base(q) <= x:
        return False
    covered: set[Var] = set()
    for b in base(q):
        if b <= x:
            covered.update(b)
    return x <= covered


def max_admissible_subsets(q: Query, x2: VarSet) -> VarSetFamily:
    """max_⊆(adm(q) ∩ 2^x2) for a JO query.

    adm(q) ∩ 2^x2 is closed under union, so the result is empty or a
    singleton: the union of all base elements contained in x2.
    """
    x2 = frozenset(x2)
    if not min_base(q) <= x2:
        return frozenset()
    top: set[Var] = set()
    for b in base(q):
        if b <= x2:
            top.update(b)
    return frozenset({frozenset(top)})


# --- parsing / serialization ------------------------------------------------

_Q_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r]+)
      | (?P<nl>\n)
      | (?P<name>[A-Za-z0-9_]+)
      | (?P<punct>[(){},?])
    """,
    re.VERBOSE,
)


class _QTokens:
    def __init__(self, text: str):
        self.tokens: list[tuple[str, str, int, int]] = []
        line, col, pos = 1, 1, 0
        while pos < len(text):
            m = _Q_TOKEN_RE.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", line, col)
            if m.lastgroup == "nl":
                line += 1
                col = 1
            else:
                if m.lastgroup != "ws":
                    self.tokens.append((m.lastgroup, m.group(), line, col))
                col += len(m.group())
            pos = m.end()
        self.index = 0

    def peek(self):
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def next(self, expected: str | None = None):
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else (None, "", 1, 1)
            raise ParseError("unexpected end of input", last[2], last[3])
        if expected is not None and tok[1] != expected:
            raise ParseError(f"expected {expected!r}, found {tok[1]!r}", tok[2], tok[3])
        self.index += 1
        return tok

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[1] == value


def _parse_term(toks: _QTokens) -> Union[Var, Term]:
    if toks.at("?"):
        toks.next()
        kind, value, line, col = toks.next()
        if kind != "name" or not NAME_RE.match(value):
            raise ParseError(f"expected variable name, found {value!r}", line, col)
        return Var(value)
    kind, value, line, col = toks.next()
    if kind != "name" or not INDIVIDUAL_RE.match(value):
        raise ParseError(f"expected individual, found {value!r}", line, col)
    return individual(value)


def _parse_query(toks: _QTokens) -> Query:
    kind, value, line, col = toks.next()
    if kind != "name":
        raise ParseError(f"expected query, found {value!r}", line, col)
    if value == "SELECT":
        toks.next("{")
        var_names = []
        while not toks.at("}"):
            k, v, ln, c = toks.next()
            if k != "name" or not NAME_RE.match(v):
                raise ParseError(f"expected variable name, found {v!r}", ln, c)
            var_names.append(v)
            if toks.at(","):
                toks.next()
        toks.next("}")
        toks.next("(")
        body = _parse_query(toks)
        toks.next(")")
        try:
            return Select(frozenset(Var(v) for v in var_names), body)
        except ValueError as exc:
            raise ParseError(str(exc), line, col) from exc
    if value in ("UNION", "JOIN", "OPT"):
        toks.next("(")
        left = _parse_query(toks)
        toks.next(",")
        right = _parse_query(toks)
        toks.next(")")
        ctor = {"UNION": UnionQ, "JOIN": JoinQ, "OPT": OptQ}[value]
        return ctor(left, right)
    if not NAME_RE.match(value):
        raise ParseError(f"invalid predicate name {value!r}", line, col)
    toks.next("(")
    args = [_parse_term(toks)]
    if toks.at(","):
        toks.next()
        args.append(_parse_term(toks))
    toks.next(")")
    return TriplePattern(value, tuple(args))


def parse_query(text: str) -> Query:
    toks = _QTokens(text)
    q = _parse_query(toks)
    tok = toks.peek()
    if tok is not None:
        raise ParseError(f"trailing input: {tok[1]!r}", tok[2], tok[3])
    return q


def serialize_query(q: Query) -> str:
    if isinstance(q, TriplePattern):
        args = ", ".join(str(a) for a in q.args)
        return f"{q.predicate}({args})"
    if isinstance(q, Select):
        names = ", ".join(sorted(v.name for v in q.vars))
        return f"SELECT{{{names}}}( {serialize_query(q.body)} )"
    op = {UnionQ: "UNION", JoinQ: "JOIN", OptQ: "OPT"}[type(q)]
    return f"{op}( {serialize_query(q.left)}, {serialize_query(q.right)} )"


def format_var_set(x: VarSet) -> str:
    return "{" + ",".join(sorted(v.name for v in x)) + "}"


def format_family(family: VarSetFamily) -> str:
    parts = sorted(
        family, key=lambda s: tuple(sorted(v.name for v in s))
    )
    return "{" + ",".join(format_var_set(x) for x in parts) + "}"
