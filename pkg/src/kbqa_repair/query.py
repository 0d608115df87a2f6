"""Query dialects and the canonical query AST.

Two surface dialects (a SPARQL subset and s-expressions) parse into one
canonical form so that verification, execution and scoring never care which
dialect a logical form arrived in.  A logical form may also be the ``NK``
sentinel, meaning "no valid query exists for this KB".
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

TYPE_ASSERT_ID = "type.object.type"

LITERAL_DATATYPES = ("integer", "float", "string", "date")

COMPARATORS = ("=", "!=", "<", "<=", ">", ">=")

_SEXPR_COMPARATORS = {"lt": "<", "le": "<=", "gt": ">", "ge": ">="}

NK_TEXT = "NK"


class QuerySyntaxError(Exception):
    """Raised when surface text cannot be parsed.

    ``message`` is human readable (it becomes verifier feedback); ``position``
    is a character offset into the input where the problem was detected.
    """

    def __init__(self, message: str, position: int = 0):
        super().__init__(message)
        self.message = message
        self.position = position


class NKInput(Exception):
    """An operation that needs a concrete query was given the NK sentinel."""


class UnsupportedQuery(Exception):
    """The canonical query cannot be rendered in the requested dialect."""


@dataclass(frozen=True)
class Literal:
    """A typed literal value: integer, float, string or date (ISO text)."""

    value: object
    datatype: str

    def __post_init__(self):
        if self.datatype not in LITERAL_DATATYPES:
            raise ValueError(f"unknown literal datatype {self.datatype!r}")

    def __str__(self) -> str:
        return f"{self.value}:{self.datatype}"


@dataclass(frozen=True)
class Term:
    """One position of a triple pattern.

    ``kind`` is one of ``var``, ``entity``, ``class``, ``relation``,
    ``literal``, ``type_assert``; exactly one payload field is populated.
    Use the module-level constructors rather than instantiating directly.
    """

    kind: str
    value: str | None = None
    literal: Literal | None = None

    def is_var(self) -> bool:
        return self.kind == "var"


def var(name: str) -> Term:
    return Term("var", name)


def entity(eid: str) -> Term:
    return Term("entity", eid)


def cls(cid: str) -> Term:
    return Term("class", cid)


def rel(rid: str) -> Term:
    return Term("relation", rid)


def lit(value: object, datatype: str) -> Term:
    return Term("literal", None, Literal(value, datatype))


TYPE_ASSERT = Term("type_assert", TYPE_ASSERT_ID)

Pattern = tuple[Term, Term, Term]


@dataclass(frozen=True)
class Filter:
    variable: str
    op: str
    literal: Literal

    def __post_init__(self):
        if self.op not in COMPARATORS:
            raise ValueError(f"unknown comparator {self.op!r}")


@dataclass(frozen=True)
class Aggregate:
    kind: str  # "count" | "argmax" | "argmin"
    path: tuple[str, ...] = ()  # relation ids, argmax/argmin only


@dataclass(frozen=True, eq=False)
class CanonicalQuery:
    projection: str
    distinct: bool
    patterns: tuple[Pattern, ...]
    filters: tuple[Filter, ...] = ()
    aggregate: Aggregate | None = None

    def _key(self):
        # Pattern and filter ORDER is presentation, not meaning: equality and
        # hashing treat them as sets.
        return (
            self.projection,
            self.distinct,
            frozenset(self.patterns),
            frozenset(self.filters),
            self.aggregate,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, CanonicalQuery):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def variables(self) -> list[str]:
        """Variable names in first-appearance order over patterns then filters."""
        seen: list[str] = []
        for s, _, o in self.patterns:
            for term in (s, o):
                if term.is_var() and term.value not in seen:
                    seen.append(term.value)
        for f in self.filters:
            if f.variable not in seen:
                seen.append(f.variable)
        return seen

    def validate(self) -> None:
        pattern_vars = set()
        for s, p, o in self.patterns:
            if s.kind not in ("var", "entity"):
                raise QuerySyntaxError(f"pattern subject must be a variable or entity, got {s.kind}")
            if p.kind not in ("relation", "type_assert"):
                raise QuerySyntaxError(f"pattern predicate must be a relation, got {p.kind}")
            if p.kind == "type_assert" and o.kind != "class":
                raise QuerySyntaxError("object of a type assertion must be a class id")
            for term in (s, o):
                if term.is_var():
                    pattern_vars.add(term.value)
        if self.projection not in pattern_vars:
            raise QuerySyntaxError(
                f"projection variable ?{self.projection} is not bound in the query body"
            )
        for f in self.filters:
            if f.variable not in pattern_vars:
                raise QuerySyntaxError(f"filter variable ?{f.variable} is not bound in any pattern")


@dataclass(frozen=True)
class LogicalForm:
    """Surface text in a dialect plus its canonical query, or the NK sentinel.

    When the surface text does not parse, ``canonical`` is None and
    ``parse_error`` carries the parser message (consumed by the syntax
    verifier, not raised).
    """

    dialect: str
    surface: str
    canonical: CanonicalQuery | None = None
    is_nk: bool = False
    parse_error: str | None = None

    @classmethod
    def nk(cls) -> "LogicalForm":
        return cls(dialect="sparql", surface=NK_TEXT, is_nk=True)

    @classmethod
    def from_text(cls, dialect: str, text: str) -> "LogicalForm":
        """Parse surface text; parse failure is recorded, not raised."""
        stripped = text.strip()
        if stripped.strip('"\'' ) == NK_TEXT:
            return cls.nk()
        try:
            canonical = parse(stripped, dialect)
            return cls(dialect=dialect, surface=stripped, canonical=canonical)
        except QuerySyntaxError as err:
            return cls(dialect=dialect, surface=stripped, parse_error=err.message)

    @property
    def parsed(self) -> bool:
        return self.canonical is not None


# ---------------------------------------------------------------------------
# SPARQL subset
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<date>"(\d{4}-\d{2}-\d{2})"\^\^xsd:date)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<id>ns:[A-Za-z0-9_][A-Za-z0-9_.\-]*)
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>-?\d+\.\d+|-?\d+)
  | (?P<op><=|>=|!=|=|<|>)
  | (?P<punct>[{}().])
  | (?P<word>[A-Za-z_][A-Za-z0-9_.]*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize_sparql(text: str) -> list[_Tok]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Tok(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Tok("eof", "", len(text)))
    return tokens


class _SparqlParser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize_sparql(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, message: str) -> None:
        raise QuerySyntaxError(message, self.peek().pos)

    def expect_word(self, word: str) -> None:
        tok = self.peek()
        if tok.kind == "word" and tok.text.upper() == word:
            self.next()
            return
        if tok.kind == "word":
            self.fail(f"word {tok.text} not defined, expected {word}")
        self.fail(f"expected {word}, found {tok.text or 'end of input'!r}")

    def expect_punct(self, ch: str) -> None:
        tok = self.peek()
        if tok.kind == "punct" and tok.text == ch:
            self.next()
            return
        if tok.kind == "word":
            self.fail(f"word {tok.text} not defined, expected {ch!r}")
        self.fail(f"expected {ch!r}, found {tok.text or 'end of input'!r}")

    def parse(self) -> CanonicalQuery:
        self.expect_word("SELECT")
        distinct = False
        if self.peek().kind == "word" and self.peek().text.upper() == "DISTINCT":
            self.next()
            distinct = True
        aggregate = None
        if self.peek().kind == "word" and self.peek().text.upper() == "COUNT":
            self.next()
            self.expect_punct("(")
            if self.peek().kind == "word" and self.peek().text.upper() == "DISTINCT":
                self.next()
                distinct = True
            projection = self._variable()
            self.expect_punct(")")
            aggregate = Aggregate("count")
        else:
            projection = self._variable()
        if self.peek().kind == "word" and self.peek().text.upper() == "WHERE":
            self.next()
        self.expect_punct("{")
        patterns: list[Pattern] = []
        filters: list[Filter] = []
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.text == "}":
                self.next()
                break
            if tok.kind == "punct" and tok.text == ".":
                self.next()
                continue
            if tok.kind == "eof":
                self.fail("unexpected end of input, expected '}'")
            if tok.kind == "word" and tok.text.upper() == "FILTER":
                self.next()
                filters.append(self._filter())
            elif tok.kind == "word":
                self.fail(f"word {tok.text} not defined")
            else:
                patterns.append(self._triple())
        if self.peek().kind != "eof":
            tok = self.peek()
            self.fail(f"unexpected trailing input {tok.text!r}")
        query = CanonicalQuery(projection, distinct, tuple(patterns), tuple(filters), aggregate)
        query.validate()
        return query

    def _variable(self) -> str:
        tok = self.peek()
        if tok.kind != "var":
            self.fail(f"expected a variable, found {tok.text or 'end of input'!r}")
        self.next()
        return tok.text[1:]

    def _triple(self) -> Pattern:
        subject = self._node(position="subject")
        predicate = self._predicate()
        obj = self._node(position="object", typed=predicate.kind == "type_assert")
        return (subject, predicate, obj)

    def _predicate(self) -> Term:
        tok = self.peek()
        if tok.kind != "id":
            self.fail(f"expected a relation id in predicate position, found {tok.text!r}")
        self.next()
        rid = tok.text[3:]
        if rid == TYPE_ASSERT_ID:
            return TYPE_ASSERT
        return rel(rid)

    def _node(self, position: str, typed: bool = False) -> Term:
        tok = self.peek()
        if tok.kind == "var":
            self.next()
            return var(tok.text[1:])
        if tok.kind == "id":
            self.next()
            return cls(tok.text[3:]) if typed else entity(tok.text[3:])
        if position == "object":
            if tok.kind == "number":
                self.next()
                return lit(*_number(tok.text))
            if tok.kind == "date":
                self.next()
                return lit(tok.text[1:11], "date")
            if tok.kind == "string":
                self.next()
                return lit(json.loads(tok.text), "string")
        self.fail(f"expected a {position} term, found {tok.text or 'end of input'!r}")

    def _filter(self) -> Filter:
        self.expect_punct("(")
        variable = self._variable()
        tok = self.peek()
        if tok.kind != "op":
            self.fail(f"expected a comparator, found {tok.text!r}")
        self.next()
        op = tok.text
        value = self.peek()
        if value.kind == "number":
            self.next()
            literal = Literal(*_number(value.text))
        elif value.kind == "date":
            self.next()
            literal = Literal(value.text[1:11], "date")
        elif value.kind == "string":
            self.next()
            literal = Literal(json.loads(value.text), "string")
        else:
            self.fail(f"expected a literal in FILTER, found {value.text!r}")
        self.expect_punct(")")
        return Filter(variable, op, literal)


def _number(text: str) -> tuple[object, str]:
    if "." in text:
        return float(text), "float"
    return int(text), "integer"


def parse_sparql(text: str) -> CanonicalQuery:
    """Parse the supported SPARQL subset into a canonical query."""
    return _SparqlParser(text).parse()


def render_sparql(q: CanonicalQuery) -> str:
    if q.aggregate is not None and q.aggregate.kind in ("argmax", "argmin"):
        raise UnsupportedQuery("argmax/argmin cannot be rendered in the sparql dialect")
    if q.aggregate is not None and q.aggregate.kind == "count":
        proj = f"COUNT(DISTINCT ?{q.projection})" if q.distinct else f"COUNT(?{q.projection})"
        head = f"SELECT {proj}"
    else:
        head = "SELECT "
        if q.distinct:
            head += "DISTINCT "
        head += f"?{q.projection}"
    parts = [" . ".join(_render_sparql_pattern(p) for p in q.patterns)]
    for f in q.filters:
        parts.append(f"FILTER(?{f.variable} {f.op} {_render_sparql_literal(f.literal)})")
    body = " . ".join(part for part in parts if part)
    return f"{head} WHERE {{ {body} }}"


def _render_sparql_pattern(pattern: Pattern) -> str:
    return " ".join(_render_sparql_term(t) for t in pattern)


def _render_sparql_term(term: Term) -> str:
    if term.kind == "var":
        return f"?{term.value}"
    if term.kind == "literal":
        return _render_sparql_literal(term.literal)
    return f"ns:{term.value}"


def _render_sparql_literal(literal: Literal) -> str:
    if literal.datatype in ("integer", "float"):
        return str(literal.value)
    if literal.datatype == "date":
        return f'"{literal.value}"^^xsd:date'
    return json.dumps(literal.value)


# ---------------------------------------------------------------------------
# S-expressions
# ---------------------------------------------------------------------------

_SEXPR_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<open>\()
  | (?P<close>\))
  | (?P<date>"(\d{4}-\d{2}-\d{2})"\^\^date)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<number>-?\d+\.\d+|-?\d+)
  | (?P<symbol>[A-Za-z0-9_][A-Za-z0-9_.\-]*)
    """,
    re.VERBOSE,
)


def _tokenize_sexpr(text: str) -> list[_Tok]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _SEXPR_TOKEN_RE.match(text, pos)
        if m is None:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(_Tok(m.lastgroup, m.group(), pos))
        pos = m.end()
    return tokens


def _read_sexpr(tokens: list[_Tok], i: int) -> tuple[object, int]:
    if i >= len(tokens):
        raise QuerySyntaxError("unexpected end of input, unbalanced parentheses", 0)
    tok = tokens[i]
    if tok.kind == "open":
        items = []
        i += 1
        while True:
            if i >= len(tokens):
                raise QuerySyntaxError("unexpected end of input, unbalanced parentheses", tok.pos)
            if tokens[i].kind == "close":
                return items, i + 1
            item, i = _read_sexpr(tokens, i)
            items.append(item)
    if tok.kind == "close":
        raise QuerySyntaxError("unexpected ')'", tok.pos)
    if tok.kind == "number":
        return Literal(*_number(tok.text)), i + 1
    if tok.kind == "date":
        return Literal(tok.text[1:11], "date"), i + 1
    if tok.kind == "string":
        return Literal(json.loads(tok.text), "string"), i + 1
    return tok.text, i + 1


_MID_RE = re.compile(r"^[mg]\.")


def _is_mid(symbol: str) -> bool:
    return bool(_MID_RE.match(symbol))


class _SexprLowerer:
    """Lower a parsed s-expression tree to the canonical query form.

    Bare symbols follow the Freebase convention: machine ids (m./g. prefix)
    denote entities, dotted names denote classes read as instance sets.
    """

    def __init__(self):
        self.counter = 0
        self.patterns: list[Pattern] = []
        self.filters: list[Filter] = []

    def fresh(self) -> Term:
        self.counter += 1
        return var(f"v{self.counter}")

    def lower(self, node: object) -> Term:
        if isinstance(node, Literal):
            return Term("literal", None, node)
        if isinstance(node, str):
            if _is_mid(node):
                return entity(node)
            out = self.fresh()
            self.patterns.append((out, TYPE_ASSERT, cls(node)))
            return out
        if not isinstance(node, list) or not node:
            raise QuerySyntaxError("empty expression")
        head = node[0]
        if not isinstance(head, str):
            raise QuerySyntaxError("expression head must be a function name")
        if head == "JOIN":
            if len(node) != 3:
                raise QuerySyntaxError("JOIN takes a relation and an argument")
            relation, inverted = self._relation(node[1])
            target = self.lower(node[2])
            out = self.fresh()
            if inverted:
                self.patterns.append((target, rel(relation), out))
            else:
                self.patterns.append((out, rel(relation), target))
            return out
        if head == "AND":
            if len(node) != 3:
                raise QuerySyntaxError("AND takes two arguments")
            left, right = node[1], node[2]
            if isinstance(left, str) and not _is_mid(left):
                out = self.lower(right)
                if not out.is_var():
                    raise QuerySyntaxError("AND with a class needs a set-valued argument")
                self.patterns.append((out, TYPE_ASSERT, cls(left)))
                return out
            out = self.lower(left)
            other = self.lower(right)
            if not (out.is_var() and other.is_var()):
                raise QuerySyntaxError("AND arguments must be set-valued")
            # Intersect by renaming: rewrite every use of `other` to `out`.
            self.patterns = [
                tuple(out if t == other else t for t in p)  # type: ignore[misc]
                for p in self.patterns
            ]
            self.filters = [
                Filter(out.value, f.op, f.literal) if f.variable == other.value else f
                for f in self.filters
            ]
            return out
        if head in _SEXPR_COMPARATORS:
            if len(node) != 3 or not isinstance(node[1], str) or not isinstance(node[2], Literal):
                raise QuerySyntaxError(f"{head} takes a relation and a literal")
            out = self.fresh()
            value_var = self.fresh()
            self.patterns.append((out, rel(node[1]), value_var))
            self.filters.append(Filter(value_var.value, _SEXPR_COMPARATORS[head], node[2]))
            return out
        if head in ("COUNT", "ARGMAX", "ARGMIN"):
            raise QuerySyntaxError(f"{head} is only allowed at the top level")
        raise QuerySyntaxError(f"unknown function {head}")

    def _relation(self, node: object) -> tuple[str, bool]:
        if isinstance(node, str):
            return node, False
        if isinstance(node, list) and len(node) == 2 and node[0] == "R" and isinstance(node[1], str):
            return node[1], True
        raise QuerySyntaxError("expected a relation id or (R relation)")


def parse_sexpr(text: str) -> CanonicalQuery:
    """Parse an s-expression and lower it to a canonical query.

    Supported functions: AND, JOIN, R, COUNT, ARGMAX, ARGMIN and the
    comparators lt/le/gt/ge.  Anything else is a syntax error.
    """
    tokens = _tokenize_sexpr(text)
    if not tokens:
        raise QuerySyntaxError("empty input")
    tree, i = _read_sexpr(tokens, 0)
    if i != len(tokens):
        raise QuerySyntaxError("unexpected trailing input", tokens[i].pos)

    aggregate = None
    if isinstance(tree, list) and tree and tree[0] == "COUNT":
        if len(tree) != 2:
            raise QuerySyntaxError("COUNT takes one argument")
        aggregate = Aggregate("count")
        tree = tree[1]
    elif isinstance(tree, list) and tree and tree[0] in ("ARGMAX", "ARGMIN"):
        if len(tree) < 3:
            raise QuerySyntaxError(f"{tree[0]} takes an expression and a relation path")
        path = tree[2:]
        if not all(isinstance(p, str) for p in path):
            raise QuerySyntaxError("aggregate relation path must be relation ids")
        aggregate = Aggregate(tree[0].lower(), tuple(path))
        tree = tree[1]

    lowerer = _SexprLowerer()
    out = lowerer.lower(tree)
    if not out.is_var():
        raise QuerySyntaxError("top-level expression must be set-valued")
    query = CanonicalQuery(
        out.value, True, tuple(lowerer.patterns), tuple(lowerer.filters), aggregate
    )
    query = _canonicalize_variables(query)
    query.validate()
    return query


def _canonicalize_variables(q: CanonicalQuery) -> CanonicalQuery:
    """Rename variables to x (projection) then x0, x1, ... by appearance."""
    mapping = {q.projection: "x"}
    counter = 0
    for name in q.variables():
        if name not in mapping:
            mapping[name] = f"x{counter}"
            counter += 1

    def rename(term: Term) -> Term:
        if term.is_var():
            return var(mapping[term.value])
        return term

    patterns = tuple((rename(s), p, rename(o)) for s, p, o in q.patterns)
    filters = tuple(Filter(mapping[f.variable], f.op, f.literal) for f in q.filters)
    return CanonicalQuery("x", q.distinct, patterns, filters, q.aggregate)


def render_sexpr(q: CanonicalQuery) -> str:
    """Render a tree-shaped canonical query as an s-expression.

    Raises UnsupportedQuery when the pattern graph is not a tree rooted at
    the projection variable (s-expressions cannot express such queries).
    """
    consumed: set[int] = set()
    filters_by_var: dict[str, list[Filter]] = {}
    for f in q.filters:
        filters_by_var.setdefault(f.variable, []).append(f)
    consumed_filters: set[int] = set()

    def edges_of(name: str) -> list[tuple[int, Pattern]]:
        found = []
        for idx, (s, p, o) in enumerate(q.patterns):
            if idx in consumed:
                continue
            if (s.is_var() and s.value == name) or (o.is_var() and o.value == name):
                found.append((idx, (s, p, o)))
        return found

    def render_term(term: Term) -> str:
        if term.kind == "entity":
            return term.value
        if term.kind == "literal":
            return _render_sexpr_literal(term.literal)
        raise UnsupportedQuery(f"cannot render {term.kind} term as an s-expression leaf")

    def comparator_part(name: str, idx: int, pattern: Pattern) -> str | None:
        # Pattern (name, r, z) where z is only used in one filter -> (op r lit).
        s, p, o = pattern
        if not (s.is_var() and s.value == name and o.is_var() and p.kind == "relation"):
            return None
        z = o.value
        if len(edges_of(z)) != 1 or len(filters_by_var.get(z, [])) != 1:
            return None
        f = filters_by_var[z][0]
        op_name = {v: k for k, v in _SEXPR_COMPARATORS.items()}.get(f.op)
        if op_name is None:
            return None
        consumed.add(idx)
        consumed_filters.add(id(f))
        return f"({op_name} {p.value} {_render_sexpr_literal(f.literal)})"

    def expr_for(name: str) -> str:
        parts: list[str] = []
        for idx, (s, p, o) in edges_of(name):
            if p.kind == "type_assert":
                consumed.add(idx)
                parts.append(o.value)
                continue
            comp = comparator_part(name, idx, (s, p, o))
            if comp is not None:
                parts.append(comp)
                continue
            consumed.add(idx)
            if s.is_var() and s.value == name:
                target = expr_for(o.value) if o.is_var() else render_term(o)
                parts.append(f"(JOIN {p.value} {target})")
            else:
                target = expr_for(s.value) if s.is_var() else render_term(s)
                parts.append(f"(JOIN (R {p.value}) {target})")
        if not parts:
            raise UnsupportedQuery(f"variable ?{name} has no constraints to render")
        # Classes first so (AND class expr) reads naturally.
        parts.sort(key=lambda part: (part.startswith("("), part))
        out = parts[-1]
        for part in reversed(parts[:-1]):
            out = f"(AND {part} {out})"
        return out

    body = expr_for(q.projection)
    if len(consumed) != len(q.patterns):
        raise UnsupportedQuery("pattern graph is not a tree rooted at the projection")
    for f in q.filters:
        if id(f) not in consumed_filters:
            raise UnsupportedQuery("filter variable is not a leaf of the pattern tree")
    if q.aggregate is not None:
        if q.aggregate.kind == "count":
            return f"(COUNT {body})"
        return f"({q.aggregate.kind.upper()} {body} {' '.join(q.aggregate.path)})"
    return body


def _render_sexpr_literal(literal: Literal) -> str:
    if literal.datatype in ("integer", "float"):
        return str(literal.value)
    if literal.datatype == "date":
        return f'"{literal.value}"^^date'
    return json.dumps(literal.value)


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------

def parse(text: str, dialect: str) -> CanonicalQuery:
    if dialect == "sparql":
        return parse_sparql(text)
    if dialect == "sexpr":
        return parse_sexpr(text)
    raise ValueError(f"unknown dialect {dialect!r}")


def render(q: CanonicalQuery, dialect: str) -> str:
    if dialect == "sparql":
        return render_sparql(q)
    if dialect == "sexpr":
        return render_sexpr(q)
    raise ValueError(f"unknown dialect {dialect!r}")


def _canonical_of(lf: "LogicalForm | CanonicalQuery") -> CanonicalQuery:
    if isinstance(lf, CanonicalQuery):
        return lf
    if lf.is_nk:
        raise NKInput("the NK sentinel has no canonical query")
    if lf.canonical is None:
        raise ValueError(f"logical form did not parse: {lf.parse_error}")
    return lf.canonical


def extract_relations(lf: "LogicalForm | CanonicalQuery") -> frozenset[str]:
    """Relation ids used by the query (type assertions excluded)."""
    q = _canonical_of(lf)
    found = {p.value for _, p, _ in q.patterns if p.kind == "relation"}
    if q.aggregate is not None:
        found.update(q.aggregate.path)
    return frozenset(found)


def extract_entities(lf: "LogicalForm | CanonicalQuery") -> frozenset[str]:
    """Entity ids used by the query (class objects of type assertions excluded)."""
    q = _canonical_of(lf)
    return frozenset(
        term.value for s, _, o in q.patterns for term in (s, o) if term.kind == "entity"
    )


def extract_classes(lf: "LogicalForm | CanonicalQuery") -> frozenset[str]:
    """Class ids asserted by the query."""
    q = _canonical_of(lf)
    return frozenset(o.value for _, p, o in q.patterns if p.kind == "type_assert")
