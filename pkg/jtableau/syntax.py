"""
Justification terms and formulas: ASTs, parser, printer and structural measures.

Surface syntax (ASCII):
    terms     x y z ... (variables)  a b c ... (constants)
              s*t  s+t  !t  ?t  @t   (@ is the bar-query operator)
    formulas  False  p  ~A  A -> B  t:A

Precedence, tightest first: prefix term operators, `*`, `+`, `:`, `~`, `->`.
`:` and `->` associate to the right, `*` and `+` to the left.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Final, Iterator, Union

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from .errors import ParseError

LOGGER: Final = logging.getLogger(__name__)

VARIABLE_LETTERS: Final = frozenset("xyz")


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, slots=True)
class Const:
    name: str

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, slots=True)
class App:
    """Application s·t."""

    left: Term
    right: Term

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, slots=True)
class Sum:
    left: Term
    right: Term

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, slots=True)
class Bang:
    inner: Term

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, slots=True)
class Query:
    inner: Term

    def __str__(self):
        return print_term(self)


@dataclass(frozen=True, slots=True)
class BarQuery:
    inner: Term

    def __str__(self):
        return print_term(self)


Term = Union[Var, Const, App, Sum, Bang, Query, BarQuery]


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Bottom:
    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True, slots=True)
class Atom:
    name: str

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True, slots=True)
class Neg:
    inner: Formula

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True, slots=True)
class Imp:
    antecedent: Formula
    consequent: Formula

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True, slots=True)
class Just:
    """t:A, the term t justifies the body A."""

    term: Term
    body: Formula

    def __str__(self):
        return print_formula(self)


Formula = Union[Bottom, Atom, Neg, Imp, Just]

BOTTOM: Final = Bottom()

TERM_TYPES: Final = (Var, Const, App, Sum, Bang, Query, BarQuery)
FORMULA_TYPES: Final = (Bottom, Atom, Neg, Imp, Just)


def is_term(x) -> bool:
    return isinstance(x, TERM_TYPES)


def make_name(name: str, variables=frozenset(), constants=frozenset()) -> Term:
    """Classify a term identifier as variable or constant.

    Explicit declarations win over the leading-letter convention.
    """
    if not name:
        raise ParseError("empty term name")
    if name in variables:
        return Var(name)
    if name in constants:
        return Const(name)
    first = name[0]
    if not first.islower():
        raise ParseError(f"term name {name!r} must start with a lowercase letter or be declared")
    return Var(name) if first in VARIABLE_LETTERS else Const(name)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

GRAMMAR: Final = r"""
    ?start: formula

    ?formula: unary "->" formula      -> imp
            | unary

    ?unary: "~" unary                 -> neg
          | term ":" unary            -> just
          | primary

    ?primary: "False"                 -> bottom
            | NAME                    -> atom
            | "(" formula ")"

    ?term: term "+" product           -> sum
         | product

    ?product: product "*" prefix      -> app
            | prefix

    ?prefix: "!" prefix               -> bang
           | "?" prefix               -> query
           | "@" prefix               -> barquery
           | NAME                     -> term_name
           | "(" term ")"

    NAME: /[A-Za-z][A-Za-z0-9_']*/

    %import common.WS
    %ignore WS
"""

TERM_GRAMMAR: Final = GRAMMAR.replace("?start: formula", "?start: term")


@v_args(inline=True)
class _AstBuilder(Transformer):
    def __init__(self, variables=frozenset(), constants=frozenset()):
        super().__init__()
        self.variables = variables
        self.constants = constants

    def imp(self, a, b):
        return Imp(a, b)

    def neg(self, a):
        return Neg(a)

    def just(self, t, a):
        return Just(t, a)

    def bottom(self):
        return BOTTOM

    def atom(self, token):
        return Atom(str(token))

    def sum(self, s, t):
        return Sum(s, t)

    def app(self, s, t):
        return App(s, t)

    def bang(self, t):
        return Bang(t)

    def query(self, t):
        return Query(t)

    def barquery(self, t):
        return BarQuery(t)

    def term_name(self, token):
        return make_name(str(token), self.variables, self.constants)


@lru_cache(maxsize=2)
def _parser(start: str) -> Lark:
    grammar = GRAMMAR if start == "formula" else TERM_GRAMMAR
    return Lark(grammar, parser="earley", lexer="basic", propagate_positions=True)


def _explain(text: str, error: UnexpectedInput) -> ParseError:
    line = getattr(error, "line", 0) or 0
    column = getattr(error, "column", 0) or 0
    if isinstance(error, UnexpectedCharacters):
        char = getattr(error, "char", "?")
        return ParseError(f"unknown token {char!r}", line, column, text)
    if isinstance(error, UnexpectedEOF) or (
        isinstance(error, UnexpectedToken) and error.token.type == "$END"
    ):
        if text.count("(") != text.count(")"):
            return ParseError("unbalanced parenthesis", line or 1, column or len(text) + 1, text)
        return ParseError("unexpected end of input", line or 1, column or len(text) + 1, text)
    if isinstance(error, UnexpectedToken):
        token = str(error.token)
        if token == ":":
            return ParseError("':' needs a justification term on its left", line, column, text)
        if token == ")" and text.count("(") != text.count(")"):
            return ParseError("unbalanced parenthesis", line, column, text)
        return ParseError(f"unexpected token {token!r}", line, column, text)
    return ParseError(str(error), line, column, text)


def _parse(text: str, start: str, variables, constants):
    try:
        tree = _parser(start).parse(text)
    except UnexpectedInput as e:
        raise _explain(text, e) from None
    try:
        return _AstBuilder(frozenset(variables), frozenset(constants)).transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, ParseError):
            raise ParseError(str(e.orig_exc), 0, 0, text) from None
        raise


def parse_formula(text: str, variables=frozenset(), constants=frozenset()) -> Formula:
    """Parse a formula in the ASCII grammar.

    `variables` and `constants` declare term names that break the
    leading-letter convention.
    """
    result = _parse(text, "formula", variables, constants)
    LOGGER.debug("parsed %r", text)
    return result


def parse_term(text: str, variables=frozenset(), constants=frozenset()) -> Term:
    return _parse(text, "term", variables, constants)


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

_ASCII: Final = {"app": "*", "sum": "+", "bang": "!", "query": "?", "barquery": "@",
                 "neg": "~", "imp": " -> ", "bottom": "False"}
_UNICODE: Final = {"app": "·", "sum": "+", "bang": "!", "query": "?", "barquery": "?̄",
                   "neg": "¬", "imp": " → ", "bottom": "⊥"}

# term levels: sum 1, app 2, prefix/name 3
# formula levels: imp 1, unary (neg, just) 2, primary 3


def _term_level(t: Term) -> int:
    match t:
        case Sum():
            return 1
        case App():
            return 2
        case _:
            return 3


def print_term(t: Term, unicode: bool = False, _level: int = 1) -> str:
    ops = _UNICODE if unicode else _ASCII
    match t:
        case Var(name) | Const(name):
            text = name
        case App(left, right):
            text = print_term(left, unicode, 2) + ops["app"] + print_term(right, unicode, 3)
        case Sum(left, right):
            text = print_term(left, unicode, 1) + ops["sum"] + print_term(right, unicode, 2)
        case Bang(inner):
            text = ops["bang"] + print_term(inner, unicode, 3)
        case Query(inner):
            text = ops["query"] + print_term(inner, unicode, 3)
        case BarQuery(inner):
            text = ops["barquery"] + print_term(inner, unicode, 3)
        case _:
            raise TypeError(f"not a term: {t!r}")
    return f"({text})" if _term_level(t) < _level else text


def _formula_level(f: Formula) -> int:
    match f:
        case Imp():
            return 1
        case Neg() | Just():
            return 2
        case _:
            return 3


def print_formula(f: Formula, unicode: bool = False, _level: int = 1) -> str:
    """Render with minimal parentheses; sums in front of ':' are bracketed."""
    ops = _UNICODE if unicode else _ASCII
    match f:
        case Bottom():
            text = ops["bottom"]
        case Atom(name):
            text = name
        case Neg(inner):
            text = ops["neg"] + print_formula(inner, unicode, 2)
        case Imp(a, b):
            text = print_formula(a, unicode, 2) + ops["imp"] + print_formula(b, unicode, 1)
        case Just(t, body):
            text = print_term(t, unicode, 2) + ":" + print_formula(body, unicode, 2)
        case _:
            raise TypeError(f"not a formula: {f!r}")
    return f"({text})" if _formula_level(f) < _level else text


# ---------------------------------------------------------------------------
# Structural measures
# ---------------------------------------------------------------------------

def rank(x: Term | Formula) -> int:
    """Rank of a term or formula.

    Variables, constants, atoms and falsum have rank 0; binary term
    operators and implication add one to the sum of their parts; unary
    operators add one; t:A adds one to r(t) + r(A).
    """
    match x:
        case Var() | Const() | Atom() | Bottom():
            return 0
        case App(s, t) | Sum(s, t):
            return rank(s) + rank(t) + 1
        case Bang(t) | Query(t) | BarQuery(t):
            return rank(t) + 1
        case Neg(a):
            return rank(a) + 1
        case Imp(a, b):
            return rank(a) + rank(b) + 1
        case Just(t, a):
            return rank(t) + rank(a) + 1
    raise TypeError(f"cannot rank {x!r}")


def size(x: Term | Formula) -> int:
    """Node count, term nodes included."""
    match x:
        case Var() | Const() | Atom() | Bottom():
            return 1
        case App(s, t) | Sum(s, t):
            return 1 + size(s) + size(t)
        case Bang(t) | Query(t) | BarQuery(t):
            return 1 + size(t)
        case Neg(a):
            return 1 + size(a)
        case Imp(a, b):
            return 1 + size(a) + size(b)
        case Just(t, a):
            return 1 + size(t) + size(a)
    raise TypeError(f"cannot size {x!r}")


def immediate_subterms(t: Term) -> tuple[Term, ...]:
    match t:
        case App(s, u) | Sum(s, u):
            return (s, u)
        case Bang(s) | Query(s) | BarQuery(s):
            return (s,)
    return ()


def subterms(t: Term) -> frozenset[Term]:
    """Reflexive-transitive closure of the constructor-argument relation."""
    found = {t}
    stack = [t]
    while stack:
        for s in immediate_subterms(stack.pop()):
            if s not in found:
                found.add(s)
                stack.append(s)
    return frozenset(found)


def immediate_subformulas(f: Formula) -> tuple[Formula, ...]:
    match f:
        case Neg(a) | Just(_, a):
            return (a,)
        case Imp(a, b):
            return (a, b)
    return ()


def syntactic_subformulas(f: Formula) -> frozenset[Formula]:
    found = {f}
    stack = [f]
    while stack:
        for g in immediate_subformulas(stack.pop()):
            if g not in found:
                found.add(g)
                stack.append(g)
    return frozenset(found)


def terms_of(f: Formula) -> Iterator[Term]:
    """Terms sitting directly in front of a ':' anywhere inside f."""
    for g in syntactic_subformulas(f):
        if isinstance(g, Just):
            yield g.term


def all_subterms(formulas) -> frozenset[Term]:
    pool: set[Term] = set()
    for f in formulas:
        for t in terms_of(f):
            pool |= subterms(t)
    return frozenset(pool)


def atoms_of(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in syntactic_subformulas(f) if isinstance(g, Atom))


def term_operators(x: Term | Formula) -> frozenset[str]:
    """Names of the term operators used anywhere in x."""
    ops: set[str] = set()
    terms = [x] if is_term(x) else list(terms_of(x))
    for t in terms:
        for s in subterms(t):
            match s:
                case App():
                    ops.add("app")
                case Sum():
                    ops.add("sum")
                case Bang():
                    ops.add("bang")
                case Query():
                    ops.add("query")
                case BarQuery():
                    ops.add("barquery")
    return frozenset(ops)


def sort_key(f: Formula) -> tuple[int, str]:
    """Deterministic order: size first, then printed form."""
    return size(f), print_formula(f)


def negate(f: Formula) -> Formula:
    return Neg(f)


def conjugate(f: Formula) -> Formula:
    """The formula that closes a branch together with f."""
    return f.inner if isinstance(f, Neg) else Neg(f)


# ---------------------------------------------------------------------------
# JSON trees
# ---------------------------------------------------------------------------

def term_to_json(t: Term) -> dict:
    match t:
        case Var(name):
            return {"kind": "var", "name": name}
        case Const(name):
            return {"kind": "const", "name": name}
        case App(s, u):
            return {"kind": "app", "children": [term_to_json(s), term_to_json(u)]}
        case Sum(s, u):
            return {"kind": "sum", "children": [term_to_json(s), term_to_json(u)]}
        case Bang(s):
            return {"kind": "bang", "children": [term_to_json(s)]}
        case Query(s):
            return {"kind": "query", "children": [term_to_json(s)]}
        case BarQuery(s):
            return {"kind": "barquery", "children": [term_to_json(s)]}
    raise TypeError(f"not a term: {t!r}")


_TERM_KINDS: Final = {"app": App, "sum": Sum, "bang": Bang, "query": Query, "barquery": BarQuery}


def term_from_json(data: dict) -> Term:
    kind = data.get("kind")
    if kind == "var":
        return Var(data["name"])
    if kind == "const":
        return Const(data["name"])
    if kind in _TERM_KINDS:
        return _TERM_KINDS[kind](*(term_from_json(c) for c in data["children"]))
    raise ParseError(f"unknown term kind {kind!r}")


def formula_to_json(f: Formula) -> dict:
    match f:
        case Bottom():
            return {"kind": "bottom"}
        case Atom(name):
            return {"kind": "atom", "name": name}
        case Neg(a):
            return {"kind": "neg", "children": [formula_to_json(a)]}
        case Imp(a, b):
            return {"kind": "imp", "children": [formula_to_json(a), formula_to_json(b)]}
        case Just(t, a):
            return {"kind": "just", "term": term_to_json(t), "children": [formula_to_json(a)]}
    raise TypeError(f"not a formula: {f!r}")


def formula_from_json(data: dict) -> Formula:
    kind = data.get("kind")
    children = data.get("children", [])
    if kind == "bottom":
        return BOTTOM
    if kind == "atom":
        return Atom(data["name"])
    if kind == "neg":
        return Neg(formula_from_json(children[0]))
    if kind == "imp":
        return Imp(formula_from_json(children[0]), formula_from_json(children[1]))
    if kind == "just":
        return Just(term_from_json(data["term"]), formula_from_json(children[0]))
    raise ParseError(f"unknown formula kind {kind!r}")


# ---------------------------------------------------------------------------
# Source files
# ---------------------------------------------------------------------------

def read_source(text: str) -> tuple[list[tuple[int, str]], frozenset[str], frozenset[str]]:
    """Split file text into numbered content lines plus var/const declarations.

    Blank lines and `#` comments are skipped. `var a b` and `const x` lines
    declare names that break the leading-letter convention.
    """
    lines: list[tuple[int, str]] = []
    variables: set[str] = set()
    constants: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        if keyword in ("var", "const") and rest.strip():
            names = rest.replace(",", " ").split()
            (variables if keyword == "var" else constants).update(names)
            continue
        lines.append((line_no, line))
    return lines, frozenset(variables), frozenset(constants)
