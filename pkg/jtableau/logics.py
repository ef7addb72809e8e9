"""
Logic identification, axiom-instance recognition and constant specifications.

A logic is named by the list of its axioms: J, JT, JD4, JT45, ... with LP as
an alias of JT4. The operations on terms it admits are exactly those present
in its axioms.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from ._compat import StrEnum
from pathlib import Path
from typing import Final, Iterable, Iterator

import numpy as np

from . import config
from .errors import InadmissibleOperation, InvalidConstantSpec, JTableauError, ParseError
from .syntax import (
    App,
    Atom,
    BarQuery,
    Bang,
    Bottom,
    Const,
    Formula,
    Imp,
    Just,
    Neg,
    Query,
    Sum,
    parse_formula,
    print_formula,
    read_source,
    sort_key,
    term_operators,
)

LOGGER: Final = logging.getLogger(__name__)


class Axiom(StrEnum):
    JT = "jT"
    JD = "jD"
    J4 = "j4"
    JB = "jB"
    J5 = "j5"


class Scheme(StrEnum):
    TAUT = "Taut"
    SUM = "Sum"
    JK = "jK"
    JT = "jT"
    JD = "jD"
    J4 = "j4"
    JB = "jB"
    J5 = "j5"


SCHEME_ORDER: Final = tuple(Scheme)

# letter used in logic names, in canonical order
_NAME_LETTERS: Final = {Axiom.JT: "T", Axiom.JD: "D", Axiom.J4: "4", Axiom.JB: "B", Axiom.J5: "5"}
_LETTER_AXIOM: Final = {letter: axiom for axiom, letter in _NAME_LETTERS.items()}
ALIASES: Final = {"LP": "JT4"}

_OPERATOR_AXIOM: Final = {"bang": Axiom.J4, "barquery": Axiom.JB, "query": Axiom.J5}


@dataclass(frozen=True)
class LogicId:
    axioms: frozenset[Axiom] = frozenset()

    def has(self, axiom: Axiom) -> bool:
        return axiom in self.axioms

    @property
    def name(self) -> str:
        return "J" + "".join(letter for axiom, letter in _NAME_LETTERS.items() if axiom in self.axioms)

    @property
    def admitted_operations(self) -> frozenset[str]:
        ops = {"app", "sum"}
        ops.update(op for op, axiom in _OPERATOR_AXIOM.items() if axiom in self.axioms)
        return frozenset(ops)

    @property
    def schemes(self) -> tuple[Scheme, ...]:
        active = {Scheme.TAUT, Scheme.SUM, Scheme.JK} | {Scheme(a.value) for a in self.axioms}
        return tuple(s for s in SCHEME_ORDER if s in active)

    def __str__(self):
        return self.name


def parse_logic(name: str) -> LogicId:
    """Read a logic name such as `J`, `JT45` or `LP`."""
    text = ALIASES.get(name.strip().upper(), name.strip().upper())
    if not text.startswith("J"):
        raise ParseError(f"logic name {name!r} must start with J (or be an alias: {', '.join(ALIASES)})")
    axioms = set()
    for letter in text[1:]:
        if letter not in _LETTER_AXIOM:
            raise ParseError(f"unknown axiom letter {letter!r} in logic name {name!r}")
        axioms.add(_LETTER_AXIOM[letter])
    return LogicId(frozenset(axioms))


def check_admissible(logic: LogicId, f: Formula) -> None:
    extra = term_operators(f) - logic.admitted_operations
    if extra:
        raise InadmissibleOperation(
            f"{print_formula(f)} uses {', '.join(sorted(extra))}, not admitted in {logic.name}"
        )


# ---------------------------------------------------------------------------
# Tautologies
# ---------------------------------------------------------------------------

def opaque_atoms(f: Formula) -> list[Formula]:
    """Atoms and maximal justification subformulas, in first-occurrence order."""
    seen: dict[Formula, None] = {}
    stack = [f]
    while stack:
        g = stack.pop()
        match g:
            case Atom() | Just():
                seen.setdefault(g)
            case Neg(a):
                stack.append(a)
            case Imp(a, b):
                stack.extend((b, a))
    return list(seen)


def truth_table(f: Formula, atoms: list[Formula] | None = None) -> np.ndarray:
    """Truth value of f on every valuation of its opaque atoms (⊥ is false)."""
    atoms = opaque_atoms(f) if atoms is None else atoms
    if len(atoms) > config.MAX_TAUT_ATOMS:
        raise JTableauError(
            f"{len(atoms)} opaque atoms exceed the truth-table limit of {config.MAX_TAUT_ATOMS}"
        )
    rows = 1 << len(atoms)
    table = ((np.arange(rows)[:, None] >> np.arange(len(atoms))) & 1).astype(bool)
    column = {a: i for i, a in enumerate(atoms)}

    def evaluate(g: Formula) -> np.ndarray:
        match g:
            case Bottom():
                return np.zeros(rows, dtype=bool)
            case Atom() | Just():
                return table[:, column[g]]
            case Neg(a):
                return ~evaluate(a)
            case Imp(a, b):
                return ~evaluate(a) | evaluate(b)
        raise TypeError(f"not a formula: {g!r}")

    return evaluate(f)


def is_tautology(f: Formula) -> bool:
    return bool(truth_table(f).all())


# ---------------------------------------------------------------------------
# Axiom schemes
# ---------------------------------------------------------------------------

def match_scheme(scheme: Scheme, f: Formula) -> dict | None:
    """Bindings of the scheme's metavariables when f is an instance, else None."""
    match scheme, f:
        case Scheme.TAUT, _:
            return {} if is_tautology(f) else None
        case Scheme.SUM, Imp(Just(s, a), Just(Sum(left, right), a2)) if a == a2 and s in (left, right):
            return {"s": s, "sum": Sum(left, right), "A": a}
        case Scheme.JK, Imp(Just(s, Imp(a, b)), Imp(Just(t, a2), Just(App(s2, t2), b2))) if (
            s == s2 and t == t2 and a == a2 and b == b2
        ):
            return {"s": s, "t": t, "A": a, "B": b}
        case Scheme.JT, Imp(Just(t, a), a2) if a == a2:
            return {"t": t, "A": a}
        case Scheme.JD, Imp(Just(t, Bottom()), Bottom()):
            return {"t": t}
        case Scheme.J4, Imp(Just(t, a), Just(Bang(t2), Just(t3, a2))) if t == t2 == t3 and a == a2:
            return {"t": t, "A": a}
        case Scheme.JB, Imp(Neg(a), Just(BarQuery(t), Neg(Just(t2, a2)))) if t == t2 and a == a2:
            return {"t": t, "A": a}
        case Scheme.J5, Imp(Neg(Just(t, a)), Just(Query(t2), Neg(Just(t3, a2)))) if (
            t == t2 == t3 and a == a2
        ):
            return {"t": t, "A": a}
    return None


def is_axiom_instance(logic: LogicId, f: Formula) -> Scheme | None:
    """First matching active scheme in the order Taut, Sum, jK, jT, jD, j4, jB, j5."""
    check_admissible(logic, f)
    for scheme in logic.schemes:
        if match_scheme(scheme, f) is not None:
            return scheme
    return None


# ---------------------------------------------------------------------------
# Constant specifications
# ---------------------------------------------------------------------------

def split_cs_entry(f: Formula) -> tuple[tuple[Const, ...], Formula]:
    """Peel the constant chain c_n:...:c_1: off f, outermost constant first."""
    chain: list[Const] = []
    while isinstance(f, Just) and isinstance(f.term, Const):
        chain.append(f.term)
        f = f.body
    return tuple(chain), f


@dataclass(frozen=True)
class ConstantSpec:
    entries: frozenset[Formula] = frozenset()

    def __contains__(self, f) -> bool:
        return f in self.entries

    def __iter__(self) -> Iterator[Formula]:
        return iter(sorted(self.entries, key=sort_key))

    def __len__(self) -> int:
        return len(self.entries)

    def to_strings(self) -> list[str]:
        return [print_formula(f) for f in self]


EMPTY_CS: Final = ConstantSpec()


@dataclass(frozen=True)
class CsReport:
    violations: tuple[tuple[str, str], ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_cs(logic: LogicId, cs: ConstantSpec) -> CsReport:
    violations = []
    for entry in cs:
        text = print_formula(entry)
        chain, body = split_cs_entry(entry)
        if not chain:
            violations.append((text, "not of the form c:F with c a constant"))
            continue
        try:
            scheme = is_axiom_instance(logic, body)
        except JTableauError as e:
            violations.append((text, str(e)))
            continue
        if scheme is None:
            violations.append((text, f"{print_formula(body)} is not an axiom instance of {logic.name}"))
        if len(chain) >= 2 and entry.body not in cs.entries:
            violations.append((text, f"not downward closed: {print_formula(entry.body)} missing"))
    return CsReport(tuple(violations))


def cs_member(cs: ConstantSpec, f: Formula) -> bool:
    return f in cs.entries


def downward_closure(entries: Iterable[Formula]) -> frozenset[Formula]:
    closed: set[Formula] = set()
    for f in entries:
        chain, _ = split_cs_entry(f)
        for _ in range(max(len(chain), 1)):
            closed.add(f)
            if not (isinstance(f, Just) and isinstance(f.body, Just) and isinstance(f.body.term, Const)):
                break
            f = f.body
    return frozenset(closed)


def build_cs(entries: Iterable[Formula], logic: LogicId | None = None, close: bool = True) -> ConstantSpec:
    """Build a constant specification, auto-closing it downward unless told otherwise.

    With a logic given the result is validated and InvalidConstantSpec is
    raised on any violation.
    """
    entries = list(entries)
    cs = ConstantSpec(downward_closure(entries) if close else frozenset(entries))
    if logic is not None:
        report = validate_cs(logic, cs)
        if not report.ok:
            raise InvalidConstantSpec(report.violations)
    return cs


def load_cs(path: str | Path, logic: LogicId, close: bool = False) -> ConstantSpec:
    """Load a CS file: one entry per line, `#` comments, `var`/`const` declarations."""
    lines, variables, constants = read_source(Path(path).read_text(encoding="utf-8"))
    entries = []
    for line_no, text in lines:
        try:
            entries.append(parse_formula(text, variables, constants))
        except ParseError as e:
            raise ParseError(f"{path}: {e}", line_no, e.column, text) from None
    cs = build_cs(entries, logic, close=close)
    LOGGER.info("loaded %d CS entries from %s", len(cs), path)
    return cs
