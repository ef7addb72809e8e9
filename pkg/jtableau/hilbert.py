"""
Hilbert-style proofs: reading, checking and translation into tableaux with cut.

A proof file holds numbered lines, each with its justification in brackets:

    # x:A -> c*x:(B -> A)
    1. c:(A -> (B -> A))                                  [IAN]
    2. c:(A -> (B -> A)) -> (x:A -> c*x:(B -> A))         [jK]
    3. x:A -> c*x:(B -> A)                                [MP 1 2]

`MP i j` cites line i holding B and line j holding B -> (this line).
`Axiom` lets the checker pick the first matching scheme.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Final

from .errors import HilbertDefect, JTableauError, ParseError, RuleError
from .logics import ConstantSpec, LogicId, Scheme, check_admissible, cs_member, is_axiom_instance, match_scheme
from .syntax import (
    Formula,
    Imp,
    Just,
    Neg,
    Sum,
    print_formula,
    read_source,
    parse_formula,
)
from .tableau import Block, Calculus, Closed, Rule, Tableau, branch_closed, check_proof, from_blocks

LOGGER: Final = logging.getLogger(__name__)

MP: Final = "MP"
IAN: Final = "IAN"
AXIOM: Final = "Axiom"

_LINE: Final = re.compile(r"^(\d+)\.\s+(.+?)\s*\[\s*([^\]]+?)\s*\]\s*$")


@dataclass(frozen=True)
class HilbertLine:
    number: int
    formula: Formula
    justification: str
    refs: tuple[int, ...] = ()

    def __str__(self):
        just = " ".join([self.justification, *map(str, self.refs)])
        return f"{self.number}. {print_formula(self.formula)}   [{just}]"


@dataclass(frozen=True)
class HilbertProof:
    lines: tuple[HilbertLine, ...]

    @property
    def conclusion(self) -> Formula:
        return self.lines[-1].formula

    def line(self, number: int) -> HilbertLine:
        for ln in self.lines:
            if ln.number == number:
                return ln
        raise HilbertDefect(f"no line {number}", number)

    def mp_count(self) -> int:
        return sum(1 for ln in self.lines if ln.justification == MP)

    def to_text(self) -> str:
        return "\n".join(str(ln) for ln in self.lines) + "\n"


def _justification(text: str, line_no: int) -> tuple[str, tuple[int, ...]]:
    parts = text.split()
    head = parts[0]
    if head.upper() == MP:
        if len(parts) != 3 or not all(p.isdigit() for p in parts[1:]):
            raise HilbertDefect("MP needs two line numbers", line_no)
        return MP, (int(parts[1]), int(parts[2]))
    if len(parts) != 1:
        raise HilbertDefect(f"unexpected justification {text!r}", line_no)
    if head.upper() == IAN:
        return IAN, ()
    if head.lower() == AXIOM.lower():
        return AXIOM, ()
    for scheme in Scheme:
        if head.lower() == scheme.value.lower():
            return scheme.value, ()
    raise HilbertDefect(f"unknown justification {head!r}", line_no)


def parse_hilbert(text: str) -> HilbertProof:
    source_lines, variables, constants = read_source(text)
    lines = []
    for file_line, raw in source_lines:
        match = _LINE.match(raw)
        if match is None:
            raise ParseError(f"expected `n. formula [justification]`, got {raw!r}", file_line, 1, raw)
        number = int(match.group(1))
        try:
            formula = parse_formula(match.group(2), variables, constants)
        except ParseError as e:
            raise ParseError(f"line {number}: {e}", file_line, e.column, raw) from None
        justification, refs = _justification(match.group(3), number)
        lines.append(HilbertLine(number, formula, justification, refs))
    if not lines:
        raise ParseError("empty Hilbert proof")
    return HilbertProof(tuple(lines))


def load_hilbert(path: str | Path) -> HilbertProof:
    proof = parse_hilbert(Path(path).read_text(encoding="utf-8"))
    LOGGER.info("loaded %d-line Hilbert proof from %s", len(proof.lines), path)
    return proof


@dataclass(frozen=True)
class HilbertReport:
    defects: tuple[HilbertDefect, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.defects

    @property
    def first(self) -> HilbertDefect | None:
        return self.defects[0] if self.defects else None

    def __bool__(self):
        return self.ok


def _check_line(ln: HilbertLine, earlier: dict[int, Formula], logic: LogicId, cs: ConstantSpec) -> str | None:
    f = ln.formula
    try:
        check_admissible(logic, f)
    except JTableauError as e:
        return str(e)
    if ln.justification == IAN:
        return None if cs_member(cs, f) else f"{print_formula(f)} is not in the constant specification"
    if ln.justification == MP:
        i, j = ln.refs
        missing = [r for r in (i, j) if r not in earlier]
        if missing:
            return f"MP cites line(s) {missing} that do not precede it"
        if earlier[j] != Imp(earlier[i], f):
            return (f"MP {i} {j}: line {j} must be {print_formula(Imp(earlier[i], f))}, "
                    f"got {print_formula(earlier[j])}")
        return None
    try:
        if ln.justification == AXIOM:
            scheme = is_axiom_instance(logic, f)
            return None if scheme else f"{print_formula(f)} is not an axiom of {logic.name}"
        scheme = Scheme(ln.justification)
        if scheme not in logic.schemes:
            return f"scheme {scheme} is not an axiom of {logic.name}"
        if match_scheme(scheme, f) is None:
            return f"{print_formula(f)} is not an instance of {scheme}"
    except JTableauError as e:
        return str(e)
    return None


def check_hilbert(p: HilbertProof, logic: LogicId, cs: ConstantSpec) -> HilbertReport:
    """Check each line; defects are listed in line order."""
    defects = []
    earlier: dict[int, Formula] = {}
    previous = 0
    for ln in p.lines:
        if ln.number <= previous:
            defects.append(HilbertDefect(f"line number {ln.number} does not increase", ln.number))
        message = _check_line(ln, earlier, logic, cs)
        if message:
            defects.append(HilbertDefect(message, ln.number))
        earlier[ln.number] = ln.formula
        previous = max(previous, ln.number)
    return HilbertReport(tuple(defects))


# ---------------------------------------------------------------------------
# Axiom templates: cut-free refutations of ¬F for each axiom instance F
# ---------------------------------------------------------------------------

def _closes(branch: list[Formula], cs: ConstantSpec) -> bool:
    return isinstance(branch_closed(branch, cs), Closed)


def propositional_refutation(branch: list[Formula], cs: ConstantSpec) -> tuple[Block, ...]:
    """Blocks closing the branch by F¬, F→ and T→ alone, justification formulas kept opaque."""
    if _closes(branch, cs):
        return ()
    present = set(branch)
    for f in branch:
        match f:
            case Neg(Neg(a)) if a not in present:
                return (Block((a,), Rule.F_NEG, (f,), None, propositional_refutation(branch + [a], cs)),)
    for f in branch:
        match f:
            case Neg(Imp(a, b)) if a not in present or Neg(b) not in present:
                return (Block((a, Neg(b)), Rule.F_IMP, (f,), None,
                              propositional_refutation(branch + [a, Neg(b)], cs)),)
    for f in branch:
        match f:
            case Imp(a, b) if Neg(a) not in present and b not in present:
                return (
                    Block((Neg(a),), Rule.T_IMP, (f,), None, propositional_refutation(branch + [Neg(a)], cs)),
                    Block((b,), Rule.T_IMP, (f,), None, propositional_refutation(branch + [b], cs)),
                )
    raise HilbertDefect(f"propositional saturation leaves an open branch: {', '.join(map(print_formula, branch))}")


def axiom_refutation(scheme: Scheme, f: Formula, cs: ConstantSpec) -> tuple[Block, ...]:
    """Children closing a branch that holds ¬f, for f an instance of scheme."""
    neg = Neg(f)
    if scheme is Scheme.TAUT:
        return propositional_refutation([neg], cs)
    if not isinstance(f, Imp):
        raise HilbertDefect(f"{print_formula(f)} is not an instance of {scheme}")
    a, b = f.antecedent, f.consequent
    match scheme, b:
        case Scheme.SUM, Just(Sum(left, _), body):
            rule = Rule.F_SUM_L if a.term == left else Rule.F_SUM_R
            last = Block((Neg(a),), rule, (Neg(b),))
        case Scheme.JK, Imp(minor, conclusion):
            last = Block((minor, Neg(conclusion)), Rule.F_IMP, (Neg(b),), None, (
                Block((conclusion,), Rule.T_APP, (a, minor)),
            ))
        case Scheme.JT, _:
            last = Block((b,), Rule.T_JUST, (a,))
        case Scheme.JD, _:
            last = Block((b,), Rule.T_JUST_BOT, (a,))
        case Scheme.J4, _:
            last = Block((Neg(a),), Rule.F_BANG, (Neg(b),))
        case Scheme.JB, Just(_, Neg(Just(_, body))):
            last = Block((body,), Rule.F_BARQUERY, (Neg(b),))
        case Scheme.J5, Just(_, Neg(Just(t, body))):
            last = Block((Just(t, body),), Rule.F_QUERY, (Neg(b),))
        case _:
            raise HilbertDefect(f"{print_formula(f)} is not an instance of {scheme}")
    return (Block((a, Neg(b)), Rule.F_IMP, (neg,), None, (last,)),)


# ---------------------------------------------------------------------------
# Translation
# ---------------------------------------------------------------------------

def _line_scheme(ln: HilbertLine, logic: LogicId) -> Scheme:
    if ln.justification == AXIOM:
        return is_axiom_instance(logic, ln.formula)
    return Scheme(ln.justification)


def translate_to_tableau(p: HilbertProof, logic: LogicId, cs: ConstantSpec) -> Tableau:
    """A closed JLT_plus_cut tableau for the conclusion; each MP line becomes two cuts."""
    report = check_hilbert(p, logic, cs)
    if not report.ok:
        raise report.first
    by_number = {ln.number: ln for ln in p.lines}

    @lru_cache(maxsize=None)
    def refute(number: int) -> tuple[Block, ...]:
        ln = by_number[number]
        if ln.justification == IAN:
            return ()
        if ln.justification != MP:
            return axiom_refutation(_line_scheme(ln, logic), ln.formula, cs)
        i, j = ln.refs
        b, a = by_number[i].formula, ln.formula
        imp = Imp(b, a)
        detach = (
            Block((Neg(b),), Rule.T_IMP, (imp,)),
            Block((a,), Rule.T_IMP, (imp,)),
        )
        inner = (
            Block((imp,), Rule.CUT, (), imp, detach),
            Block((Neg(imp),), Rule.CUT, (), imp, refute(j)),
        )
        return (
            Block((b,), Rule.CUT, (), b, inner),
            Block((Neg(b),), Rule.CUT, (), b, refute(i)),
        )

    root = Block((Neg(p.conclusion),), None, (), None, refute(p.lines[-1].number))
    t = from_blocks(root, Calculus.JLT_PLUS_CUT, logic, cs)
    checked = check_proof(t)
    if not checked.ok:
        raise RuleError(f"translation produced an invalid tableau: {checked.defects[0]}")
    LOGGER.info("translated %d-line proof into %d nodes", len(p.lines), t.size)
    return t
