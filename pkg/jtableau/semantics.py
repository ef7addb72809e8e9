"""
Finite Mkrtychev models: forcing and the admissible-evidence conditions E1-E7.

A model is a valuation, an evidence map from terms to formula sets and a
finite universe of formulas. Conditions quantify over the base terms of the
model and their one-step images s·t, s+t, !t, ?t and ?̄t. Base terms are the
subterms of universe formulas plus the evidence keys that are not themselves
one-step images of base terms. Images only appear as conclusions of the
conditions, which keeps the quantification finite.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Final, Iterable, Iterator, Mapping

from . import config
from .errors import OutOfUniverse
from .logics import Axiom, ConstantSpec, LogicId
from .syntax import (
    App,
    Atom,
    BarQuery,
    Bang,
    Bottom,
    BOTTOM,
    Formula,
    Imp,
    Just,
    Neg,
    Query,
    Sum,
    Term,
    all_subterms,
    immediate_subterms,
    parse_formula,
    parse_term,
    print_formula,
    print_term,
    size,
    sort_key,
    subterms,
    syntactic_subformulas,
)

LOGGER: Final = logging.getLogger(__name__)

CONDITIONS: Final = ("E1", "E2", "E3", "E4", "E5", "E6", "E7")
_OPTIONAL: Final = {"E4": Axiom.JD, "E5": Axiom.J4, "E6": Axiom.JB, "E7": Axiom.J5}


@dataclass(frozen=True)
class MModel:
    valuation: Mapping[str, int]
    evidence: Mapping[Term, frozenset[Formula]]
    universe: frozenset[Formula]

    def value(self, atom: str) -> bool:
        return bool(self.valuation.get(atom, 0))

    def E(self, t: Term) -> frozenset[Formula]:
        return self.evidence.get(t, frozenset())

    def base_terms(self) -> tuple[Term, ...]:
        """Base terms in (size, text) order."""
        base = set(all_subterms(self.universe))
        for k in sorted((k for k in self.evidence if k not in base), key=term_order):
            operands = immediate_subterms(k)
            if operands and all(o in base for o in operands):
                continue
            base |= subterms(k)
        return tuple(sorted(base, key=term_order))


def term_order(t: Term) -> tuple[int, str]:
    return size(t), print_term(t)


def close_universe(formulas: Iterable[Formula]) -> frozenset[Formula]:
    closed: set[Formula] = set()
    for f in formulas:
        closed |= syntactic_subformulas(f)
    return frozenset(closed)


def make_model(
    valuation: Mapping[str, int],
    evidence: Mapping[Term, Iterable[Formula]],
    universe: Iterable[Formula] = (),
) -> MModel:
    """Build a model whose universe is closed and contains every evidence formula."""
    frozen = {t: frozenset(fs) for t, fs in evidence.items()}
    formulas = set(universe)
    for fs in frozen.values():
        formulas |= fs
    return MModel(dict(valuation), frozen, close_universe(formulas))


# ---------------------------------------------------------------------------
# Forcing
# ---------------------------------------------------------------------------

def forces(m: MModel, f: Formula, logic: LogicId) -> bool:
    if f not in m.universe:
        raise OutOfUniverse(f"{print_formula(f)} is outside the model universe")
    return _forces(m, f, logic.has(Axiom.JT), {})


def _forces(m: MModel, f: Formula, factive: bool, memo: dict) -> bool:
    if f in memo:
        return memo[f]
    match f:
        case Bottom():
            result = False
        case Atom(name):
            result = m.value(name)
        case Neg(a):
            result = not _forces(m, a, factive, memo)
        case Imp(a, b):
            result = not _forces(m, a, factive, memo) or _forces(m, b, factive, memo)
        case Just(t, a):
            result = a in m.E(t) and (not factive or _forces(m, a, factive, memo))
        case _:
            raise TypeError(f"not a formula: {f!r}")
    memo[f] = result
    return result


def satisfies_branch(m: MModel, formulas: Iterable[Formula], logic: LogicId) -> bool:
    return all(forces(m, f, logic) for f in formulas)


# ---------------------------------------------------------------------------
# Evidence conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    condition: str
    terms: tuple[Term, ...]
    formulas: tuple[Formula, ...]
    message: str

    def __str__(self):
        return f"{self.condition}: {self.message}"


@dataclass(frozen=True)
class ConditionReport:
    checked: tuple[str, ...]
    failures: tuple[Witness, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.failures

    def passed(self, condition: str) -> bool:
        return condition in self.checked and not any(w.condition == condition for w in self.failures)

    def __bool__(self):
        return self.ok


def active_conditions(logic: LogicId) -> tuple[str, ...]:
    return tuple(c for c in CONDITIONS if c not in _OPTIONAL or logic.has(_OPTIONAL[c]))


def check_conditions(m: MModel, logic: LogicId, cs: ConstantSpec) -> ConditionReport:
    """Check E1-E3 always and E4-E7 for the axioms the logic contains."""
    checked = active_conditions(logic)
    base = m.base_terms()
    failures: list[Witness] = []
    for condition in checked:
        failures.extend(_CHECKS[condition](m, logic, cs, base))
    if failures:
        LOGGER.debug("model fails %d condition instances", len(failures))
    return ConditionReport(checked, tuple(failures))


def application_images(m: MModel, base: Iterable[Term]) -> Iterator[tuple[Term, Term, Formula]]:
    """(s, t, A→B) with s, t base terms, A→B ∈ E(s) and A ∈ E(t)."""
    base = tuple(base)
    for s in base:
        for f in sorted(m.E(s), key=sort_key):
            if not isinstance(f, Imp):
                continue
            for t in base:
                if f.antecedent in m.E(t):
                    yield s, t, f


def _e1(m, logic, cs, base):
    for s, t, f in application_images(m, base):
        u = App(s, t)
        if f.consequent not in m.E(u):
            yield Witness(
                "E1", (s, t), (f, f.antecedent),
                f"{print_formula(f)} ∈ E({print_term(s)}) and {print_formula(f.antecedent)} ∈ "
                f"E({print_term(t)}) but {print_formula(f.consequent)} ∉ E({print_term(u)})",
            )


def _e2(m, logic, cs, base):
    for part in base:
        if not m.E(part):
            continue
        for other in base:
            for u in (Sum(part, other), Sum(other, part)):
                for f in sorted(m.E(part) - m.E(u), key=sort_key):
                    yield Witness(
                        "E2", (part, u), (f,),
                        f"{print_formula(f)} ∈ E({print_term(part)}) but ∉ E({print_term(u)})",
                    )


def _e3(m, logic, cs, base):
    for entry in cs:
        if entry.body not in m.E(entry.term):
            yield Witness(
                "E3", (entry.term,), (entry,),
                f"{print_formula(entry)} ∈ CS but {print_formula(entry.body)} ∉ E({print_term(entry.term)})",
            )


def _e4(m, logic, cs, base):
    for t in sorted(m.evidence, key=term_order):
        if BOTTOM in m.E(t):
            yield Witness("E4", (t,), (BOTTOM,), f"⊥ ∈ E({print_term(t)})")
    derived = derived_bottom(m, logic)
    if derived is not None:
        yield Witness(
            "E4", (derived,), (BOTTOM,),
            f"⊥ is forced into E({print_term(derived)}) by the application/introspection closure",
        )


def _e5(m, logic, cs, base):
    for t in base:
        u = Bang(t)
        for a in sorted(m.E(t), key=sort_key):
            required = Just(t, a)
            if required in m.universe and required not in m.E(u):
                yield Witness(
                    "E5", (t,), (a,),
                    f"{print_formula(a)} ∈ E({print_term(t)}) but {print_formula(required)} ∉ E({print_term(u)})",
                )


def negated_justifications(m: MModel) -> Iterator[Neg]:
    for f in sorted(m.universe, key=sort_key):
        if isinstance(f, Neg) and isinstance(f.inner, Just):
            yield f


def _e6(m, logic, cs, base):
    for required in negated_justifications(m):
        t, a = required.inner.term, required.inner.body
        u = BarQuery(t)
        if not forces(m, a, logic) and required not in m.E(u):
            yield Witness(
                "E6", (t,), (a,),
                f"M ⊮ {print_formula(a)} but {print_formula(required)} ∉ E({print_term(u)})",
            )


def _e7(m, logic, cs, base):
    for required in negated_justifications(m):
        t, a = required.inner.term, required.inner.body
        u = Query(t)
        if a not in m.E(t) and required not in m.E(u):
            yield Witness(
                "E7", (t,), (a,),
                f"{print_formula(a)} ∉ E({print_term(t)}) but {print_formula(required)} ∉ E({print_term(u)})",
            )


_CHECKS: Final = {"E1": _e1, "E2": _e2, "E3": _e3, "E4": _e4, "E5": _e5, "E6": _e6, "E7": _e7}


def derived_bottom(m: MModel, logic: LogicId) -> Term | None:
    """A base term or application image that receives ⊥ once base evidence is
    closed under E1, E2 (and E5 with j4).

    Only base terms are grown, so the closure is finite; a model whose
    inconsistency shows up only further out is not detected.
    """
    base = m.base_terms()
    evidence = {t: set(m.E(t)) for t in base}
    introspective = logic.has(Axiom.J4)
    for _ in range(config.EVIDENCE_CLOSURE_CAP):
        closed = MModel(m.valuation, {t: frozenset(fs) for t, fs in evidence.items()}, m.universe)
        for t in base:
            if BOTTOM in evidence[t] and BOTTOM not in m.E(t):
                return t
        for s, t, f in application_images(closed, base):
            if f.consequent == BOTTOM and BOTTOM not in m.E(App(s, t)):
                return App(s, t)
        added = False
        for u in base:
            match u:
                case App(s, t):
                    new = {f.consequent for f in evidence[s] if isinstance(f, Imp) and f.antecedent in evidence[t]}
                case Sum(s, t):
                    new = evidence[s] | evidence[t]
                case Bang(t) if introspective:
                    new = {Just(t, a) for a in evidence[t] if Just(t, a) in m.universe}
                case _:
                    continue
            if not new <= evidence[u]:
                evidence[u] |= new
                added = True
        if not added:
            return None
    LOGGER.warning("evidence closure stopped at the iteration cap")
    return None


def validate_countermodel(m: MModel, root: Formula, logic: LogicId, cs: ConstantSpec) -> bool:
    """True iff the model is admissible, respects CS and refutes root."""
    if forces(m, root, logic):
        return False
    if not all(entry.body in m.E(entry.term) for entry in cs):
        return False
    report = check_conditions(m, logic, cs)
    if not report.ok:
        LOGGER.info("countermodel rejected: %s", report.failures[0])
    return report.ok


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def model_to_json(m: MModel) -> dict:
    return {
        "valuation": {p: int(bool(v)) for p, v in sorted(m.valuation.items())},
        "evidence": [
            {"term": print_term(t), "formulas": [print_formula(f) for f in sorted(fs, key=sort_key)]}
            for t, fs in sorted(m.evidence.items(), key=lambda item: print_term(item[0]))
        ],
        "universe": [print_formula(f) for f in sorted(m.universe, key=sort_key)],
    }


def model_from_json(data: dict, variables=frozenset(), constants=frozenset()) -> MModel:
    evidence = {
        parse_term(item["term"], variables, constants): [
            parse_formula(text, variables, constants) for text in item.get("formulas", [])
        ]
        for item in data.get("evidence", [])
    }
    universe = [parse_formula(text, variables, constants) for text in data.get("universe", [])]
    valuation = {str(p): int(v) for p, v in data.get("valuation", {}).items()}
    return make_model(valuation, evidence, universe)


def save_model(m: MModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_json(m), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def load_model(path: str | Path, variables=frozenset(), constants=frozenset()) -> MModel:
    return model_from_json(json.loads(Path(path).read_text(encoding="utf-8")), variables, constants)
