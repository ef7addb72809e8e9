"""
Proof search shared by the JL and JLT provers.

The search works depth first over the open leaves of a persistent tableau.
Each leaf is extended by the first fresh rule application the strategy
proposes until it closes or saturates. A saturated open leaf yields a
countermodel candidate; when the candidate fails validation, the strategy
may propose a repair application aimed at the failure, or else a fallback
split drawn from its candidate pool, and the search continues on that leaf.
"""

from __future__ import annotations

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Final, Iterable, Iterator, Sequence

from . import config
from .config import Budget
from .errors import ExtractionFailed, JTableauError, RuleError
from .logics import Axiom, ConstantSpec, LogicId, check_admissible
from .semantics import MModel, application_images, check_conditions, forces, make_model, validate_countermodel
from .syntax import (
    App,
    Atom,
    BarQuery,
    Bang,
    Formula,
    Imp,
    Just,
    Neg,
    Query,
    Sum,
    Term,
    print_formula,
    sort_key,
)
from .tableau import (
    BRANCHING,
    Calculus,
    Closed,
    Node,
    Rule,
    RuleApp,
    Tableau,
    apply_rule,
    branch_closed,
    check_proof,
    conclusions,
    new_tableau,
)

LOGGER: Final = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchStats:
    nodes: int = 0
    applications: int = 0
    repairs: int = 0
    elapsed: float = 0.0


@dataclass(frozen=True)
class Proved:
    tableau: Tableau
    stats: SearchStats = field(default_factory=SearchStats)

    status = "Proved"


@dataclass(frozen=True)
class Open:
    tableau: Tableau
    leaf: int
    branch: tuple[Formula, ...]
    model: MModel
    stats: SearchStats = field(default_factory=SearchStats)

    status = "Open"


@dataclass(frozen=True)
class Unknown:
    reason: str
    tableau: Tableau | None = None
    stats: SearchStats = field(default_factory=SearchStats)

    status = "Unknown"


Verdict = Proved | Open | Unknown

EXIT_CODES: Final = {"Proved": 0, "Open": 1, "Unknown": 2}


# ---------------------------------------------------------------------------
# Branch view
# ---------------------------------------------------------------------------

class BranchView:
    """Formulas of one root-to-leaf path with the nearest node carrying each."""

    def __init__(self, t: Tableau, path: Sequence[Node]):
        self.tableau = t
        self.path = list(path)
        self.leaf = self.path[-1].id
        self.formulas = [n.formula for n in self.path]
        self.present = set(self.formulas)
        self.node_of: dict[Formula, int] = {}
        for n in self.path:
            self.node_of[n.formula] = n.id

    def positives(self) -> list[Formula]:
        return [f for f in self._ordered() if not isinstance(f, Neg)]

    def negatives(self) -> list[Formula]:
        return [f for f in self._ordered() if isinstance(f, Neg)]

    def _ordered(self) -> list[Formula]:
        seen, out = set(), []
        for f in self.formulas:
            if f not in seen:
                seen.add(f)
                out.append(f)
        return out

    def app(self, rule: Rule, premises: Sequence[Formula] = (), instantiation: Formula | None = None) -> RuleApp:
        return RuleApp(rule, tuple(self.node_of[p] for p in premises), instantiation)

    def is_fresh(self, app: RuleApp) -> bool:
        """False when the application would add nothing new to this branch."""
        premises = [self.tableau.node(pid).formula for pid in app.premises]
        branches = conclusions(app.rule, premises, app.instantiation)
        if app.rule in BRANCHING:
            return not any(f in self.present for branch in branches for f in branch)
        return any(f not in self.present for f in branches[0])


# ---------------------------------------------------------------------------
# Countermodels
# ---------------------------------------------------------------------------

def _extraction_universe(branch: Sequence[Formula], goal: Formula, cs: ConstantSpec) -> set[Formula]:
    return {goal, *branch, *cs.entries}


def saturate_evidence(seed: dict[Term, set[Formula]], universe: frozenset[Formula], logic: LogicId,
                      valuation: dict[str, int], cs: ConstantSpec) -> dict[Term, set[Formula]]:
    """Close seeded evidence under the admissibility conditions.

    Base terms come from the universe and stay fixed; their one-step images
    receive what the conditions require of them but never act as premises.
    """
    evidence = {t: set(fs) for t, fs in seed.items()}
    for entry in cs:
        evidence.setdefault(entry.term, set()).add(entry.body)
    base = MModel(valuation, {t: frozenset(fs) for t, fs in evidence.items()}, universe).base_terms()
    negated = sorted(
        (f for f in universe if isinstance(f, Neg) and isinstance(f.inner, Just)), key=sort_key
    )
    for _ in range(config.EVIDENCE_CLOSURE_CAP):
        changed = False

        def add(term: Term, f: Formula):
            nonlocal changed
            target = evidence.setdefault(term, set())
            if f not in target:
                target.add(f)
                changed = True

        model = MModel(valuation, {k: frozenset(v) for k, v in evidence.items()}, universe)
        for s, t, f in application_images(model, base):
            add(App(s, t), f.consequent)
        for part in base:
            for f in sorted(evidence.get(part, ()), key=sort_key):
                for other in base:
                    add(Sum(part, other), f)
                    add(Sum(other, part), f)
        if logic.has(Axiom.J4):
            for t in base:
                for a in sorted(evidence.get(t, ()), key=sort_key):
                    if Just(t, a) in universe:
                        add(Bang(t), Just(t, a))
        for f in negated:
            t, a = f.inner.term, f.inner.body
            if logic.has(Axiom.J5) and a not in evidence.get(t, ()):
                add(Query(t), f)
            if logic.has(Axiom.JB) and not forces(model, a, logic):
                add(BarQuery(t), f)
        if not changed:
            return evidence
    LOGGER.warning("evidence saturation stopped at the iteration cap")
    return evidence


def build_countermodel(branch: Sequence[Formula], goal: Formula, logic: LogicId, cs: ConstantSpec) -> MModel:
    """Candidate model of an open branch: true atoms are those on the branch,
    evidence is seeded from the justification formulas on it and saturated."""
    valuation = {f.name: 1 for f in branch if isinstance(f, Atom)}
    seed: dict[Term, set[Formula]] = {}
    for f in branch:
        if isinstance(f, Just):
            seed.setdefault(f.term, set()).add(f.body)
    skeleton = make_model(valuation, {}, _extraction_universe(branch, goal, cs))
    universe = skeleton.universe
    for fs in seed.values():
        universe = universe | make_model({}, {}, fs).universe
    evidence = saturate_evidence(seed, universe, logic, valuation, cs)
    return make_model(valuation, evidence, universe)


def failing_formulas(m: MModel, branch: Iterable[Formula], logic: LogicId) -> list[Formula]:
    return sorted({f for f in branch if not forces(m, f, logic)}, key=sort_key)


def countermodel_problem(m: MModel, branch: Sequence[Formula], goal: Formula, logic: LogicId,
                         cs: ConstantSpec) -> str | None:
    """Why a candidate model is not a countermodel, or None when it is one."""
    failing = failing_formulas(m, branch, logic)
    if failing:
        return f"candidate model does not satisfy {print_formula(failing[0])}"
    if not validate_countermodel(m, goal, logic, cs):
        report = check_conditions(m, logic, cs)
        return f"candidate model rejected: {report.failures[0] if report.failures else 'it forces the goal'}"
    return None


def extract_countermodel(branch: Sequence[Formula], goal: Formula, logic: LogicId, cs: ConstantSpec) -> MModel:
    """A validated countermodel for goal from an open saturated branch, or ExtractionFailed."""
    m = build_countermodel(branch, goal, logic, cs)
    problem = countermodel_problem(m, branch, goal, logic, cs)
    if problem:
        raise ExtractionFailed(problem)
    return m


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------

class TableauProver(ABC):
    """Depth-first saturation with countermodel repair; subclasses supply the rules."""

    calculus: Calculus

    def __init__(self, goal: Formula, logic: LogicId, cs: ConstantSpec, budget: Budget | None = None):
        check_admissible(logic, goal)
        for entry in cs:
            check_admissible(logic, entry)
        self.goal = goal
        self.logic = logic
        self.cs = cs
        self.budget = budget or Budget.from_env()
        self.instantiation_bound = self.budget.instantiation_bound

    @abstractmethod
    def expansions(self, view: BranchView) -> Iterator[RuleApp]:
        """Candidate applications for the branch in priority order."""

    @abstractmethod
    def repairs(self, view: BranchView, m: MModel, failing: Formula) -> Iterator[RuleApp]:
        """Applications that may remove the reason a branch formula is not forced."""

    def next_application(self, view: BranchView) -> RuleApp | None:
        for app in self.expansions(view):
            if view.is_fresh(app):
                return app
        return None

    def find_repair(self, view: BranchView, m: MModel) -> RuleApp | None:
        for failing in failing_formulas(m, view.formulas, self.logic):
            for app in self.repairs(view, m, failing):
                if view.is_fresh(app):
                    return app
        return None

    def fallbacks(self, view: BranchView) -> Iterator[RuleApp]:
        """Branching applications tried once repairs run out, smallest first."""
        return iter(())

    def find_fallback(self, view: BranchView) -> RuleApp | None:
        for app in self.fallbacks(view):
            if view.is_fresh(app):
                return app
        return None

    def certify(self, t: Tableau) -> None:
        """Re-check a finished proof; RuleError on any defect."""
        report = check_proof(t)
        if not report.ok:
            raise RuleError(f"search produced an invalid proof: {report.defects[0]}")

    def run(self) -> Verdict:
        started = time.perf_counter()
        t = new_tableau([Neg(self.goal)], self.calculus, self.logic, self.cs)
        stack = [t.next_id - 1]
        applications = repairs = 0

        def stats() -> SearchStats:
            return SearchStats(t.size, applications, repairs, time.perf_counter() - started)

        while stack:
            leaf = stack.pop()
            while True:
                if t.size > self.budget.max_nodes:
                    return Unknown(f"node budget of {self.budget.max_nodes} exhausted", t, stats())
                path = t.path_to(leaf)
                if isinstance(branch_closed([n.formula for n in path], self.cs), Closed):
                    break
                if len(path) > self.budget.max_depth:
                    return Unknown(f"branch depth budget of {self.budget.max_depth} exhausted", t, stats())
                view = BranchView(t, path)
                app = self.next_application(view)
                if app is None:
                    m = build_countermodel(view.formulas, self.goal, self.logic, self.cs)
                    problem = countermodel_problem(m, view.formulas, self.goal, self.logic, self.cs)
                    if problem is None:
                        LOGGER.info("open branch at node %d", leaf)
                        return Open(t, leaf, tuple(view.formulas), m, stats())
                    app = self.find_repair(view, m) or self.find_fallback(view)
                    if app is None:
                        LOGGER.info("saturated branch at node %d gives no countermodel: %s", leaf, problem)
                        return Unknown(f"countermodel extraction failed: {problem}", t, stats())
                    repairs += 1
                first = t.next_id
                try:
                    t = apply_rule(t, leaf, app, unrestricted=False)
                except JTableauError as e:
                    return Unknown(f"rule application failed: {e}", t, stats())
                applications += 1
                if app.rule in BRANCHING:
                    stack.append(first + 1)
                    leaf = first
                else:
                    leaf = t.next_id - 1
        LOGGER.info("proof found with %d nodes", t.size)
        self.certify(t)
        return Proved(t, stats())


def common_expansions(view: BranchView, logic: LogicId, calculus: Calculus) -> Iterator[RuleApp]:
    """Non-branching applications both calculi share, in branch order."""
    for f in view.formulas:
        match f:
            case Neg(Neg(_)):
                yield view.app(Rule.F_NEG, [f])
            case Neg(Imp(_, _)):
                yield view.app(Rule.F_IMP, [f])
            case Just(_, body) if logic.has(Axiom.JT):
                yield view.app(Rule.T_JUST, [f])
            case Neg(Just(Bang(t), Just(t2, _))) if t == t2 and logic.has(Axiom.J4):
                yield view.app(Rule.F_BANG, [f])
            case Neg(Just(BarQuery(t), Neg(Just(t2, _)))) if t == t2 and logic.has(Axiom.JB):
                yield view.app(Rule.F_BARQUERY, [f])
            case Neg(Just(Query(t), Neg(Just(t2, _)))) if t == t2 and logic.has(Axiom.J5):
                yield view.app(Rule.F_QUERY, [f])


def implication_splits(view: BranchView) -> Iterator[RuleApp]:
    for f in view.formulas:
        if isinstance(f, Imp):
            yield view.app(Rule.T_IMP, [f])


def application_culprits(m: MModel, failing: Formula) -> list[tuple[Term, Term, Formula]]:
    """For a failing ¬(s·t):B, the (s, t, A) with A→B ∈ E(s) and A ∈ E(t), smallest A first."""
    match failing:
        case Neg(Just(App(s, t), b)):
            found = [
                (s, t, f.antecedent) for f in m.E(s)
                if isinstance(f, Imp) and f.consequent == b and f.antecedent in m.E(t)
            ]
            return sorted(found, key=lambda item: sort_key(item[2]))
    return []


def prove(goal: Formula, logic: LogicId, cs: ConstantSpec, calculus: Calculus | str = Calculus.JL,
          budget: Budget | None = None) -> Verdict:
    """Run the prover for the calculus."""
    from .prover_analytic import AnalyticProver
    from .prover_jl import JLProver

    provers = {Calculus.JL: JLProver, Calculus.JLT: AnalyticProver}
    calculus = Calculus(calculus)
    if calculus not in provers:
        raise JTableauError(f"no prover for calculus {calculus}; JLT_plus_cut proofs come from translation")
    return provers[calculus](goal, logic, cs, budget).run()
