"""
Proof search in the analytic JLT calculus.

T· fires only when both premises and the conclusion are JL_CS-subformulas
of the root. PB is applied lazily: only when a saturated branch yields a
rejected countermodel. It first splits on the smallest admissible formula the
rejection points at, then on the smallest undecided member of the bounded
subformula closure. With allow_cut the search may fall back to CUT on
formulas outside the closure.
"""

from __future__ import annotations

import logging
from typing import Final, Iterator

from .config import Budget
from .errors import JTableauError
from .logics import Axiom, ConstantSpec, LogicId
from .search import (
    BranchView,
    TableauProver,
    Verdict,
    application_culprits,
    common_expansions,
    extract_countermodel,
    implication_splits,
)
from .semantics import MModel
from .subformulas import ClosureRequest, ClosureStream, oracle
from .syntax import App, Bottom, Formula, Imp, Just, Neg, Sum, print_formula, size
from .tableau import Calculus, Rule, RuleApp, Tableau

LOGGER: Final = logging.getLogger(__name__)

__all__ = ["AnalyticProver", "prove_analytic", "extract_countermodel_analytic", "weak_subformula_scan"]


def weak_subformula_scan(t: Tableau) -> list[tuple[int, Formula]]:
    """Nodes whose formula is not a weak JL_CS-subformula of the root."""
    o = oracle(t.root_formula, t.cs)
    return [(node_id, t.index[node_id].formula) for node_id in sorted(t.index)
            if not o.weak_contains(t.index[node_id].formula)]


class AnalyticProver(TableauProver):
    def __init__(self, goal: Formula, logic: LogicId, cs: ConstantSpec, budget: Budget | None = None,
                 allow_cut: bool = False):
        super().__init__(goal, logic, cs, budget)
        self.allow_cut = allow_cut
        self.calculus = Calculus.JLT_PLUS_CUT if allow_cut else Calculus.JLT
        self.oracle = oracle(Neg(goal), cs)
        self.pb_bound = self.budget.size_bound(size(Neg(goal)))
        self.pb_pool = ClosureStream(ClosureRequest(Neg(goal), cs, logic, self.pb_bound))

    def admissible(self, f: Formula) -> bool:
        return self.oracle.contains(f)

    def expansions(self, view: BranchView) -> Iterator[RuleApp]:
        yield from common_expansions(view, self.logic, self.calculus)
        for f in view.formulas:
            match f:
                case Neg(Just(Sum(_, _), _)):
                    yield view.app(Rule.F_SUM_L, [f])
                    yield view.app(Rule.F_SUM_R, [f])
                case Just(_, Bottom()) if self.logic.has(Axiom.JD):
                    yield view.app(Rule.T_JUST_BOT, [f])
        yield from self.application_steps(view)
        yield from implication_splits(view)

    def application_steps(self, view: BranchView) -> Iterator[RuleApp]:
        """T· on branch pairs s:(A→B), t:A whose conclusion stays inside the subformula closure."""
        justified = [f for f in view.positives() if isinstance(f, Just)]
        for major in justified:
            if not isinstance(major.body, Imp):
                continue
            for minor in justified:
                if minor.body != major.body.antecedent:
                    continue
                conclusion = Just(App(major.term, minor.term), major.body.consequent)
                if all(self.admissible(g) for g in (major, minor, conclusion)):
                    yield view.app(Rule.T_APP, [major, minor])

    def split_on(self, view: BranchView, f: Formula) -> RuleApp | None:
        if f in view.present or Neg(f) in view.present:
            return None
        if self.admissible(f) and size(f) <= self.pb_bound:
            return view.app(Rule.PB, (), f)
        if self.allow_cut and size(f) <= self.instantiation_bound:
            return view.app(Rule.CUT, (), f)
        return None

    def repairs(self, view: BranchView, m: MModel, failing: Formula) -> Iterator[RuleApp]:
        for s, t, a in application_culprits(m, failing):
            for f in sorted((Just(s, Imp(a, failing.inner.body)), Just(t, a)), key=size):
                app = self.split_on(view, f)
                if app is not None:
                    yield app

    def fallbacks(self, view: BranchView) -> Iterator[RuleApp]:
        for f in self.pb_pool:
            if isinstance(f, Neg) or f in view.present or Neg(f) in view.present:
                continue
            yield view.app(Rule.PB, (), f)

    def certify(self, t: Tableau) -> None:
        super().certify(t)
        if self.allow_cut:
            return
        violations = weak_subformula_scan(t)
        if violations:
            node_id, f = violations[0]
            raise JTableauError(f"node {node_id} breaks the subformula property: {print_formula(f)}")


def prove_analytic(root: Formula, logic: LogicId, cs: ConstantSpec, budget: Budget | None = None,
                   allow_cut: bool = False) -> Verdict:
    """Search for a closed JLT tableau for ¬root (JLT_plus_cut with allow_cut)."""
    verdict = AnalyticProver(root, logic, cs, budget, allow_cut).run()
    LOGGER.info("%s search for %s: %s", "JLT+cut" if allow_cut else "JLT", root, verdict.status)
    return verdict


def extract_countermodel_analytic(branch, root: Formula, logic: LogicId, cs: ConstantSpec) -> MModel:
    """Countermodel from an open saturated JLT branch; ExtractionFailed when none validates."""
    return extract_countermodel(branch, root, logic, cs)
