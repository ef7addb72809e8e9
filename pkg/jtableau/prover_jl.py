"""
Proof search in the JL tableau calculus.

F· is not analytic: its instantiation can be any formula. During expansion
the candidates are the bodies of justification formulas that could feed an
application (the left factor's implications and the right factor's formulas),
taken from the branch and from CS. A rejected countermodel first adds the
formulas it points at, then the wider pool: every branch formula and every
member of the bounded weak subformula closure of the root. Every candidate
has at most instantiation_bound nodes. A search that runs out of candidates
without a valid countermodel answers Unknown.
"""

from __future__ import annotations

import logging
from itertools import chain, takewhile
from typing import Final, Iterator

from .config import Budget
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
from .subformulas import ClosureRequest, ClosureStream
from .syntax import BOTTOM, App, Formula, Imp, Just, Neg, Sum, all_subterms, print_term, size, sort_key
from .tableau import Calculus, Rule, RuleApp

LOGGER: Final = logging.getLogger(__name__)

__all__ = ["JLProver", "prove_jl", "extract_countermodel"]


class JLProver(TableauProver):
    calculus = Calculus.JL

    def __init__(self, goal: Formula, logic: LogicId, cs: ConstantSpec, budget: Budget | None = None):
        super().__init__(goal, logic, cs, budget)
        bound = self.budget.size_bound(size(Neg(goal)))
        self.closure = ClosureStream(ClosureRequest(Neg(goal), cs, logic, bound))

    def expansions(self, view: BranchView) -> Iterator[RuleApp]:
        yield from common_expansions(view, self.logic, self.calculus)
        for f in view.formulas:
            if isinstance(f, Neg) and isinstance(f.inner, Just) and isinstance(f.inner.term, Sum):
                yield view.app(Rule.F_SUM, [f])
        if self.logic.has(Axiom.JD):
            for t in sorted(all_subterms(view.formulas), key=lambda t: (size(Just(t, BOTTOM)), print_term(t))):
                yield view.app(Rule.F_JUST_BOT, (), Just(t, BOTTOM))
        yield from implication_splits(view)
        yield from self.application_splits(view)

    def application_splits(self, view: BranchView) -> Iterator[RuleApp]:
        """F· on each ¬(s·t):B with candidates in increasing size."""
        sources = [f for f in view.positives() if isinstance(f, Just)] + list(self.cs)
        for f in view.negatives():
            match f:
                case Neg(Just(App(s, t), b)):
                    candidates = set()
                    for g in sources:
                        if g.term == s and isinstance(g.body, Imp) and g.body.consequent == b:
                            candidates.add(g.body.antecedent)
                        if g.term == t:
                            candidates.add(g.body)
                    for a in sorted(candidates, key=sort_key):
                        if size(a) <= self.instantiation_bound:
                            yield view.app(Rule.F_APP, [f], a)

    def repairs(self, view: BranchView, m: MModel, failing: Formula) -> Iterator[RuleApp]:
        for _, _, a in application_culprits(m, failing):
            if size(a) <= self.instantiation_bound:
                yield view.app(Rule.F_APP, [failing], a)

    def fallbacks(self, view: BranchView) -> Iterator[RuleApp]:
        targets = [f for f in view.negatives() if isinstance(f.inner, Just) and isinstance(f.inner.term, App)]
        if not targets:
            return
        for a in self.candidate_pool(view):
            for f in targets:
                yield view.app(Rule.F_APP, [f], a)

    def candidate_pool(self, view: BranchView) -> Iterator[Formula]:
        """Branch formulas, then closure members and their negations, within the size cap."""
        cap = self.instantiation_bound
        seen = set()
        on_branch = sorted(set(view.formulas), key=sort_key)
        within = takewhile(lambda f: size(f) <= cap, self.closure)
        for a in chain(on_branch, (g for f in within for g in (f, Neg(f)))):
            if a not in seen and size(a) <= cap:
                seen.add(a)
                yield a


def prove_jl(root: Formula, logic: LogicId, cs: ConstantSpec, budget: Budget | None = None) -> Verdict:
    """Search for a closed JL tableau for ¬root."""
    verdict = JLProver(root, logic, cs, budget).run()
    LOGGER.info("JL search for %s: %s", root, verdict.status)
    return verdict
