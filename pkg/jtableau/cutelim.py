"""
Cut elimination for JLT tableaux with cut.

Rewriting happens on block trees, where premises are formulas rather than
node ids, so a closed subtree stays closed under any larger branch prefix.
Each step takes a minimal cut (no cut below it) of greatest depth and either
removes it, certifies it as PB, pushes it below a rule application that does
not touch the cut formula, or replaces it by cuts of lower rank and cuts of
the same rank but lower weight. Every step re-verifies the rewritten subtree
and the measure of every cut it created.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Final, Sequence

from . import config
from .errors import CutEliminationError, RuleError, UnimplementedCase
from .subformulas import oracle
from .syntax import Formula, Imp, Just, Neg, conjugate, print_formula, rank
from .tableau import (
    Block,
    Calculus,
    Closed,
    Rule,
    Tableau,
    _group,
    branch_closed,
    check_proof,
    conclusions,
    from_blocks,
    to_blocks,
)

LOGGER: Final = logging.getLogger(__name__)

LOWER_RANK: Final = "lower-rank"
SAME_RANK_LOWER_WEIGHT: Final = "same-rank-lower-weight"
BECAME_PB: Final = "became-PB"

_JUSTIFICATION_PARTNERS: Final = frozenset({Rule.F_SUM_L, Rule.F_SUM_R, Rule.F_BANG, Rule.F_BARQUERY, Rule.F_QUERY})

Address = tuple[int, ...]


@dataclass(frozen=True)
class CutSite:
    node_id: int
    address: Address
    cut_formula: Formula
    rank: int
    weight: int
    is_minimal: bool
    is_branch_end: bool
    depth: int

    def __str__(self):
        return (f"cut on {print_formula(self.cut_formula)} at node {self.node_id} "
                f"(rank {self.rank}, weight {self.weight})")


@dataclass(frozen=True)
class MeasureClaim:
    formula: Formula
    rank: int
    weight: int
    relation: str


@dataclass(frozen=True)
class ElimStep:
    case: str
    sub_case: str
    site: CutSite
    before: Block
    after: Block
    claims: tuple[MeasureClaim, ...] = ()

    def __str__(self):
        return f"Case {self.case} [{self.sub_case}] on {self.site}"


# ---------------------------------------------------------------------------
# Block helpers
# ---------------------------------------------------------------------------

def _is_cut_pair(children: Sequence[Block]) -> bool:
    return len(children) == 2 and children[0].rule is Rule.CUT


def _cut(a: Formula, left: tuple[Block, ...], right: tuple[Block, ...]) -> tuple[Block, ...]:
    return (Block((a,), Rule.CUT, (), a, left), Block((Neg(a),), Rule.CUT, (), a, right))


def _contains_cut(children: Sequence[Block]) -> bool:
    return any(c.rule is Rule.CUT or _contains_cut(c.children) for c in children)


def _weight(children: Sequence[Block]) -> int:
    return sum(c.count() for c in children)


def _closed(prefix: Sequence[Formula], cs) -> bool:
    return isinstance(branch_closed(prefix, cs), Closed)


def closes_under(prefix: Sequence[Formula], children: Sequence[Block], cs) -> bool:
    """Schema and closure check of a block subtree hanging below the given branch."""
    if not children:
        return _closed(prefix, cs)
    present = set(prefix)
    first = children[0]
    if any(p not in present for p in first.premises):
        return False
    if len(children) > 2 or any(
        (c.rule, c.premises, c.instantiation) != (first.rule, first.premises, first.instantiation) for c in children
    ):
        return False
    try:
        branches = conclusions(first.rule, list(first.premises), first.instantiation)
    except RuleError:
        return False
    if tuple(c.formulas for c in children) != branches:
        return False
    return all(closes_under([*prefix, *c.formulas], c.children, cs) for c in children)


def _at(block: Block, address: Address) -> Block:
    for i in address:
        block = block.children[i]
    return block


def _prefix(block: Block, address: Address) -> list[Formula]:
    formulas = list(block.formulas)
    for i in address:
        block = block.children[i]
        formulas.extend(block.formulas)
    return formulas


def _set_children(block: Block, address: Address, children: tuple[Block, ...]) -> Block:
    if not address:
        return replace(block, children=children)
    i = address[0]
    kids = list(block.children)
    kids[i] = _set_children(kids[i], address[1:], children)
    return replace(block, children=tuple(kids))


def _node_at(t: Tableau, address: Address) -> int:
    node = t.root
    while len(node.children) == 1 and node.children[0].is_root:
        node = node.children[0]
    for i in address:
        if len(node.children) == 2:
            node = node.children[i]
        else:
            node = _group(t, node.children[0])[-1]
    return node.id


# ---------------------------------------------------------------------------
# Sites and measures
# ---------------------------------------------------------------------------

def _sites(root: Block) -> list[tuple[Address, int]]:
    found = []

    def walk(block: Block, address: Address, depth: int):
        depth += len(block.formulas)
        if _is_cut_pair(block.children):
            found.append((address, depth))
        for i, c in enumerate(block.children):
            walk(c, address + (i,), depth)

    walk(root, (), 0)
    return found


def _site(t: Tableau, root: Block, address: Address, depth: int) -> CutSite:
    block = _at(root, address)
    left, right = block.children
    a = left.instantiation
    return CutSite(
        node_id=_node_at(t, address),
        address=address,
        cut_formula=a,
        rank=rank(a),
        weight=_weight(left.children) + _weight(right.children),
        is_minimal=not _contains_cut(left.children) and not _contains_cut(right.children),
        is_branch_end=not left.children or not right.children,
        depth=depth,
    )


def measure_table(t: Tableau) -> list[CutSite]:
    """Every cut in the tableau with its rank and weight, in node order."""
    root = to_blocks(t)
    return sorted((_site(t, root, a, d) for a, d in _sites(root)), key=lambda s: s.node_id)


def find_minimal_cut(t: Tableau) -> CutSite | None:
    """The deepest minimal cut, smallest node id among equals; None when cut-free."""
    candidates = [s for s in measure_table(t) if s.is_minimal]
    if not candidates:
        return None
    return min(candidates, key=lambda s: (-s.depth, s.node_id))


# ---------------------------------------------------------------------------
# Rewrites
# ---------------------------------------------------------------------------

class _Rewriter:
    def __init__(self, t: Tableau, site: CutSite):
        self.t = t
        self.cs = t.cs
        self.site = site
        self.a = site.cut_formula
        self.root_oracle = oracle(t.root_formula, t.cs)

    def valid(self, prefix, children) -> bool:
        return closes_under(prefix, children, self.cs)

    def cut_or_side(self, prefix, left, right) -> tuple[Block, ...]:
        """A cut on the site formula, or one side alone when that side does not need its cut formula."""
        if self.valid(prefix, left):
            return left
        if self.valid(prefix, right):
            return right
        return _cut(self.a, left, right)

    def rewrite(self, theta: list[Formula], t1, t2) -> tuple[str, str, tuple[Block, ...]]:
        a = self.a
        if _closed(theta, self.cs):
            return "I", "I closed context", ()
        if self.valid(theta, t1):
            return "I", "I unused cut-formula", t1
        if self.valid(theta, t2):
            return "I", "I unused cut-formula", t2
        if not t2 and Neg(Neg(a)) in theta:
            return "I", "I double-negation", (Block((a,), Rule.F_NEG, (Neg(Neg(a)),), None, t1),)
        if (not t1 or not t2) and self.root_oracle.contains(a):
            sub_case = "I CS branch end" if a in self.cs else "I branch end PB"
            return "I", sub_case, (
                Block((a,), Rule.PB, (), a, t1), Block((Neg(a),), Rule.PB, (), a, t2)
            )
        pushed = self.push(a, t1, t2, positive=True) or self.push(Neg(a), t2, t1, positive=False)
        if pushed:
            return pushed
        return self.principal(theta, t1, t2)

    def push(self, own: Formula, side, other, positive: bool):
        """Move the top rule of one side above the cut when it does not use that side's cut formula."""
        if not side or own in side[0].premises:
            return None
        top = side[0]
        if positive:
            kids = tuple(replace(c, children=_cut(self.a, c.children, other)) for c in side)
        else:
            kids = tuple(replace(c, children=_cut(self.a, other, c.children)) for c in side)
        names = {Rule.T_APP: "II-(1)→(2) T· pushdown", Rule.PB: "II-(3)→(4) PB pushdown"}
        return "II", names.get(top.rule, f"II {top.rule} pushdown"), kids

    def principal(self, theta, t1, t2) -> tuple[str, str, tuple[Block, ...]]:
        a = self.a
        if isinstance(a, Neg):
            # the same cut read as a cut on the unnegated formula with the sides swapped
            x = a.inner
            inverted = _drop_double_negation(theta + [x], t2, Neg(a), self.cs)
            case = "III" if t1 else "I"
            name = f"III {t1[0].rule}/F¬" if t1 else "I double-negation"
            return case, name, _cut(x, inverted, t1)
        if not t1 or not t2:
            raise UnimplementedCase("branch end with no known rewrite", self.site.node_id, "I")
        top1, top2 = t1[0], t2[0]
        match a:
            case Imp(x, y):
                if top1.rule is not Rule.T_IMP or top2.rule is not Rule.F_IMP:
                    raise UnimplementedCase(f"no rewrite for {top1.rule}/{top2.rule}", self.site.node_id, "III")
                # standard propositional transformation for implication cuts
                s1a, s1b = t1[0].children, t1[1].children
                s2 = top2.children
                p = self.cut_or_side(theta + [x, Neg(y)], t1, s2)
                qa = self.cut_or_side(theta + [Neg(x)], s1a, t2)
                qb = self.cut_or_side(theta + [y], s1b, t2)
                return "III", "III T→/F→", _cut(x, _cut(y, qb, p), qa)
            case Just(_, _):
                if top1.rule is Rule.T_APP:
                    if not self.root_oracle.contains(a):
                        raise CutEliminationError(
                            f"T· premise {print_formula(a)} is outside the subformula closure of the root",
                            self.site.node_id, "III two-premise-(5)/(6)",
                        )
                    return "III", "III two-premise-(5)/(6)", (
                        Block((a,), Rule.PB, (), a, t1), Block((Neg(a),), Rule.PB, (), a, t2)
                    )
                if top1.rule in (Rule.T_JUST, Rule.T_JUST_BOT) and top2.rule in _JUSTIFICATION_PARTNERS:
                    return self.justification_pair(theta, t1, t2)
        raise UnimplementedCase(f"no rewrite for {top1.rule}/{top2.rule}", self.site.node_id, "III")

    def justification_pair(self, theta, t1, t2) -> tuple[str, str, tuple[Block, ...]]:
        a = self.a
        top1, top2 = t1[0], t2[0]
        c1, s1 = top1.formulas[0], top1.children
        c2, s2 = top2.formulas[0], top2.children
        other = conjugate(c2)
        x = c2.inner if isinstance(c2, Neg) else c2
        on_c2 = self.cut_or_side(theta + [c2], t1, s2)
        if other == c1:
            on_other = self.cut_or_side(theta + [other], s1, t2)
        elif isinstance(other, Just) and other.body == c1:
            on_other = (Block((c1,), top1.rule, (other,), None, self.cut_or_side(theta + [other, c1], s1, t2)),)
        elif isinstance(c1, Neg) and isinstance(c1.inner, Just) and conjugate(c1.inner.body) == other:
            d = c1.inner
            body = d.body
            on_other = _cut(
                d,
                (Block((body,), Rule.T_JUST, (d,)),),
                self.cut_or_side(theta + [other, c1], s1, t2),
            )
        else:
            raise UnimplementedCase(f"no rewrite for {top1.rule}/{top2.rule}", self.site.node_id, "III")
        sub_case = f"III {top1.rule}/{top2.rule}"
        if top1.rule is Rule.T_JUST_BOT:
            sub_case += "-(7)→(8)"
        if c2 == x:
            return "III", sub_case, _cut(x, on_c2, on_other)
        return "III", sub_case, _cut(x, on_other, on_c2)


def _drop_double_negation(prefix: list[Formula], children: tuple[Block, ...], dneg: Formula, cs) -> tuple[Block, ...]:
    """Rewrite a subtree that used ¬¬X so that it runs on X instead."""
    if not children:
        if not _closed(prefix, cs) and Neg(dneg) in prefix:
            return (Block((dneg.inner,), Rule.F_NEG, (Neg(dneg),)),)
        return ()
    first = children[0]
    if first.rule is Rule.F_NEG and first.premises == (dneg,) and dneg.inner.inner in prefix:
        return _drop_double_negation(prefix, first.children, dneg, cs)
    return tuple(
        replace(c, children=_drop_double_negation(prefix + list(c.formulas), c.children, dneg, cs))
        for c in children
    )


def _verify_claims(rewriter: _Rewriter, case: str, new: tuple[Block, ...]) -> tuple[MeasureClaim, ...]:
    site = rewriter.site
    claims = []
    region = Block((), None, (), None, new)
    for address, _ in _sites(region):
        left, right = _at(region, address).children
        a = left.instantiation
        r, w = rank(a), _weight(left.children) + _weight(right.children)
        if r < site.rank:
            relation = LOWER_RANK
        elif r == site.rank and w < site.weight:
            relation = SAME_RANK_LOWER_WEIGHT
        else:
            raise CutEliminationError(
                f"new cut on {print_formula(a)} has rank {r} and weight {w}, not below {site.rank}/{site.weight}",
                site.node_id, case,
            )
        claims.append(MeasureClaim(a, r, w, relation))
    if len(new) == 2 and new[0].rule is Rule.PB and new[0].instantiation == site.cut_formula:
        if not rewriter.root_oracle.contains(site.cut_formula):
            raise CutEliminationError("certified PB formula is not a subformula of the root", site.node_id, case)
        claims.append(MeasureClaim(site.cut_formula, site.rank, site.weight, BECAME_PB))
    return tuple(claims)


def eliminate_step(t: Tableau, site: CutSite) -> tuple[Tableau, ElimStep]:
    """Rewrite one minimal cut and check the result and its measure claims."""
    if not site.is_minimal:
        raise CutEliminationError("only minimal cuts can be rewritten", site.node_id)
    root = to_blocks(t)
    block = _at(root, site.address)
    left, right = block.children
    theta = _prefix(root, site.address)
    rewriter = _Rewriter(t, site)
    case, sub_case, new = rewriter.rewrite(theta, left.children, right.children)
    if not closes_under(theta, new, t.cs):
        raise CutEliminationError("rewritten subtree does not close", site.node_id, sub_case)
    claims = _verify_claims(rewriter, case, new)
    rewritten = from_blocks(_set_children(root, site.address, new), Calculus.JLT_PLUS_CUT, t.logic, t.cs)
    step = ElimStep(case, sub_case, site, block, replace(block, children=new), claims)
    LOGGER.debug("%s", step)
    return rewritten, step


# ---------------------------------------------------------------------------
# Whole proofs
# ---------------------------------------------------------------------------

def prune(prefix: list[Formula], children: tuple[Block, ...], cs) -> tuple[Block, ...]:
    """Cut subtrees off at early closure and drop steps and splits nothing below uses."""
    if _closed(prefix, cs) or not children:
        return ()
    if len(children) == 1:
        b = children[0]
        sub = prune(prefix + list(b.formulas), b.children, cs)
        if closes_under(prefix, sub, cs):
            return sub
        return (replace(b, children=sub),)
    subs = [prune(prefix + list(c.formulas), c.children, cs) for c in children]
    for sub in subs:
        if closes_under(prefix, sub, cs):
            return sub
    return tuple(replace(c, children=s) for c, s in zip(children, subs))


def replay_under(t: Tableau, extra: Sequence[Formula]) -> Tableau:
    """The same proof below a larger root; closure and the count of non-root nodes are kept."""
    root = to_blocks(t)
    widened = replace(root, formulas=root.formulas + tuple(f for f in extra if f not in root.formulas))
    return from_blocks(widened, t.calculus, t.logic, t.cs)


def eliminate_all(t: Tableau, trace: list[ElimStep] | None = None,
                  on_step: Callable[[Tableau, ElimStep], None] | None = None,
                  max_steps: int = config.CUTELIM_MAX_STEPS) -> Tableau:
    """Remove every cut; the result is checked under JLT. A cut-free input comes back unchanged."""
    if t.calculus is Calculus.JL:
        raise CutEliminationError("cut elimination works on JLT or JLT_plus_cut proofs, got a JL proof")
    report = check_proof(t)
    if not report.ok:
        raise CutEliminationError(f"input is not a valid proof: {report.defects[0]}")
    current = t
    steps = 0
    while (site := find_minimal_cut(current)) is not None:
        if steps == max_steps:
            raise CutEliminationError(f"gave up after {max_steps} rewrite steps", site.node_id)
        current, step = eliminate_step(current, site)
        steps += 1
        if trace is not None:
            trace.append(step)
        if on_step is not None:
            on_step(current, step)
    if steps:
        root = to_blocks(current)
        root = replace(root, children=prune(list(root.formulas), root.children, t.cs))
        result = from_blocks(root, Calculus.JLT, t.logic, t.cs)
    else:
        result = Tableau(t.root, Calculus.JLT, t.logic, t.cs, t.next_id)
    final = check_proof(result)
    if not final.ok:
        raise CutEliminationError(f"cut-free result fails the JLT check: {final.defects[0]}")
    LOGGER.info("cut elimination finished after %d steps with %d nodes", steps, result.size)
    return result


def cut_count(t: Tableau) -> int:
    return len(_sites(to_blocks(t)))
