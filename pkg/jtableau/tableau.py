"""
Tableaux for justification logics: trees, rule schemas, closure and checking.

A tableau is a persistent tree of numbered nodes. Each non-root node records
the rule application that produced it. Branching rules give the application
point two children carrying the same record; non-branching rules with two
conclusions give a chain of two nodes carrying the same record.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from ._compat import StrEnum
from functools import cached_property
from pathlib import Path
from typing import Final, Iterator, Sequence

from .errors import ParseError, RuleError
from .logics import Axiom, ConstantSpec, LogicId, build_cs, cs_member, parse_logic
from .subformulas import oracle
from .syntax import (
    BOTTOM,
    App,
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
    Var,
    VARIABLE_LETTERS,
    all_subterms,
    parse_formula,
    print_formula,
    subterms,
    terms_of,
)

LOGGER: Final = logging.getLogger(__name__)


class Calculus(StrEnum):
    JL = "JL"
    JLT = "JLT"
    JLT_PLUS_CUT = "JLT_plus_cut"


class Rule(StrEnum):
    F_NEG = "F¬"
    F_IMP = "F→"
    T_IMP = "T→"
    F_SUM = "F+"
    F_APP = "F·"
    T_JUST = "T:"
    F_JUST_BOT = "F:⊥"
    F_BANG = "F!"
    F_BARQUERY = "F?̄"
    F_QUERY = "F?"
    F_SUM_L = "F+L"
    F_SUM_R = "F+R"
    T_APP = "T·"
    PB = "PB"
    CUT = "CUT"
    T_JUST_BOT = "T:⊥"

    @classmethod
    def parse(cls, name: str) -> Rule:
        name = _RULE_ALIASES.get(name, name)
        try:
            return cls(name)
        except ValueError:
            raise ParseError(f"unknown rule name {name!r}") from None


_RULE_ALIASES: Final = {
    "F~": "F¬", "F->": "F→", "T->": "T→", "F*": "F·", "T*": "T·", "F:False": "F:⊥",
    "T:False": "T:⊥", "F@": "F?̄", "F+l": "F+L", "F+r": "F+R", "cut": "CUT",
}

BRANCHING: Final = frozenset({Rule.T_IMP, Rule.F_APP, Rule.PB, Rule.CUT})
ZERO_PREMISE: Final = frozenset({Rule.F_JUST_BOT, Rule.PB, Rule.CUT})
ROOT_LABEL: Final = "Root"

_PROPOSITIONAL: Final = frozenset({Rule.F_NEG, Rule.F_IMP, Rule.T_IMP})
_AXIOM_RULES: Final = {Axiom.J4: Rule.F_BANG, Axiom.JB: Rule.F_BARQUERY, Axiom.J5: Rule.F_QUERY,
                       Axiom.JT: Rule.T_JUST}


def rules_for(calculus: Calculus, logic: LogicId) -> frozenset[Rule]:
    """Rules of the calculus for the logic; under jD the analytic calculi use T:⊥ instead of F:⊥."""
    rules = set(_PROPOSITIONAL)
    rules.update(rule for axiom, rule in _AXIOM_RULES.items() if logic.has(axiom))
    if calculus is Calculus.JL:
        rules.update({Rule.F_SUM, Rule.F_APP})
        if logic.has(Axiom.JD):
            rules.add(Rule.F_JUST_BOT)
    else:
        rules.update({Rule.F_SUM_L, Rule.F_SUM_R, Rule.T_APP, Rule.PB})
        if logic.has(Axiom.JD):
            rules.add(Rule.T_JUST_BOT)
        if calculus is Calculus.JLT_PLUS_CUT:
            rules.add(Rule.CUT)
    return frozenset(rules)


# ---------------------------------------------------------------------------
# Rule schemas
# ---------------------------------------------------------------------------

def conclusions(rule: Rule, premises: Sequence[Formula], instantiation: Formula | None = None,
                ) -> tuple[tuple[Formula, ...], ...]:
    """Conclusion branches of one application; RuleError on a schema mismatch."""
    shape = f"{rule} does not apply to {', '.join(print_formula(p) for p in premises) or 'no premises'}"
    expected = 0 if rule in ZERO_PREMISE else 2 if rule is Rule.T_APP else 1
    if len(premises) != expected:
        raise RuleError(f"{rule} takes {expected} premise(s), got {len(premises)}")
    if rule in ZERO_PREMISE or rule is Rule.F_APP:
        if instantiation is None:
            raise RuleError(f"{rule} needs an instantiation")
    elif instantiation is not None:
        raise RuleError(f"{rule} takes no instantiation")
    p = premises[0] if premises else None
    match rule, p:
        case Rule.F_NEG, Neg(Neg(a)):
            return ((a,),)
        case Rule.F_IMP, Neg(Imp(a, b)):
            return ((a, Neg(b)),)
        case Rule.T_IMP, Imp(a, b):
            return ((Neg(a),), (b,))
        case Rule.F_SUM, Neg(Just(Sum(t, s), a)):
            return ((Neg(Just(t, a)), Neg(Just(s, a))),)
        case Rule.F_SUM_L, Neg(Just(Sum(t, _), a)):
            return ((Neg(Just(t, a)),),)
        case Rule.F_SUM_R, Neg(Just(Sum(_, s), a)):
            return ((Neg(Just(s, a)),),)
        case Rule.F_APP, Neg(Just(App(s, t), b)):
            a = instantiation
            return ((Neg(Just(s, Imp(a, b))),), (Neg(Just(t, a)),))
        case Rule.T_JUST, Just(_, a):
            return ((a,),)
        case Rule.T_JUST_BOT, Just(_, Bottom()):
            return ((BOTTOM,),)
        case Rule.F_BANG, Neg(Just(Bang(t), Just(t2, a))) if t == t2:
            return ((Neg(Just(t, a)),),)
        case Rule.F_BARQUERY, Neg(Just(BarQuery(t), Neg(Just(t2, a)))) if t == t2:
            return ((a,),)
        case Rule.F_QUERY, Neg(Just(Query(t), Neg(Just(t2, a)))) if t == t2:
            return ((Just(t, a),),)
        case Rule.T_APP, _:
            return ((_application(premises[0], premises[1]),),)
        case Rule.F_JUST_BOT, None:
            if not (isinstance(instantiation, Just) and isinstance(instantiation.body, Bottom)):
                raise RuleError(f"F:⊥ instantiation must have the form t:⊥, got {print_formula(instantiation)}")
            return ((Neg(instantiation),),)
        case (Rule.PB | Rule.CUT), None:
            return ((instantiation,), (Neg(instantiation),))
    raise RuleError(shape)


def _application(first: Formula, second: Formula) -> Formula:
    for major, minor in ((first, second), (second, first)):
        match major, minor:
            case Just(s, Imp(a, b)), Just(t, a2) if a == a2:
                return Just(App(s, t), b)
    raise RuleError(f"T· needs s:(A→B) and t:A, got {print_formula(first)} and {print_formula(second)}")


# ---------------------------------------------------------------------------
# Branch closure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Closed:
    reason: str
    witness: Formula

    def __str__(self):
        return f"closed ({self.reason}: {print_formula(self.witness)})"


@dataclass(frozen=True)
class OpenBranch:
    def __str__(self):
        return "open"


OPEN: Final = OpenBranch()
BranchStatus = Closed | OpenBranch


def branch_closed(branch: Sequence[Formula], cs: ConstantSpec) -> BranchStatus:
    """Closed when ⊥ occurs, when some A and ¬A both occur, or when ¬c:F occurs with c:F in CS."""
    present = set(branch)
    if BOTTOM in present:
        return Closed("bottom", BOTTOM)
    for f in branch:
        if Neg(f) in present:
            return Closed("contradiction", f)
    for f in branch:
        if isinstance(f, Neg) and cs_member(cs, f.inner):
            return Closed("cs_refutation", f.inner)
    return OPEN


# ---------------------------------------------------------------------------
# Tableau values
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RuleApp:
    rule: Rule
    premises: tuple[int, ...] = ()
    instantiation: Formula | None = None


@dataclass(frozen=True)
class Node:
    id: int
    formula: Formula
    app: RuleApp | None = None
    children: tuple[Node, ...] = ()

    @property
    def is_root(self) -> bool:
        return self.app is None


@dataclass(frozen=True)
class Tableau:
    root: Node
    calculus: Calculus
    logic: LogicId
    cs: ConstantSpec
    next_id: int

    @cached_property
    def index(self) -> dict[int, Node]:
        found = {}
        stack = [self.root]
        while stack:
            n = stack.pop()
            found[n.id] = n
            stack.extend(n.children)
        return found

    @cached_property
    def parents(self) -> dict[int, int]:
        found = {}
        for n in self.index.values():
            for c in n.children:
                found[c.id] = n.id
        return found

    @property
    def size(self) -> int:
        return len(self.index)

    def node(self, node_id: int) -> Node:
        try:
            return self.index[node_id]
        except KeyError:
            raise RuleError("no such node", node_id) from None

    def path_to(self, node_id: int) -> list[Node]:
        self.node(node_id)
        ids = [node_id]
        while ids[-1] in self.parents:
            ids.append(self.parents[ids[-1]])
        return [self.index[i] for i in reversed(ids)]

    def branch(self, node_id: int) -> list[Formula]:
        return [n.formula for n in self.path_to(node_id)]

    def leaves(self) -> list[Node]:
        return sorted((n for n in self.index.values() if not n.children), key=lambda n: n.id)

    @property
    def root_formulas(self) -> tuple[Formula, ...]:
        found = []
        n = self.root
        while True:
            found.append(n.formula)
            if len(n.children) == 1 and n.children[0].is_root:
                n = n.children[0]
            else:
                return tuple(found)

    @property
    def root_formula(self) -> Formula:
        return self.root.formula


def new_tableau(formulas: Sequence[Formula] | Formula, calculus: Calculus, logic: LogicId,
                cs: ConstantSpec) -> Tableau:
    """A tableau holding the given root formulas as a chain; pass ¬F to prove F."""
    if not isinstance(formulas, (list, tuple)):
        formulas = [formulas]
    if not formulas:
        raise RuleError("a tableau needs at least one root formula")
    node = None
    for i in range(len(formulas), 0, -1):
        node = Node(i, formulas[i - 1], None, (node,) if node else ())
    return Tableau(node, Calculus(calculus), logic, cs, len(formulas) + 1)


def _replace_leaf(node: Node, path_ids: list[int], depth: int, new_children: tuple[Node, ...]) -> Node:
    if depth == len(path_ids) - 1:
        return Node(node.id, node.formula, node.app, new_children)
    target = path_ids[depth + 1]
    children = tuple(
        _replace_leaf(c, path_ids, depth + 1, new_children) if c.id == target else c for c in node.children
    )
    return Node(node.id, node.formula, node.app, children)


def scope_roots(t: Tableau, path: Sequence[Node]) -> list[Formula]:
    """Formulas whose JL_CS-subformulas admit PB and T· at the end of the path.

    Root formulas always; in JLT_plus_cut also every cut formula above.
    """
    roots = list(t.root_formulas)
    if t.calculus is Calculus.JLT_PLUS_CUT:
        roots.extend(n.formula for n in path if n.app is not None and n.app.rule is Rule.CUT)
    return roots


def _admissible_in_scope(t: Tableau, roots: Sequence[Formula], f: Formula) -> bool:
    return any(oracle(r, t.cs).contains(f) for r in roots)


def restriction_defect(t: Tableau, path: Sequence[Node], rule: Rule, premises: Sequence[Formula],
                       instantiation: Formula | None, branches) -> str | None:
    """Side conditions of PB and T·; None when satisfied or not applicable."""
    if t.calculus is Calculus.JL or rule not in (Rule.PB, Rule.T_APP):
        return None
    roots = scope_roots(t, path)
    where = "the root" if t.calculus is Calculus.JLT else "the root or a cut formula above"
    if rule is Rule.PB:
        if not _admissible_in_scope(t, roots, instantiation):
            return f"PB restriction: {print_formula(instantiation)} is not a JL_CS-subformula of {where}"
        return None
    for f in (*premises, branches[0][0]):
        if not _admissible_in_scope(t, roots, f):
            return f"T· restriction: {print_formula(f)} is not a JL_CS-subformula of {where}"
    return None


def branch_terms(formulas: Sequence[Formula]):
    return all_subterms(formulas)


def apply_rule(t: Tableau, at: int, app: RuleApp, unrestricted: bool = False) -> Tableau:
    """Extend the branch ending at leaf `at` by one rule application.

    F:⊥ instantiations must use a subterm of a term on the branch unless
    `unrestricted` is set.
    """
    leaf = t.node(at)
    if leaf.children:
        raise RuleError("rules extend branch ends only", at)
    if app.rule not in rules_for(t.calculus, t.logic):
        raise RuleError(f"{app.rule} is not a rule of {t.calculus} for {t.logic.name}", at)
    path = t.path_to(at)
    on_path = {n.id: n for n in path}
    for pid in app.premises:
        if pid not in on_path:
            raise RuleError(f"premise {pid} is not on the branch", at)
    premises = [on_path[pid].formula for pid in app.premises]
    try:
        branches = conclusions(app.rule, premises, app.instantiation)
    except RuleError as e:
        raise RuleError(str(e), at) from None
    defect = restriction_defect(t, path, app.rule, premises, app.instantiation, branches)
    if defect:
        raise RuleError(defect, at)
    if app.rule is Rule.F_JUST_BOT and not unrestricted:
        pool = branch_terms([n.formula for n in path])
        if app.instantiation.term not in pool:
            raise RuleError("F:⊥ term must be a subterm of a term on the branch", at)
    next_id = t.next_id
    if app.rule in BRANCHING:
        children = []
        for (formula,) in branches:
            children.append(Node(next_id, formula, app))
            next_id += 1
        new_children = tuple(children)
    else:
        (formulas,) = branches
        node = None
        ids = list(range(next_id, next_id + len(formulas)))
        for node_id, formula in reversed(list(zip(ids, formulas))):
            node = Node(node_id, formula, app, (node,) if node else ())
        next_id += len(formulas)
        new_children = (node,)
    root = _replace_leaf(t.root, [n.id for n in path], 0, new_children)
    LOGGER.debug("%s at %d -> %s", app.rule, at, [print_formula(f) for b in branches for f in b])
    return Tableau(root, t.calculus, t.logic, t.cs, next_id)


def apply_cs_rule(t: Tableau, at: int, entry: Formula) -> Tableau:
    """The admissible CS rule: add c_n:...:c_1:A from CS as a PB split whose right branch closes."""
    if not cs_member(t.cs, entry):
        raise RuleError(f"{print_formula(entry)} is not in the constant specification", at)
    if t.calculus is Calculus.JL:
        raise RuleError("the admissible CS rule needs PB, which calculus JL lacks", at)
    return apply_rule(t, at, RuleApp(Rule.PB, (), entry))


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Defect:
    node_id: int
    kind: str
    message: str

    def __str__(self):
        return f"node {self.node_id}: [{self.kind}] {self.message}"


@dataclass(frozen=True)
class ProofReport:
    defects: tuple[Defect, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.defects

    def kinds(self) -> set[str]:
        return {d.kind for d in self.defects}

    def __bool__(self):
        return self.ok


def check_proof(t: Tableau) -> ProofReport:
    """Re-derive every rule application and test every leaf for closure."""
    defects: list[Defect] = []
    rules = rules_for(t.calculus, t.logic)

    def check_app(path: list[Node], app: RuleApp, node_id: int):
        if app.rule not in rules:
            defects.append(Defect(node_id, "calculus", f"{app.rule} is not a rule of {t.calculus} for {t.logic.name}"))
            return None
        on_path = {n.id: n for n in path}
        missing = [pid for pid in app.premises if pid not in on_path]
        if missing:
            defects.append(Defect(node_id, "premise", f"premises {missing} are not above on the branch"))
            return None
        premises = [on_path[pid].formula for pid in app.premises]
        try:
            branches = conclusions(app.rule, premises, app.instantiation)
        except RuleError as e:
            defects.append(Defect(node_id, "schema", str(e)))
            return None
        message = restriction_defect(t, path, app.rule, premises, app.instantiation, branches)
        if message:
            defects.append(Defect(node_id, message.split(":", 1)[0], message))
        return branches

    def walk(node: Node, path: list[Node]):
        path = path + [node]
        if not node.children:
            status = branch_closed([n.formula for n in path], t.cs)
            if isinstance(status, OpenBranch):
                defects.append(Defect(node.id, "open branch", "branch does not close"))
            return
        if any(c.is_root for c in node.children):
            if not node.is_root or len(node.children) != 1:
                defects.append(Defect(node.id, "structure", "root formulas must form the top chain"))
                return
            walk(node.children[0], path)
            return
        apps = {c.app for c in node.children}
        if len(node.children) > 2 or len(apps) != 1:
            defects.append(Defect(node.id, "structure", "children do not come from one rule application"))
            return
        app = node.children[0].app
        if len(node.children) == 2:
            if app.rule not in BRANCHING:
                defects.append(Defect(node.id, "structure", f"{app.rule} does not branch"))
                return
            branches = check_app(path, app, node.children[0].id)
            if branches is not None:
                got = tuple((c.formula,) for c in node.children)
                if got != branches:
                    defects.append(Defect(node.children[0].id, "schema", f"{app.rule} conclusions do not match"))
            for c in node.children:
                walk(c, path)
            return
        if app.rule in BRANCHING:
            defects.append(Defect(node.id, "structure", f"{app.rule} must create two children"))
            return
        branches = check_app(path, app, node.children[0].id)
        group = [node.children[0]]
        if branches is not None:
            expected = branches[0]
            while len(group) < len(expected):
                last = group[-1]
                if len(last.children) == 1 and last.children[0].app == app:
                    group.append(last.children[0])
                else:
                    break
            if tuple(n.formula for n in group) != expected:
                defects.append(Defect(group[0].id, "schema", f"{app.rule} conclusions do not match"))
                return
        for n in group[:-1]:
            path = path + [n]
        walk(group[-1], path)

    if not t.root.is_root:
        defects.append(Defect(t.root.id, "structure", "the top node must be a root formula"))
    else:
        walk(t.root, [])
    ids = sorted(t.index)
    if len(set(ids)) != len(ids):
        defects.append(Defect(ids[0], "structure", "duplicate node ids"))
    return ProofReport(tuple(sorted(defects, key=lambda d: d.node_id)))


def branches(t: Tableau) -> list[list[Formula]]:
    """Formulas of every root-to-leaf path, leaves in id order."""
    return [t.branch(leaf.id) for leaf in t.leaves()]


def is_closed(t: Tableau) -> bool:
    return all(isinstance(branch_closed(b, t.cs), Closed) for b in branches(t))


def _group(t: Tableau, first: Node) -> list[Node]:
    """The nodes one non-branching application created, starting at its first conclusion."""
    app = first.app
    try:
        premises = [t.node(pid).formula for pid in app.premises]
        expected = len(conclusions(app.rule, premises, app.instantiation)[0])
    except RuleError:
        expected = 1
    group = [first]
    while len(group) < expected and len(group[-1].children) == 1 and group[-1].children[0].app == app:
        group.append(group[-1].children[0])
    return group


def applications(t: Tableau) -> Iterator[tuple[Node, RuleApp]]:
    """Each rule application once, with the node it was applied at, in node order."""
    stack = [t.root]
    while stack:
        node = stack.pop()
        children = node.children
        if not children:
            continue
        if children[0].is_root:
            stack.append(children[0])
            continue
        yield node, children[0].app
        if len(children) == 2:
            stack.extend(reversed(children))
        else:
            stack.append(_group(t, children[0])[-1])


def rules_used(t: Tableau) -> Counter:
    return Counter(app.rule for _, app in applications(t))


# ---------------------------------------------------------------------------
# Formula-referenced blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Block:
    """A run of formulas introduced by one rule application, with its subtrees.

    Premises are formulas, resolved to the nearest occurrence above when the
    block tree is numbered. This makes a closed block tree valid under any
    larger branch prefix.
    """

    formulas: tuple[Formula, ...]
    rule: Rule | None = None
    premises: tuple[Formula, ...] = ()
    instantiation: Formula | None = None
    children: tuple[Block, ...] = ()

    @property
    def is_cut(self) -> bool:
        return len(self.children) == 2 and self.children[0].rule is Rule.CUT

    def count(self) -> int:
        """Formulas in this block and everything below it."""
        return len(self.formulas) + sum(c.count() for c in self.children)


def to_blocks(t: Tableau) -> Block:
    roots = t.root_formulas
    node = t.root
    for _ in roots[1:]:
        node = node.children[0]
    return Block(roots, None, (), None, _child_blocks(t, node))


def _child_blocks(t: Tableau, node: Node) -> tuple[Block, ...]:
    if not node.children:
        return ()
    app = node.children[0].app
    premises = tuple(t.node(pid).formula for pid in app.premises)
    if len(node.children) == 2:
        return tuple(
            Block((c.formula,), app.rule, premises, app.instantiation, _child_blocks(t, c)) for c in node.children
        )
    group = _group(t, node.children[0])
    return (Block(tuple(n.formula for n in group), app.rule, premises, app.instantiation,
                  _child_blocks(t, group[-1])),)


def from_blocks(block: Block, calculus: Calculus, logic: LogicId, cs: ConstantSpec) -> Tableau:
    """Number a block tree; ids follow creation order (both children of a split, then the left subtree)."""
    counter = [0]

    def fresh() -> int:
        counter[0] += 1
        return counter[0]

    def resolve(premise: Formula, path: list[tuple[int, Formula]]) -> int:
        for node_id, formula in reversed(path):
            if formula == premise:
                return node_id
        raise RuleError(f"premise {print_formula(premise)} is not on the branch")

    def build_chain(formulas, app, path, tail_builder):
        ids = [fresh() for _ in formulas]
        new_path = path + list(zip(ids, formulas))
        tail = tail_builder(new_path)
        node = None
        for i in range(len(formulas) - 1, -1, -1):
            kids = (node,) if node is not None else tail
            node = Node(ids[i], formulas[i], app, kids)
        return node

    def children_of(b: Block, path) -> tuple[Node, ...]:
        if not b.children:
            return ()
        if len(b.children) == 2:
            app = _app_for(b.children[0], path)
            ids = [fresh(), fresh()]
            nodes = []
            for node_id, child in zip(ids, b.children):
                sub_path = path + [(node_id, child.formulas[0])]
                nodes.append((node_id, child, sub_path))
            built = []
            for node_id, child, sub_path in nodes:
                built.append(Node(node_id, child.formulas[0], app, children_of(child, sub_path)))
            return tuple(built)
        child = b.children[0]
        app = _app_for(child, path)
        return (build_chain(child.formulas, app, path, lambda p: children_of(child, p)),)

    def _app_for(child: Block, path) -> RuleApp:
        return RuleApp(child.rule, tuple(resolve(p, path) for p in child.premises), child.instantiation)

    root = build_chain(block.formulas, None, [], lambda p: children_of(block, p))
    return Tableau(root, Calculus(calculus), logic, cs, counter[0] + 1)


# ---------------------------------------------------------------------------
# Serialisation and rendering
# ---------------------------------------------------------------------------

def _declarations(t: Tableau) -> dict:
    names_var, names_const = set(), set()
    for n in t.index.values():
        for term in terms_of(n.formula):
            for s in subterms(term):
                if isinstance(s, Var) and s.name[0] not in VARIABLE_LETTERS:
                    names_var.add(s.name)
                elif isinstance(s, Const) and (s.name[0] in VARIABLE_LETTERS or not s.name[0].islower()):
                    names_const.add(s.name)
    return {"var": sorted(names_var), "const": sorted(names_const)}


def tableau_to_json(t: Tableau) -> dict:
    nodes = []
    for node_id in sorted(t.index):
        n = t.index[node_id]
        nodes.append({
            "id": n.id,
            "formula": print_formula(n.formula),
            "rule": ROOT_LABEL if n.app is None else str(n.app.rule),
            "premises": [] if n.app is None else list(n.app.premises),
            "instantiation": None if n.app is None or n.app.instantiation is None
            else print_formula(n.app.instantiation),
            "children": [c.id for c in n.children],
        })
    data = {
        "calculus": str(t.calculus),
        "logic": t.logic.name,
        "cs": t.cs.to_strings(),
        "nodes": nodes,
    }
    declarations = _declarations(t)
    if declarations["var"] or declarations["const"]:
        data["declarations"] = declarations
    return data


def tableau_from_json(data: dict) -> Tableau:
    declarations = data.get("declarations", {})
    variables = frozenset(declarations.get("var", []))
    constants = frozenset(declarations.get("const", []))

    def formula(text):
        return parse_formula(text, variables, constants)

    try:
        calculus = Calculus(data["calculus"])
        logic = parse_logic(data["logic"])
        cs = build_cs([formula(e) for e in data.get("cs", [])], close=False)
        raw = {item["id"]: item for item in data["nodes"]}
    except (KeyError, ValueError, TypeError) as e:
        raise ParseError(f"malformed proof JSON: {e}") from None
    if not raw:
        raise ParseError("proof JSON has no nodes")
    child_ids = {c for item in raw.values() for c in item.get("children", [])}
    tops = [i for i in raw if i not in child_ids]
    if len(tops) != 1:
        raise ParseError("proof JSON must have exactly one top node")

    def build(node_id: int, seen: set) -> Node:
        if node_id in seen or node_id not in raw:
            raise ParseError(f"proof JSON node {node_id} is missing or repeated")
        seen.add(node_id)
        item = raw[node_id]
        rule = item.get("rule", ROOT_LABEL)
        app = None
        if rule != ROOT_LABEL:
            inst = item.get("instantiation")
            app = RuleApp(Rule.parse(rule), tuple(item.get("premises", [])), formula(inst) if inst else None)
        return Node(node_id, formula(item["formula"]), app, tuple(build(c, seen) for c in item.get("children", [])))

    root = build(tops[0], set())
    return Tableau(root, calculus, logic, cs, max(raw) + 1)


def save_tableau(t: Tableau, path: str | Path) -> None:
    Path(path).write_text(json.dumps(tableau_to_json(t), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def load_tableau(path: str | Path) -> Tableau:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: not JSON ({e.msg})", e.lineno, e.colno) from None
    return tableau_from_json(data)


def render_text(t: Tableau, unicode: bool = True) -> str:
    """Numbered lines, one per node, branches indented, ⊗ on closed leaves."""
    lines: list[str] = []

    def label(n: Node) -> str:
        if n.app is None:
            return "root"
        parts = [str(n.app.rule)]
        if n.app.premises:
            parts.append(",".join(str(p) for p in n.app.premises))
        if n.app.instantiation is not None:
            parts.append(f"A={print_formula(n.app.instantiation, unicode)}")
        return " ".join(parts)

    def walk(n: Node, indent: str, path: list[Formula]):
        path = path + [n.formula]
        mark = ""
        if not n.children:
            status = branch_closed(path, t.cs)
            mark = "  ⊗" if isinstance(status, Closed) else "  (open)"
        lines.append(f"{indent}{n.id}. {print_formula(n.formula, unicode)}   [{label(n)}]{mark}")
        if len(n.children) == 1:
            walk(n.children[0], indent, path)
        elif len(n.children) == 2:
            for i, c in enumerate(n.children):
                lines.append(f"{indent}{'├─' if i == 0 else '└─'} branch {i + 1}")
                walk(c, indent + "   ", path)

    walk(t.root, "", [])
    return "\n".join(lines)
