"""
JL_CS-subformulas, their weak variant and size-bounded closure enumeration.

The subformulas of B are generated by: B itself, syntactic decomposition
(¬F, F→G, t:F), every subformula of every CS entry, and prefixing t: to a
subformula whenever t is a subterm of a term met so far. The terms met are
those of B and of the CS entries, since every derived formula only ever
reuses them. So a formula belongs to the relation exactly when it is a chain
t1:...:tk:F with every ti drawn from that term pool and F a syntactic
subformula of B or of a CS entry. The closure itself is infinite as soon as
the pool is nonempty (t:A, t:t:A, t:t:t:A, ...).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Final, Iterator

from .logics import ConstantSpec, LogicId
from .syntax import (
    Formula,
    Just,
    Neg,
    Term,
    all_subterms,
    print_formula,
    print_term,
    size,
    sort_key,
    syntactic_subformulas,
)

LOGGER: Final = logging.getLogger(__name__)


class SubformulaOracle:
    """Membership tests for the JL_CS-subformulas of one root."""

    def __init__(self, root: Formula, cs: ConstantSpec):
        self.root = root
        self.cs = cs
        self.own = syntactic_subformulas(root)
        cs_parts: set[Formula] = set()
        for entry in cs.entries:
            cs_parts |= syntactic_subformulas(entry)
        self.from_cs = frozenset(cs_parts - self.own)
        self.base = self.own | self.from_cs
        self.pool = all_subterms([root, *cs.entries])

    def contains(self, a: Formula) -> bool:
        while True:
            if a in self.base:
                return True
            if isinstance(a, Just) and a.term in self.pool:
                a = a.body
                continue
            return False

    def weak_contains(self, a: Formula) -> bool:
        return self.contains(a) or (isinstance(a, Neg) and self.contains(a.inner))

    def explain(self, a: Formula) -> list[str]:
        """Step-by-step derivation of a, empty when a is not a subformula."""
        steps: list[str] = []
        prefixes: list[Term] = []
        current = a
        while current not in self.base:
            if not (isinstance(current, Just) and current.term in self.pool):
                return []
            prefixes.append(current.term)
            current = current.body
        if current == self.root:
            steps.append(f"root: {print_formula(current)} is the root")
        elif current in self.own:
            steps.append(f"syntactic: {print_formula(current)} is a syntactic subformula of the root")
        else:
            entry = next(e for e in sorted(self.cs.entries, key=sort_key) if current in syntactic_subformulas(e))
            steps.append(f"CS: {print_formula(current)} is a subformula of CS entry {print_formula(entry)}")
        for t in reversed(prefixes):
            current = Just(t, current)
            steps.append(
                f"term: {print_formula(current)} with {print_term(t)} a subterm of a term met so far"
            )
        return steps


@lru_cache(maxsize=256)
def oracle(root: Formula, cs: ConstantSpec) -> SubformulaOracle:
    return SubformulaOracle(root, cs)


def is_subformula(a: Formula, b: Formula, cs: ConstantSpec, logic: LogicId | None = None) -> bool:
    """Is a a JL_CS-subformula of b?"""
    return oracle(b, cs).contains(a)


def is_weak_subformula(a: Formula, b: Formula, cs: ConstantSpec, logic: LogicId | None = None) -> bool:
    return oracle(b, cs).weak_contains(a)


@dataclass(frozen=True)
class ClosureRequest:
    root: Formula
    cs: ConstantSpec
    logic: LogicId
    size_bound: int

    def __post_init__(self):
        if self.size_bound < size(self.root):
            raise ValueError(f"size bound {self.size_bound} is below the root size {size(self.root)}")


def iter_subformulas(req: ClosureRequest) -> Iterator[Formula]:
    """Members of the bounded closure in (size, text) order, one size layer at a time.

    Layer n holds the base formulas of size n and every t:F with t in the
    term pool and F in layer n - 1 - size(t). Nothing beyond the layer being
    yielded is built, so a consumer that stops early pays only for what it read.
    """
    o = oracle(req.root, req.cs)
    pool = sorted(o.pool, key=lambda t: (size(t), print_term(t)))
    base_layers: dict[int, set[Formula]] = {}
    for f in o.base:
        base_layers.setdefault(size(f), set()).add(f)
    layers: dict[int, tuple[Formula, ...]] = {}
    for n in range(1, req.size_bound + 1):
        layer = set(base_layers.get(n, ()))
        for t in pool:
            below = n - 1 - size(t)
            if below < 1:
                break
            layer.update(Just(t, f) for f in layers[below])
        layers[n] = tuple(sorted(layer, key=sort_key))
        yield from layers[n]


class ClosureStream:
    """Bounded closure members produced on demand and kept for later passes."""

    def __init__(self, req: ClosureRequest):
        self.request = req
        self._source = iter_subformulas(req)
        self._seen: list[Formula] = []
        self.exhausted = False

    def __iter__(self) -> Iterator[Formula]:
        i = 0
        while True:
            if i < len(self._seen):
                yield self._seen[i]
                i += 1
                continue
            if self.exhausted:
                return
            f = next(self._source, None)
            if f is None:
                self.exhausted = True
                return
            self._seen.append(f)


def subformulas_up_to(req: ClosureRequest) -> tuple[Formula, ...]:
    """Every JL_CS-subformula of the root with at most size_bound nodes, ordered."""
    return tuple(iter_subformulas(req))


def weak_subformulas_up_to(req: ClosureRequest) -> tuple[Formula, ...]:
    """The bounded closure plus the negation of each member, ordered by size then text."""
    members = subformulas_up_to(req)
    result = set(members) | {Neg(f) for f in members}
    LOGGER.debug("closure of %s at bound %d has %d members", print_formula(req.root), req.size_bound, len(result))
    return tuple(sorted(result, key=sort_key))
