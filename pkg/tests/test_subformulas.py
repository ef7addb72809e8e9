from itertools import islice

import pytest

from generators import WEAKENING, WEAKENING_CS, F
from jtableau.logics import EMPTY_CS, build_cs, parse_logic
from jtableau.subformulas import (
    ClosureRequest,
    ClosureStream,
    is_subformula,
    is_weak_subformula,
    iter_subformulas,
    oracle,
    subformulas_up_to,
    weak_subformulas_up_to,
)
from jtableau.syntax import Neg, size

J = parse_logic("J")
CS = build_cs([F(WEAKENING_CS)], J)


def test_justified_copies_of_the_root():
    assert is_subformula(F("t:t:A"), F("t:A"), EMPTY_CS, J)
    assert is_subformula(F("t:t:t:A"), F("t:A"), EMPTY_CS, J)


def test_reflexive():
    assert is_subformula(F("p -> q"), F("p -> q"), EMPTY_CS, J)


def test_cs_entries_count():
    assert is_subformula(F(WEAKENING_CS), F(WEAKENING), CS, J)
    assert not is_subformula(F(WEAKENING_CS), F(WEAKENING), EMPTY_CS, J)


def test_foreign_formulas_are_excluded():
    assert not is_subformula(F("q"), F(WEAKENING), CS, J)
    assert not is_subformula(F("y:A"), F(WEAKENING), CS, J)


def test_only_subterms_may_justify():
    assert is_subformula(F("x:c*x:(B -> A)"), F(WEAKENING), CS, J)
    assert not is_subformula(F("(c*x)*x:A"), F(WEAKENING), CS, J)


def test_weak_subformulas_add_negations():
    assert is_weak_subformula(F("~B"), F(WEAKENING), CS, J)
    assert not is_subformula(F("~B"), F(WEAKENING), CS, J)


def test_bounded_closure_stops_at_the_bound():
    root = F("t:A")
    members = subformulas_up_to(ClosureRequest(root, EMPTY_CS, J, size(F("t:t:A"))))
    assert F("t:t:A") in members
    assert F("t:t:t:A") not in members


def test_closure_grows_with_the_bound():
    root = F("t:A")
    bounds = [size(root), size(F("t:t:A")), size(F("t:t:t:A"))]
    sets = [set(weak_subformulas_up_to(ClosureRequest(root, EMPTY_CS, J, b))) for b in bounds]
    assert sets[0] < sets[1] < sets[2]
    assert F("t:t:A") in sets[1]
    assert F("t:t:t:A") in sets[2]


def test_atom_closure():
    assert weak_subformulas_up_to(ClosureRequest(F("p"), EMPTY_CS, J, 1)) == (F("p"), F("~p"))


def test_weakening_closure():
    root = F(WEAKENING)
    members = set(weak_subformulas_up_to(ClosureRequest(root, CS, J, size(root) + 2)))
    for text in (WEAKENING_CS, "x:A", "c*x:(B -> A)", "A", "B -> A"):
        assert F(text) in members
        assert Neg(F(text)) in members


def test_closure_order_is_deterministic():
    req = ClosureRequest(F(WEAKENING), CS, J, 20)
    first = subformulas_up_to(req)
    assert first == subformulas_up_to(req)
    assert [size(f) for f in first] == sorted(size(f) for f in first)


def test_bound_below_root_size():
    with pytest.raises(ValueError):
        ClosureRequest(F(WEAKENING), CS, J, 3)


def test_explain():
    steps = oracle(F("t:A"), EMPTY_CS).explain(F("t:t:A"))
    assert steps[0].startswith("root:")
    assert steps[-1].startswith("term:")
    assert oracle(F(WEAKENING), CS).explain(F(WEAKENING_CS))[0].startswith("CS:")
    assert oracle(F(WEAKENING), CS).explain(F("q")) == []


def test_enumeration_is_lazy():
    root = F(WEAKENING)
    head = list(islice(iter_subformulas(ClosureRequest(root, CS, J, 200)), 10))
    assert head == list(subformulas_up_to(ClosureRequest(root, CS, J, size(root)))[:10])


def test_closure_stream_replays_what_it_read():
    req = ClosureRequest(F(WEAKENING), CS, J, size(F(WEAKENING)))
    stream = ClosureStream(req)
    first = list(islice(stream, 3))
    assert not stream.exhausted
    everything = list(stream)
    assert everything[:3] == first
    assert stream.exhausted
    assert list(stream) == everything
    assert tuple(everything) == subformulas_up_to(req)
