"""End-to-end properties over axiom suites, random formulas and a Hilbert corpus."""

import random

import pytest

from generators import ALL_LOGICS, F, mp_chain, random_cs, random_formula
from jtableau.config import Budget
from jtableau.cutelim import cut_count, eliminate_all
from jtableau.errors import RuleError
from jtableau.hilbert import load_hilbert, parse_hilbert, translate_to_tableau
from jtableau.logics import EMPTY_CS, Scheme, load_cs, parse_logic
from jtableau.prover_analytic import prove_analytic, weak_subformula_scan
from jtableau.prover_jl import prove_jl
from jtableau.search import Open, Proved
from jtableau.semantics import validate_countermodel
from jtableau.subformulas import ClosureRequest, subformulas_up_to
from jtableau.syntax import Neg, size
from jtableau.tableau import Calculus, Rule, RuleApp, apply_rule, check_proof, new_tableau, rules_used

INSTANCES = {
    Scheme.TAUT: ["p -> p", "~~p -> p", "(p -> q) -> (~q -> ~p)", "x:p -> (q -> x:p)"],
    Scheme.SUM: ["x:p -> (x+y):p", "y:(p -> q) -> (x+y):(p -> q)", "x:~q -> (x+z):~q"],
    Scheme.JK: [
        "x:(p -> q) -> (y:p -> x*y:q)",
        "x:((p -> q) -> r) -> (y:(p -> q) -> x*y:r)",
        "x:(q -> p) -> (z:q -> x*z:p)",
    ],
    Scheme.JT: ["x:p -> p", "x:(p -> q) -> (p -> q)", "y:~p -> ~p"],
    Scheme.JD: ["x:False -> False", "y:False -> False", "x*y:False -> False"],
    Scheme.J4: ["x:p -> !x:x:p", "y:(p -> q) -> !y:y:(p -> q)", "(x+y):p -> !(x+y):(x+y):p"],
    Scheme.JB: ["~p -> @x:~x:p", "~q -> @y:~y:q", "~(p -> q) -> @x:~x:(p -> q)"],
    Scheme.J5: ["~x:p -> ?x:~x:p", "~y:q -> ?y:~y:q", "~x:(p -> q) -> ?x:~x:(p -> q)"],
}

SWEEP_BUDGET = Budget(max_nodes=400, max_depth=60, instantiation_bound=12)


def axiom_cases():
    for name in ALL_LOGICS:
        logic = parse_logic(name)
        for scheme in logic.schemes:
            for i, text in enumerate(INSTANCES.get(scheme, ())):
                yield pytest.param(name, text, id=f"{name}-{scheme}-{i}")


@pytest.mark.parametrize("name,text", list(axiom_cases()))
def test_axiom_instances_are_proved_without_splits(name, text):
    logic = parse_logic(name)
    goal = F(text)
    for prover in (prove_jl, prove_analytic):
        verdict = prover(goal, logic, EMPTY_CS)
        assert isinstance(verdict, Proved), (prover.__name__, verdict)
        used = rules_used(verdict.tableau)
        assert Rule.PB not in used
        assert Rule.CUT not in used


def test_every_scheme_has_three_instances():
    assert all(len(texts) >= 3 for texts in INSTANCES.values())
    assert set(INSTANCES) == set(Scheme)


def sweep(seed: int, per_logic: int, max_size: int):
    rng = random.Random(seed)
    for name in ALL_LOGICS:
        logic = parse_logic(name)
        for _ in range(per_logic):
            cs = random_cs(rng, logic)
            goal = random_formula(rng, logic, max_size=max_size)
            verdicts = {}
            for calculus, prover in ((Calculus.JL, prove_jl), (Calculus.JLT, prove_analytic)):
                verdict = prover(goal, logic, cs, SWEEP_BUDGET)
                verdicts[calculus] = verdict
                match verdict:
                    case Proved(tableau=t):
                        assert check_proof(t).ok
                    case Open(model=m):
                        assert validate_countermodel(m, goal, logic, cs)
            statuses = {v.status for v in verdicts.values()}
            assert statuses != {"Proved", "Open"}, (name, goal)
            if isinstance(verdicts[Calculus.JLT], Proved):
                assert weak_subformula_scan(verdicts[Calculus.JLT].tableau) == []


def test_soundness_sweep():
    sweep(seed=7, per_logic=3, max_size=8)


@pytest.mark.slow
def test_soundness_sweep_long():
    sweep(seed=2024, per_logic=200, max_size=12)


def test_countermodels_refute_their_goals():
    for text, name in [("x:p -> p", "J"), ("p -> q", "JT4"), ("x:p -> y:p", "J4"), ("~x:p", "JD")]:
        logic = parse_logic(name)
        goal = F(text)
        verdict = prove_analytic(goal, logic, EMPTY_CS)
        assert isinstance(verdict, Open)
        assert validate_countermodel(verdict.model, goal, logic, EMPTY_CS)


def corpus():
    cases = [
        ("weakening.hil", "J", "ex.cs"),
        ("sum_contraposition.hil", "J", None),
        ("application.hil", "J", None),
        ("checker.hil", "LP", None),
    ]
    for case in cases:
        yield pytest.param(*case, id=case[0])
    for depth in (1, 2, 3):
        yield pytest.param(mp_chain(depth), "J", None, id=f"mp-chain-{depth}")
    for name in ("J", "JT", "J4", "JD", "JB", "J5", "JT4"):
        logic = parse_logic(name)
        for scheme in logic.schemes:
            if scheme is Scheme.TAUT:
                continue
            a = INSTANCES[scheme][0]
            text = (f"1. {a}   [{scheme}]\n"
                    f"2. ({a}) -> (r -> ({a}))   [Taut]\n"
                    f"3. r -> ({a})   [MP 1 2]\n")
            yield pytest.param(text, name, None, id=f"{name}-{scheme}-weakened")


@pytest.mark.parametrize("source,name,cs_name", list(corpus()))
def test_hilbert_corpus_pipeline(source, name, cs_name, data_dir):
    logic = parse_logic(name)
    cs = load_cs(data_dir / cs_name, logic) if cs_name else EMPTY_CS
    proof = load_hilbert(data_dir / source) if source.endswith(".hil") else parse_hilbert(source)
    t = translate_to_tableau(proof, logic, cs)
    assert cut_count(t) == 2 * proof.mp_count()
    assert check_proof(t).ok
    result = eliminate_all(t)
    assert result.calculus is Calculus.JLT
    assert cut_count(result) == 0
    assert check_proof(result).ok
    assert weak_subformula_scan(result) == []


def test_corpus_is_large_enough():
    assert len(list(corpus())) >= 20


def test_unbounded_closure_keeps_growing():
    root = F("t:A")
    counts = [
        len(subformulas_up_to(ClosureRequest(root, EMPTY_CS, parse_logic("J"), size(F(text)))))
        for text in ("t:A", "t:t:A", "t:t:t:A")
    ]
    assert counts[0] < counts[1] < counts[2]
    assert F("t:t:t:A") in subformulas_up_to(ClosureRequest(root, EMPTY_CS, parse_logic("J"), 7))


def test_pb_outside_the_closure_is_refused(ex_cs):
    t = new_tableau([Neg(F("x:A -> c*x:(B -> A)"))], Calculus.JLT, parse_logic("J"), ex_cs)
    with pytest.raises(RuleError):
        apply_rule(t, 1, RuleApp(Rule.PB, (), F("q")))
