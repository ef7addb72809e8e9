import pytest

from generators import WEAKENING, WEAKENING_CS, F, mp_chain, weakening_jl_tableau, weakening_jlt_tableau
from jtableau.cutelim import (
    BECAME_PB,
    LOWER_RANK,
    SAME_RANK_LOWER_WEIGHT,
    cut_count,
    eliminate_all,
    eliminate_step,
    find_minimal_cut,
    measure_table,
    replay_under,
)
from jtableau.errors import CutEliminationError
from jtableau.hilbert import load_hilbert, parse_hilbert, translate_to_tableau
from jtableau.logics import EMPTY_CS, parse_logic
from jtableau.prover_analytic import weak_subformula_scan
from jtableau.syntax import Neg, rank
from jtableau.tableau import Calculus, Rule, RuleApp, apply_rule, check_proof, new_tableau, rules_used

J = parse_logic("J")
CLAIMS = {LOWER_RANK, SAME_RANK_LOWER_WEIGHT, BECAME_PB}


def weakening_with_cut(cs):
    """The analytic weakening proof with its PB split relabelled as a cut."""
    t = new_tableau([Neg(F(WEAKENING))], Calculus.JLT_PLUS_CUT, J, cs)
    t = apply_rule(t, 1, RuleApp(Rule.F_IMP, (1,)))
    t = apply_rule(t, 3, RuleApp(Rule.CUT, (), F(WEAKENING_CS)))
    return apply_rule(t, 4, RuleApp(Rule.T_APP, (4, 2)))


def assert_cut_free(result):
    assert result.calculus is Calculus.JLT
    assert cut_count(result) == 0
    assert check_proof(result).ok
    assert weak_subformula_scan(result) == []


class TestMeasures:
    def test_single_cut_site(self, ex_cs):
        t = weakening_with_cut(ex_cs)
        (site,) = measure_table(t)
        assert site.node_id == 3
        assert site.cut_formula == F(WEAKENING_CS)
        assert site.rank == rank(F(WEAKENING_CS))
        assert site.weight == 1
        assert site.is_minimal
        assert site.is_branch_end

    def test_cut_free_proof_has_no_site(self, ex_cs):
        t = weakening_jlt_tableau(ex_cs)
        assert measure_table(t) == []
        assert find_minimal_cut(t) is None

    def test_translation_sites(self, data_dir, ex_cs):
        t = translate_to_tableau(load_hilbert(data_dir / "weakening.hil"), J, ex_cs)
        sites = measure_table(t)
        assert len(sites) == 2
        minimal = find_minimal_cut(t)
        assert minimal.is_minimal
        assert all(minimal.depth >= s.depth for s in sites if s.is_minimal)


class TestSteps:
    def test_branch_end_cut_becomes_pb(self, ex_cs):
        t = weakening_with_cut(ex_cs)
        site = find_minimal_cut(t)
        rewritten, step = eliminate_step(t, site)
        assert step.case == "I"
        assert [c.relation for c in step.claims] == [BECAME_PB]
        assert cut_count(rewritten) == 0
        assert check_proof(rewritten).ok

    def test_non_minimal_site_is_refused(self, data_dir, ex_cs):
        t = translate_to_tableau(load_hilbert(data_dir / "weakening.hil"), J, ex_cs)
        outer = next(s for s in measure_table(t) if not s.is_minimal)
        with pytest.raises(CutEliminationError, match="minimal"):
            eliminate_step(t, outer)


class TestEliminateAll:
    def test_cut_free_input_is_unchanged(self, ex_cs):
        t = weakening_jlt_tableau(ex_cs)
        result = eliminate_all(t)
        assert result.root == t.root
        assert result.calculus is Calculus.JLT

    def test_relabelled_cut_gives_the_analytic_proof(self, ex_cs):
        trace = []
        result = eliminate_all(weakening_with_cut(ex_cs), trace=trace)
        assert_cut_free(result)
        assert rules_used(result) == {Rule.F_IMP: 1, Rule.PB: 1, Rule.T_APP: 1}
        assert len(trace) == 1

    def test_weakening_pipeline(self, data_dir, ex_cs):
        trace = []
        t = translate_to_tableau(load_hilbert(data_dir / "weakening.hil"), J, ex_cs)
        result = eliminate_all(t, trace=trace)
        assert_cut_free(result)
        assert trace
        assert all(c.relation in CLAIMS for step in trace for c in step.claims)

    def test_sum_contraposition_pipeline(self, data_dir):
        t = translate_to_tableau(load_hilbert(data_dir / "sum_contraposition.hil"), J, EMPTY_CS)
        assert_cut_free(eliminate_all(t))

    def test_sum_axiom_is_already_cut_free(self):
        t = translate_to_tableau(parse_hilbert("1. s:A -> (s+t):A   [Sum]\n"), J, EMPTY_CS)
        result = eliminate_all(t)
        assert_cut_free(result)
        assert Rule.F_SUM_L in rules_used(result)

    def test_lp_pipeline(self, data_dir):
        t = translate_to_tableau(load_hilbert(data_dir / "checker.hil"), parse_logic("LP"), EMPTY_CS)
        assert_cut_free(eliminate_all(t))

    def test_every_step_is_observed(self):
        t = translate_to_tableau(parse_hilbert(mp_chain(1)), J, EMPTY_CS)
        seen = []
        eliminate_all(t, on_step=lambda current, step: seen.append((cut_count(current), step.case)))
        assert seen
        assert seen[-1][0] == 0
        assert {case for _, case in seen} <= {"I", "II", "III"}

    def test_step_cap(self, data_dir, ex_cs):
        t = translate_to_tableau(load_hilbert(data_dir / "weakening.hil"), J, ex_cs)
        with pytest.raises(CutEliminationError, match="gave up"):
            eliminate_all(t, max_steps=0)

    def test_jl_proofs_are_refused(self, ex_cs):
        with pytest.raises(CutEliminationError, match="JL proof"):
            eliminate_all(weakening_jl_tableau(ex_cs))

    def test_invalid_input_is_refused(self, ex_cs):
        t = new_tableau([Neg(F("p -> q"))], Calculus.JLT_PLUS_CUT, J, ex_cs)
        with pytest.raises(CutEliminationError, match="not a valid proof"):
            eliminate_all(t)


def test_replay_under_keeps_closure(ex_cs):
    t = weakening_jlt_tableau(ex_cs)
    widened = replay_under(t, [F("p")])
    assert check_proof(widened).ok
    assert widened.size == t.size + 1


def cut_over(goal, logic, steps):
    """A JLT_plus_cut tableau for ¬goal built from (leaf, rule, premises, instantiation) steps."""
    t = new_tableau([Neg(F(goal))], Calculus.JLT_PLUS_CUT, parse_logic(logic), EMPTY_CS)
    for leaf, rule, premises, instantiation in steps:
        t = apply_rule(t, leaf, RuleApp(rule, premises, F(instantiation) if instantiation else None))
    assert check_proof(t).ok
    return t


def factive_sum_cut():
    # cut on (x+y):p; T: closes the left side, F+L the right
    return cut_over("x:p -> p", "JT", [
        (1, Rule.F_IMP, (1,), None),
        (3, Rule.CUT, (), "(x+y):p"),
        (4, Rule.T_JUST, (4,), None),
        (5, Rule.F_SUM_L, (5,), None),
    ])


def consistent_sum_cut():
    return cut_over("x:False -> False", "JD", [
        (1, Rule.F_IMP, (1,), None),
        (3, Rule.CUT, (), "(x+y):False"),
        (4, Rule.T_JUST_BOT, (4,), None),
        (5, Rule.F_SUM_L, (5,), None),
    ])


def application_above_cut():
    # the left side starts with a T· that does not use the cut formula
    return cut_over("(x*y:q -> q) -> (x:(p -> q) -> (y:p -> q))", "JT", [
        (1, Rule.F_IMP, (1,), None),
        (3, Rule.F_IMP, (3,), None),
        (5, Rule.F_IMP, (5,), None),
        (7, Rule.CUT, (), "~x*y:q"),
        (8, Rule.T_APP, (4, 6), None),
        (9, Rule.F_NEG, (9,), None),
        (11, Rule.T_JUST, (11,), None),
    ])


def eliminate_stepwise(t):
    """Run eliminate_step to the end, checking every intermediate proof."""
    steps = []
    while (site := find_minimal_cut(t)) is not None:
        before = cut_count(t)
        t, step = eliminate_step(t, site)
        assert check_proof(t).ok, step
        assert cut_count(t) <= before + 1
        steps.append(step)
        assert len(steps) < 20
    return t, steps


class TestRewriteCases:
    def test_factivity_against_left_sum(self):
        t = factive_sum_cut()
        rewritten, step = eliminate_step(t, find_minimal_cut(t))
        assert (step.case, step.sub_case) == ("III", "III T:/F+L")
        assert [c.relation for c in step.claims] == [LOWER_RANK]
        assert [c.formula for c in step.claims] == [F("x:p")]
        assert cut_count(rewritten) == 1
        assert check_proof(rewritten).ok

    def test_factivity_pair_ends_cut_free(self):
        result, steps = eliminate_stepwise(factive_sum_cut())
        assert steps[0].case == "III"
        assert cut_count(result) == 0
        assert_cut_free(eliminate_all(factive_sum_cut()))

    def test_consistency_against_left_sum(self):
        t = consistent_sum_cut()
        rewritten, step = eliminate_step(t, find_minimal_cut(t))
        assert step.case == "III"
        assert step.sub_case == "III T:⊥/F+L-(7)→(8)"
        assert [c.formula for c in step.claims] == [F("x:False")]
        assert cut_count(rewritten) == 1
        assert check_proof(rewritten).ok

    def test_consistency_pair_ends_cut_free(self):
        result, _ = eliminate_stepwise(consistent_sum_cut())
        assert cut_count(result) == 0
        assert_cut_free(eliminate_all(consistent_sum_cut()))

    def test_application_moves_above_the_cut(self):
        t = application_above_cut()
        site = find_minimal_cut(t)
        rewritten, step = eliminate_step(t, site)
        assert step.case == "II"
        assert step.sub_case == "II-(1)→(2) T· pushdown"
        assert [c.relation for c in step.claims] == [SAME_RANK_LOWER_WEIGHT]
        assert cut_count(rewritten) == 1
        assert check_proof(rewritten).ok
        assert find_minimal_cut(rewritten).weight < site.weight

    def test_application_pushdown_ends_cut_free(self):
        result, steps = eliminate_stepwise(application_above_cut())
        assert [s.case for s in steps][0] == "II"
        assert cut_count(result) == 0
        final = eliminate_all(application_above_cut())
        assert_cut_free(final)
        assert Rule.T_APP in rules_used(final)
