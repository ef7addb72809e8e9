import pytest

from generators import WEAKENING, F, mp_chain
from jtableau.cutelim import cut_count
from jtableau.errors import HilbertDefect, ParseError
from jtableau.hilbert import (
    IAN,
    MP,
    axiom_refutation,
    check_hilbert,
    load_hilbert,
    parse_hilbert,
    translate_to_tableau,
)
from jtableau.logics import EMPTY_CS, Scheme, parse_logic
from jtableau.syntax import Neg
from jtableau.tableau import Calculus, Rule, check_proof, rules_used

J = parse_logic("J")
LP = parse_logic("LP")


class TestParsing:
    def test_weakening_file(self, data_dir):
        proof = load_hilbert(data_dir / "weakening.hil")
        assert len(proof.lines) == 3
        assert proof.mp_count() == 1
        assert proof.conclusion == F(WEAKENING)
        assert proof.line(1).justification == IAN
        assert proof.line(3).justification == MP
        assert proof.line(3).refs == (1, 2)

    def test_text_round_trip(self, data_dir):
        proof = load_hilbert(data_dir / "checker.hil")
        assert parse_hilbert(proof.to_text()) == proof

    def test_scheme_names_are_case_insensitive(self):
        proof = parse_hilbert("1. x:A -> (x+y):A   [sum]\n")
        assert proof.line(1).justification == Scheme.SUM

    def test_missing_justification(self):
        with pytest.raises(ParseError, match="justification"):
            parse_hilbert("1. p -> p\n")

    def test_mp_needs_two_lines(self):
        with pytest.raises(HilbertDefect, match="two line numbers"):
            parse_hilbert("1. p -> p   [MP 1]\n")

    def test_unknown_justification(self):
        with pytest.raises(HilbertDefect, match="unknown justification"):
            parse_hilbert("1. p -> p   [Lemma]\n")

    def test_empty_proof(self):
        with pytest.raises(ParseError, match="empty"):
            parse_hilbert("# nothing here\n")

    def test_missing_line(self, data_dir):
        proof = load_hilbert(data_dir / "weakening.hil")
        with pytest.raises(HilbertDefect):
            proof.line(7)


class TestChecking:
    def test_weakening_checks(self, data_dir, ex_cs):
        assert check_hilbert(load_hilbert(data_dir / "weakening.hil"), J, ex_cs).ok

    def test_ian_outside_cs(self, data_dir):
        report = check_hilbert(load_hilbert(data_dir / "weakening.hil"), J, EMPTY_CS)
        assert not report.ok
        assert report.first.line_no == 1
        assert "constant specification" in str(report.first)

    def test_broken_instance_is_the_only_defect(self, data_dir, ex_cs):
        report = check_hilbert(load_hilbert(data_dir / "broken.hil"), J, ex_cs)
        assert [d.line_no for d in report.defects] == [2]
        assert "not an instance of jK" in str(report.first)

    def test_mp_must_cite_earlier_lines(self):
        proof = parse_hilbert("1. p -> p   [Taut]\n2. p -> p   [MP 3 1]\n")
        report = check_hilbert(proof, J, EMPTY_CS)
        assert "do not precede" in str(report.first)

    def test_mp_shape(self):
        proof = parse_hilbert("1. p   [Taut]\n2. p -> q   [Taut]\n3. r   [MP 1 2]\n")
        report = check_hilbert(proof, J, EMPTY_CS)
        assert [d.line_no for d in report.defects] == [1, 2, 3]

    def test_scheme_outside_logic(self):
        report = check_hilbert(parse_hilbert("1. x:A -> A   [jT]\n"), J, EMPTY_CS)
        assert "not an axiom of J" in str(report.first)

    def test_axiom_picks_a_scheme(self, data_dir):
        assert check_hilbert(load_hilbert(data_dir / "application.hil"), J, EMPTY_CS).ok

    def test_inadmissible_operation(self):
        report = check_hilbert(parse_hilbert("1. x:A -> !x:x:A   [j4]\n"), J, EMPTY_CS)
        assert not report.ok

    def test_line_numbers_increase(self):
        proof = parse_hilbert("2. p -> p   [Taut]\n1. q -> q   [Taut]\n")
        assert "does not increase" in str(check_hilbert(proof, J, EMPTY_CS).first)


class TestTranslation:
    def test_each_mp_becomes_two_cuts(self, data_dir, ex_cs):
        proof = load_hilbert(data_dir / "weakening.hil")
        t = translate_to_tableau(proof, J, ex_cs)
        assert t.calculus is Calculus.JLT_PLUS_CUT
        assert t.root_formula == Neg(F(WEAKENING))
        assert cut_count(t) == 2 * proof.mp_count()
        assert check_proof(t).ok

    def test_taut_line_is_propositional(self):
        t = translate_to_tableau(parse_hilbert("1. p -> p   [Taut]\n"), J, EMPTY_CS)
        assert rules_used(t) == {Rule.F_IMP: 1}
        assert cut_count(t) == 0

    def test_axiom_line_has_no_cut(self, data_dir):
        t = translate_to_tableau(load_hilbert(data_dir / "application.hil"), J, EMPTY_CS)
        assert cut_count(t) == 0
        assert Rule.T_APP in rules_used(t)

    def test_sum_template(self):
        t = translate_to_tableau(parse_hilbert("1. x:A -> (x+y):A   [Sum]\n"), J, EMPTY_CS)
        assert rules_used(t) == {Rule.F_IMP: 1, Rule.F_SUM_L: 1}

    def test_right_summand(self):
        t = translate_to_tableau(parse_hilbert("1. y:A -> (x+y):A   [Sum]\n"), J, EMPTY_CS)
        assert Rule.F_SUM_R in rules_used(t)

    def test_lp_proof(self, data_dir):
        proof = load_hilbert(data_dir / "checker.hil")
        t = translate_to_tableau(proof, LP, EMPTY_CS)
        assert cut_count(t) == 4
        assert check_proof(t).ok

    @pytest.mark.parametrize("depth", [1, 2, 3])
    def test_mp_chain(self, depth):
        proof = parse_hilbert(mp_chain(depth))
        t = translate_to_tableau(proof, J, EMPTY_CS)
        assert cut_count(t) == 2 * proof.mp_count() == 6 * depth
        assert check_proof(t).ok

    def test_defective_proof_is_not_translated(self, data_dir, ex_cs):
        with pytest.raises(HilbertDefect):
            translate_to_tableau(load_hilbert(data_dir / "broken.hil"), J, ex_cs)

    def test_template_rejects_non_instances(self):
        with pytest.raises(HilbertDefect):
            axiom_refutation(Scheme.JT, F("p"), EMPTY_CS)
