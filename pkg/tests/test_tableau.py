import pytest

from generators import WEAKENING, WEAKENING_CS, F, weakening_jl_tableau, weakening_jlt_tableau
from jtableau.errors import ParseError, RuleError
from jtableau.logics import EMPTY_CS, build_cs, parse_logic
from jtableau.syntax import BOTTOM, Neg
from jtableau.tableau import (
    Calculus,
    Closed,
    Node,
    OpenBranch,
    Rule,
    RuleApp,
    Tableau,
    apply_cs_rule,
    apply_rule,
    branch_closed,
    branches,
    check_proof,
    conclusions,
    from_blocks,
    is_closed,
    new_tableau,
    render_text,
    rules_for,
    rules_used,
    tableau_from_json,
    tableau_to_json,
    to_blocks,
)

J = parse_logic("J")
JD = parse_logic("JD")
CS = build_cs([F(WEAKENING_CS)], J)


def test_contradiction_closes():
    status = branch_closed([F("p"), F("~p")], EMPTY_CS)
    assert status == Closed("contradiction", F("p"))


def test_falsum_closes():
    assert branch_closed([BOTTOM], EMPTY_CS) == Closed("bottom", BOTTOM)


def test_cs_refutation_closes():
    status = branch_closed([Neg(F(WEAKENING_CS))], CS)
    assert status.reason == "cs_refutation"
    assert isinstance(branch_closed([Neg(F(WEAKENING_CS))], EMPTY_CS), OpenBranch)


def test_implication_rules():
    assert conclusions(Rule.F_IMP, [F("~(x:A -> c*x:(B -> A))")]) == ((F("x:A"), F("~c*x:(B -> A)")),)
    assert conclusions(Rule.T_IMP, [F("p -> q")]) == ((F("~p"),), (F("q"),))


def test_application_rule_branches_on_the_instantiation():
    split = conclusions(Rule.F_APP, [F("~(s*t):B")], F("A"))
    assert split == ((F("~s:(A -> B)"),), (F("~t:A"),))


def test_application_rule_accepts_either_premise_order():
    expected = ((F("x*y:q"),),)
    assert conclusions(Rule.T_APP, [F("x:(p -> q)"), F("y:p")]) == expected
    assert conclusions(Rule.T_APP, [F("y:p"), F("x:(p -> q)")]) == expected


def test_schema_mismatch():
    with pytest.raises(RuleError):
        conclusions(Rule.F_IMP, [F("p -> q")])
    with pytest.raises(RuleError, match="instantiation"):
        conclusions(Rule.F_APP, [F("~(s*t):B")])


def test_rules_per_calculus():
    assert Rule.F_APP in rules_for(Calculus.JL, J)
    assert Rule.PB not in rules_for(Calculus.JL, J)
    assert Rule.F_JUST_BOT in rules_for(Calculus.JL, JD)
    assert Rule.F_JUST_BOT not in rules_for(Calculus.JLT, JD)
    assert Rule.T_JUST_BOT in rules_for(Calculus.JLT, JD)
    assert Rule.CUT in rules_for(Calculus.JLT_PLUS_CUT, J)
    assert Rule.CUT not in rules_for(Calculus.JLT, J)


def test_jl_weakening_proof():
    t = weakening_jl_tableau(CS)
    assert t.size == 5
    assert check_proof(t).ok
    assert rules_used(t) == {Rule.F_IMP: 1, Rule.F_APP: 1}
    assert t.node(4).formula == Neg(F(WEAKENING_CS))
    assert t.node(5).formula == F("~x:A")


def test_jlt_weakening_proof():
    t = weakening_jlt_tableau(CS)
    assert t.size == 6
    assert check_proof(t).ok
    assert rules_used(t) == {Rule.F_IMP: 1, Rule.PB: 1, Rule.T_APP: 1}
    assert t.node(6).formula == F("c*x:(B -> A)")


def test_pb_restriction_on_application():
    t = new_tableau([Neg(F(WEAKENING))], Calculus.JLT, J, CS)
    with pytest.raises(RuleError, match="PB restriction"):
        apply_rule(t, 1, RuleApp(Rule.PB, (), F("q")))


def test_pb_restriction_on_checking():
    data = tableau_to_json(weakening_jlt_tableau(CS))
    for node in data["nodes"]:
        if node["id"] in (4, 5):
            node["instantiation"] = "q"
            node["formula"] = "q" if node["id"] == 4 else "~q"
    report = check_proof(tableau_from_json(data))
    assert "PB restriction" in report.kinds()


def test_application_restriction_on_checking():
    chain = [
        (6, "x*y:q", RuleApp(Rule.T_APP, (2, 4))),
        (5, "~z:q", RuleApp(Rule.F_IMP, (3,))),
        (4, "y:p", RuleApp(Rule.F_IMP, (3,))),
        (3, "~(y:p -> z:q)", RuleApp(Rule.F_IMP, (1,))),
        (2, "x:(p -> q)", RuleApp(Rule.F_IMP, (1,))),
        (1, "~(x:(p -> q) -> (y:p -> z:q))", None),
    ]
    node = None
    for node_id, text, app in chain:
        node = Node(node_id, F(text), app, (node,) if node else ())
    report = check_proof(Tableau(node, Calculus.JLT, J, EMPTY_CS, 7))
    assert "T· restriction" in report.kinds()


def test_consistency_rule_is_replaced_in_jlt():
    closing = Node(2, F("~x:False"), RuleApp(Rule.F_JUST_BOT, (), F("x:False")))
    root = Node(1, F("x:False"), None, (closing,))
    assert check_proof(Tableau(root, Calculus.JL, JD, EMPTY_CS, 3)).ok
    report = check_proof(Tableau(root, Calculus.JLT, JD, EMPTY_CS, 3))
    assert "calculus" in report.kinds()


def test_bottom_rule_appends_falsum():
    t = new_tableau([F("x:False")], Calculus.JLT, JD, EMPTY_CS)
    t = apply_rule(t, 1, RuleApp(Rule.T_JUST_BOT, (1,)))
    assert t.node(2).formula == BOTTOM
    assert is_closed(t)
    assert check_proof(t).ok


def test_consistency_term_must_occur_on_branch():
    t = new_tableau([F("~y:False")], Calculus.JL, JD, EMPTY_CS)
    with pytest.raises(RuleError, match="subterm"):
        apply_rule(t, 1, RuleApp(Rule.F_JUST_BOT, (), F("x:False")))
    assert apply_rule(t, 1, RuleApp(Rule.F_JUST_BOT, (), F("x:False")), unrestricted=True).size == 2


def test_rules_extend_leaves_only():
    t = weakening_jl_tableau(CS)
    with pytest.raises(RuleError, match="branch ends"):
        apply_rule(t, 2, RuleApp(Rule.T_IMP, (1,)))


def test_rule_outside_calculus():
    t = new_tableau([Neg(F(WEAKENING))], Calculus.JLT, J, CS)
    t = apply_rule(t, 1, RuleApp(Rule.F_IMP, (1,)))
    with pytest.raises(RuleError, match="not a rule"):
        apply_rule(t, 3, RuleApp(Rule.F_APP, (3,), F("A")))


def test_cs_rule():
    t = new_tableau([Neg(F(WEAKENING))], Calculus.JLT, J, CS)
    t = apply_cs_rule(t, 1, F(WEAKENING_CS))
    assert t.node(2).app.rule is Rule.PB
    assert isinstance(branch_closed(t.branch(3), CS), Closed)
    with pytest.raises(RuleError):
        apply_cs_rule(new_tableau([F("p")], Calculus.JL, J, CS), 1, F(WEAKENING_CS))


def test_tampered_rule_name():
    data = tableau_to_json(weakening_jl_tableau(CS))
    for node in data["nodes"]:
        if node["id"] in (4, 5):
            node["rule"] = "T→"
    assert "schema" in check_proof(tableau_from_json(data)).kinds()
    for node in data["nodes"]:
        if node["id"] in (4, 5):
            node["rule"] = "G·"
    with pytest.raises(ParseError, match="unknown rule"):
        tableau_from_json(data)


def test_json_round_trip():
    t = weakening_jlt_tableau(CS)
    assert tableau_from_json(tableau_to_json(t)) == t


def test_blocks_renumber_in_creation_order():
    t = weakening_jlt_tableau(CS)
    assert from_blocks(to_blocks(t), t.calculus, t.logic, t.cs) == t


def test_open_branch_is_a_defect():
    t = new_tableau([F("~p")], Calculus.JL, J, EMPTY_CS)
    assert check_proof(t).kinds() == {"open branch"}


def test_render_text():
    text = render_text(weakening_jl_tableau(CS))
    assert "⊗" in text
    assert "(open)" not in text
    assert "F· 3 A=A" in text
    assert text.splitlines()[0].startswith("1. ¬(x:A → c·x:(B → A))")


def test_branches_follow_leaf_order():
    t = weakening_jl_tableau(CS)
    assert branches(t) == [
        [F(f"~({WEAKENING})"), F("x:A"), F("~c*x:(B -> A)"), F(f"~{WEAKENING_CS}")],
        [F(f"~({WEAKENING})"), F("x:A"), F("~c*x:(B -> A)"), F("~x:A")],
    ]
