import pytest

from acgs.benchmarks import gen_bookstore, gen_castle, gen_dining
from acgs.errors import ParseError
from acgs.formulas import (
    FALSE,
    TRUE,
    And,
    Atom,
    Coalition,
    GroupKnows,
    Knows,
    Next,
    Not,
    PAnd,
    PNot,
    PathState,
    Release,
    Until,
    atoms_of_path,
    classify,
    collect_state_subformulae,
    format_formula,
    normalize_single_temporal,
    parse_formula,
    parse_path_formula,
    substitute_state_subformulae,
)

q = Atom("q")
p = Atom("p")


def test_invariant_modality_desugars():
    got = parse_formula("<<a1>> G q")
    want = Coalition(("a1",), PNot(Until(PathState(TRUE), PathState(Not(q)))))
    assert got == want


def test_dual_coalition_desugars():
    got = parse_formula("[[a1,a2]] X p")
    want = Not(Coalition(("a1", "a2"), PNot(Next(PathState(p)))))
    assert got == want


def test_atoms_and_builtins():
    assert parse_formula("q") == q
    assert parse_formula("true") == TRUE
    assert parse_formula("false") == FALSE
    assert parse_formula("!q") == Not(q)


def test_or_and_implies_desugar():
    assert parse_formula("p | q") == Not(And(Not(p), Not(q)))
    assert parse_formula("p -> q") == Not(And(p, Not(q)))


def test_precedence():
    # & binds tighter than |, which binds tighter than ->
    assert parse_formula("p -> q | r & s") == parse_formula("p -> (q | (r & s))")
    # ! binds tighter than &
    assert parse_formula("!p & q") == And(Not(p), q)
    # prefix operators bind tighter than &
    assert parse_formula("K a p & q") == And(Knows("a", p), q)
    # U binds tighter than & and is right associative
    assert parse_formula("<<a>> (p U q & r)") == Coalition(
        ("a",), PAnd(Until(PathState(p), PathState(q)), PathState(Atom("r"))))
    assert parse_formula("<<a>> (p U q U r)") == Coalition(
        ("a",), Until(PathState(p), Until(PathState(q), PathState(Atom("r")))))
    # a coalition grabs one prefix-level argument only
    assert parse_formula("<<a>> X p & q") == And(
        Coalition(("a",), Next(PathState(p))), q)


def test_f_desugars_to_until():
    assert parse_formula("<<a>> F q") == Coalition(
        ("a",), Until(PathState(TRUE), PathState(q)))


def test_epistemic_parsing():
    assert parse_formula("K a1 q") == Knows("a1", q)
    assert parse_formula("E {a,b} q") == GroupKnows("E", ("a", "b"), q)
    assert parse_formula("D {a} q") == GroupKnows("D", ("a",), q)
    assert parse_formula("C {a,b} (p & q)") == GroupKnows("C", ("a", "b"), And(p, q))


def test_tighten_folds_state_subtrees():
    got = parse_formula("<<a>> X (p & K b q)")
    want = Coalition(("a",), Next(PathState(And(p, Knows("b", q)))))
    assert got == want


def test_tighten_cancels_double_negation():
    got = parse_formula("<<a>> !!(p U q)")
    assert got == Coalition(("a",), Until(PathState(p), PathState(q)))


def test_empty_coalition():
    assert parse_formula("<<>> X q") == Coalition((), Next(PathState(q)))


@pytest.mark.parametrize("bad,complaint", [
    ("p U q", "outside any coalition"),
    ("X p", "outside any coalition"),
    ("K a (X p)", "must be a state formula"),
    ("<<a>> X", "ended early"),
    ("(p & q", "expected"),
    ("p q", "trailing input"),
    ("p & U", "reserved word"),
    ("E {} q", "at least one agent"),
    ("<<a>> G q @", "unexpected character"),
    ("", "ended early"),
])
def test_parse_errors(bad, complaint):
    with pytest.raises(ParseError, match=complaint):
        parse_formula(bad)


ROUND_TRIP = [
    "q",
    "!q",
    "!!q",
    "p | q",
    "p -> (q -> p)",
    "<<a1>> G q",
    "[[a1,a2]] X p",
    "<<a>> F (p & !q)",
    "<<a,b>> ((p | q) U (K a p))",
    "<<a>> (p R q)",
    "<<a>> G (p U q)",
    "<<a>> !F !(p U q)",
    "<<a>> X X p",
    "K a E {a,b} D {b} C {a,b} p",
    "<<>> G ((odd & !c1paid) -> ((K c1 (c2paid | c3paid)) & !(K c1 c2paid)))",
]


@pytest.mark.parametrize("text", ROUND_TRIP)
def test_round_trip(text):
    ast = parse_formula(text)
    assert parse_formula(format_formula(ast)) == ast


def test_round_trip_benchmark_formulas():
    for gen in (lambda: gen_dining(3), lambda: gen_castle(2, 1), gen_bookstore):
        _, formulas = gen()
        for text in formulas:
            ast = parse_formula(text)
            assert parse_formula(format_formula(ast)) == ast


def test_g_prints_back_as_g():
    assert format_formula(parse_formula("<<a>> G q")) == "<<a>> G q"
    assert format_formula(parse_formula("<<a>> F q")) == "<<a>> F q"


def test_normalize_single_temporal():
    body = parse_formula("<<a>> G q").body
    assert normalize_single_temporal(body) == ("R", FALSE, q)
    body = parse_formula("<<a>> F q").body
    assert normalize_single_temporal(body) == ("U", TRUE, q)
    body = parse_formula("<<a>> X !q").body
    assert normalize_single_temporal(body) == ("X", Not(q))
    body = parse_formula("<<a>> !(p U !q)").body
    assert normalize_single_temporal(body) == ("R", Not(p), q)
    body = parse_formula("<<a>> !X p").body
    assert normalize_single_temporal(body) == ("X", Not(p))
    # nested temporal structure has no single-operator form
    body = parse_formula("<<a>> (X p U q)").body
    assert normalize_single_temporal(body) is None
    body = parse_formula("<<a>> (p & X q)").body
    assert normalize_single_temporal(body) is None
    # embedded state modalities are fine, they are just operands
    body = parse_formula("<<a>> X (K b p)").body
    assert normalize_single_temporal(body) == ("X", Knows("b", p))


def test_classify_spec_examples():
    c = classify(parse_formula("<<a>> X q"))
    assert c.is_atl and c.is_simple_coalitions and c.is_positive
    c = classify(parse_formula("!(<<a>> X q)"))
    assert not c.is_positive
    assert c.is_atl and c.is_simple_coalitions
    c = classify(parse_formula("<<a>> (F p & G q)"))
    assert not c.is_atl
    assert c.is_simple_coalitions and c.is_positive


def test_classify_nesting():
    c = classify(parse_formula("<<a>> X (<<b>> (p U q))"))
    assert c.is_atl
    assert not c.is_simple_coalitions
    assert c.agents_of == {"a", "b"}
    c = classify(parse_formula("<<a1>> X (K a3 p)"))
    assert c.agents_of == {"a1", "a3"}
    assert not c.is_simple_coalitions


def test_classify_positive_polarity():
    assert classify(parse_formula("p | q")).is_positive
    assert classify(parse_formula("p -> q")).is_positive
    assert classify(parse_formula("K a p")).is_positive
    assert not classify(parse_formula("!(K a p)")).is_positive
    assert not classify(parse_formula("[[a]] X q")).is_positive
    # G hides a negation but its body polarity works out positive
    assert classify(parse_formula("<<a>> G (p | q)")).is_positive
    # an implication keeps its consequent positive but flips its antecedent
    assert classify(parse_formula("p -> <<a>> X q")).is_positive
    assert not classify(parse_formula("(<<a>> X q) -> p")).is_positive


def test_atoms_of_path():
    body = parse_formula("<<a>> ((p | q) U (true & !r))").body
    assert atoms_of_path(body) == {"p", "q", "r"}
    with pytest.raises(ValueError, match="not pure LTL"):
        atoms_of_path(parse_formula("<<a>> F (K b p)").body)


def test_substitute_state_subformulae():
    outer = parse_formula("<<c>> F (<<d>> X p)")
    inner = Coalition(("d",), Next(PathState(p)))
    assert collect_state_subformulae(outer.body) == [inner]
    rewritten, fresh = substitute_state_subformulae(
        outer.body, {inner: frozenset({"s1"})})
    assert rewritten == Until(PathState(TRUE), PathState(Atom("__sub0")))
    assert fresh == {"__sub0": frozenset({"s1"})}

    plain = parse_formula("<<a>> G q").body
    rewritten, fresh = substitute_state_subformulae(plain, {})
    assert rewritten == plain and fresh == {}

    know = parse_formula("<<a>> ((K b p) U p)").body
    sub = Knows("b", p)
    rewritten, fresh = substitute_state_subformulae(know, {sub: frozenset({"s0", "s1"})})
    assert rewritten == Until(PathState(Atom("__sub0")), PathState(p))
    assert fresh == {"__sub0": frozenset({"s0", "s1"})}

    with pytest.raises(ValueError, match="no valuation"):
        substitute_state_subformulae(know, {})


def test_duplicate_agents_collapse():
    assert parse_formula("<<a,a,b>> X q").agents == ("a", "b")
