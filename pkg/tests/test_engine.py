"""Driver: boolean/epistemic layer, backend dispatch, shared-ability reading."""

import random

import pytest

from acgs.benchmarks import gen_figure1
from acgs.engine import McStats, Verdict, check, mc, semantics_sigma
from acgs.enumcheck import check_simple_atl
from acgs.errors import AlgorithmInapplicable, UndecidableConfiguration
from acgs.formulas import Atom, Coalition, Next, PathState, Until, parse_formula
from acgs.oracle import prop_states

from randgen import random_cgs

ALL = frozenset(("s0", "s1", "s2", "s3"))
Q = frozenset(("s0", "s1", "s2"))


def fig1(a1="IR", a2="ir"):
    m, _ = gen_figure1((a1, a2))
    return m


# -- boolean and epistemic layer --------------------------------------------------

def test_propositional_evaluation():
    m = fig1()
    assert mc(m, "q") == Q
    assert mc(m, "!q") == {"s3"}
    assert mc(m, "true") == ALL
    assert mc(m, "false") == set()
    assert mc(m, "q & !q") == set()
    assert mc(m, "q | !q") == ALL
    assert mc(m, "nosuchprop") == set()


def test_knowledge_respects_observability():
    m = fig1()  # a2 cannot tell s0, s1, s2 apart
    assert mc(m, "K a1 q") == Q
    assert mc(m, "K a2 q") == Q
    assert mc(m, "K a2 !q") == {"s3"}
    blurred = m.with_labels({"q": ("s0", "s1")})
    assert mc(blurred, "K a1 q") == {"s0", "s1"}
    assert mc(blurred, "K a2 q") == set()


def test_group_knowledge_identities():
    rng = random.Random(90210)
    for _ in range(30):
        m = random_cgs(rng, max_states=5, max_agents=3)
        i, j = m.agents[0], m.agents[-1]
        pair = "{%s,%s}" % (i, j)
        shared = mc(m, "E %s p" % pair)
        assert shared == mc(m, "K %s p" % i) & mc(m, "K %s p" % j)
        assert mc(m, "C %s p" % pair) <= shared
        assert shared <= mc(m, "D %s p" % pair)
        for kind in ("E", "D", "C"):
            assert mc(m, "%s {%s} p" % (kind, i)) == mc(m, "K %s p" % i)


def test_negation_is_complement():
    rng = random.Random(555)
    for _ in range(20):
        m = random_cgs(rng, max_states=5, max_agents=3)
        f = rng.choice(["p & !q", "K %s p" % m.agents[0], "p -> q"])
        assert mc(m, "!(%s)" % f) == frozenset(m.states) - mc(m, f)


def test_rejects_malformed_requests():
    m = fig1()
    with pytest.raises(ValueError):
        mc(m, "q", algo="fast")
    with pytest.raises(ValueError):
        mc(m, "K nobody q")
    with pytest.raises(ValueError):
        mc(m, "E {a1,nobody} q")
    with pytest.raises(ValueError):
        mc(m, "<<nobody>> X q")
    with pytest.raises(TypeError):
        mc(m, Next(PathState(Atom("q"))))


# -- coalition dispatch -----------------------------------------------------------

def test_coalition_goldens_on_every_algorithm():
    cases = [
        ("ir", "<<a1>> G q", {"s0"}),
        ("Ir", "<<a1>> G q", set()),
        ("IR", "<<a1>> G q", set()),
        ("ir", "<<a2>> F !q", {"s1", "s2", "s3"}),
        ("Ir", "<<a2>> F !q", ALL),
    ]
    for a2, text, want in cases:
        for algo in ("auto", "enum", "parity"):
            assert mc(fig1("IR", a2), text, algo=algo) == want, (a2, text, algo)


def test_embedded_strategic_subformulas_are_checked_first():
    rng = random.Random(2718)
    for _ in range(20):
        m = random_cgs(rng, max_states=5, max_agents=3)
        inner = Coalition(tuple(m.agents[-1:]),
                          Until(PathState(Atom("p")), PathState(Atom("q"))))
        outer = Coalition(tuple(m.agents[:1]), Next(PathState(inner)))
        want = check_simple_atl(m, m.agents[:1], ("X", mc(m, inner)))
        assert mc(m, outer) == want


def test_embedded_knowledge_inside_a_goal():
    m = fig1()
    want = check_simple_atl(m, ["a1"], ("U", ALL, mc(m, "K a2 q")))
    assert mc(m, "<<a1>> F (K a2 q)") == want


def test_enumeration_refuses_composite_goals():
    m = fig1()
    text = "<<a1>> ((F q) & (G q))"
    with pytest.raises(AlgorithmInapplicable):
        mc(m, text, algo="enum")
    assert mc(m, text) == mc(m, "<<a1>> G q")


def test_budget_steers_automatic_dispatch():
    m = fig1()
    stats = McStats()
    got = mc(m, "<<a1>> G q", stats=stats)
    assert stats.enum_runs == 1 and stats.parity_runs == 0
    assert stats.enum_combinations >= 1
    tight = McStats()
    assert mc(m, "<<a1>> G q", budget=1, stats=tight) == got
    assert tight.enum_runs == 0 and tight.parity_runs == 1
    assert tight.parity_games >= 1
    assert tight.game_vertices > 0
    assert tight.dpa_states >= 1
    assert tight.coalitions == 1
    assert tight.seconds >= 0.0


def test_auto_prefers_games_for_recall_coalitions():
    # one perfect-recall agent: 2^15 memoryless profiles, but a single subgame
    from acgs.model import Cgs
    states = ["s%d" % i for i in range(15)]
    trans = {(s, act): "s%d" % min(int(s[1:]) + 1, 14)
             for s in states for act in (("a",), ("b",))}
    m = Cgs(states=states, initial=["s0"], agents=["w"],
            actions={"w": ["a", "b"]},
            protocol={"w": {s: ("a", "b") for s in states}},
            transitions=trans, labels={"end": ["s14"]},
            ability={"w": "IR"})
    st = McStats()
    assert mc(m, "<<w>> F end", stats=st) == frozenset(states)
    assert st.parity_runs == 1 and st.enum_runs == 0
    # a small imperfect-information coalition still goes to enumeration
    st2 = McStats()
    mc(fig1("IR", "ir"), "<<a2>> F !q", stats=st2)
    assert st2.enum_runs == 1 and st2.parity_runs == 0


def test_both_backends_refuse_oversized_strategy_spaces():
    from acgs.errors import StrategySpaceExceeded
    m = fig1("Ir", "ir")  # a1 commits a memoryless strategy up front
    with pytest.raises(StrategySpaceExceeded):
        mc(m, "<<a1>> G q", algo="enum", budget=1)
    with pytest.raises(StrategySpaceExceeded):
        mc(m, "<<a1>> G q", algo="parity", budget=0)


def test_memoization_reuses_repeated_subformulas():
    m = fig1()
    stats = McStats()
    mc(m, "<<a1>> G q & !(<<a1>> G q)", stats=stats)
    assert stats.coalitions == 1


def test_strategic_formulas_reject_unobserved_recall():
    m = fig1("IR", "iR")
    assert mc(m, "q") == Q  # no coalition, no problem
    assert mc(m, "K a2 q") == Q
    for algo in ("auto", "enum", "parity"):
        with pytest.raises(UndecidableConfiguration):
            mc(m, "<<a1>> X q", algo=algo)


def test_formula_nodes_and_text_agree():
    m = fig1()
    assert mc(m, parse_formula("<<a1>> G q")) == mc(m, "<<a1>> G q")


# -- verdicts ---------------------------------------------------------------------

def test_check_reports_initial_states():
    m = fig1()
    got = check(m, "<<a1>> G q")
    assert got == Verdict(True, {"s0": True}, frozenset({"s0"}))
    assert check(m, "!q").sat is False
    assert check(m, "<<a2>> F !q") == Verdict(
        False, {"s0": False}, frozenset({"s1", "s2", "s3"}))


# -- shared-ability evaluation ----------------------------------------------------

def test_shared_ability_matches_typed_models():
    g = fig1("IR", "ir")  # the ability map is overridden anyway
    assert semantics_sigma(g, "ir", "<<a2>> F !q") == {"s1", "s2", "s3"}
    assert semantics_sigma(g, "Ir", "<<a2>> F !q") == ALL
    assert semantics_sigma(g, "IR", "<<a2>> F !q") == ALL


def test_shared_ability_equals_unrestricted_when_perfect():
    rng = random.Random(161803)
    for _ in range(20):
        m = random_cgs(rng, max_states=5, max_agents=3)
        f = "<<%s>> (p U q)" % m.agents[0]
        plain = m.with_ability({i: "IR" for i in m.agents})
        assert semantics_sigma(m, "IR", f) == mc(plain, f)


def test_shared_ability_guards():
    g = fig1()
    with pytest.raises(UndecidableConfiguration):
        semantics_sigma(g, "iR", "<<a1>> X q")
    with pytest.raises(ValueError):
        semantics_sigma(g, "rI", "<<a1>> X q")
    mixed = "<<a1>> X q & <<a2>> X q"
    with pytest.raises(AlgorithmInapplicable):
        semantics_sigma(g, "ir", mixed)
    both = semantics_sigma(g, "IR", mixed)  # unrestricted reading is fine
    assert both == mc(g.with_ability({}), mixed)
    assert semantics_sigma(g, "ir", "K a2 q") == prop_states(g, Atom("q"))


def test_shared_ability_restricts_only_mentioned_agents():
    g = fig1()
    # a1 is not in the coalition, so it stays unrestricted even under "ir"
    got = semantics_sigma(g, "ir", "<<a2>> F !q")
    want = mc(g.with_ability({"a2": "ir"}), "<<a2>> F !q")
    assert got == want
